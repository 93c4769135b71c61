// Acceptance gate: the release criteria checked in one binary, one
// [PASS]/[FAIL] line per criterion. Exits nonzero if any criterion fails.
// Tolerances are pinned next to each check.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "naive_bpe.hpp"
#include "support.hpp"
#include "vexp/bpe.hpp"
#include "vexp/corpus.hpp"
#include "vexp/corpus_io.hpp"
#include "vexp/embed_init.hpp"
#include "vexp/metrics.hpp"
#include "vexp/pipeline.hpp"
#include "vexp/rng.hpp"
#include "vexp/schedule.hpp"
#include "vexp/vocab.hpp"

using namespace vexp;

namespace {

int g_failures = 0;

using CheckFn = std::function<void(bool, const std::string&)>;

template <typename Body>
void criterion(int idx, const char* label, Body&& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> problems;
    CheckFn check = [&](bool ok, const std::string& what) {
        if (!ok)
            problems.push_back(what);
    };
    try {
        body(check);
    } catch (const std::exception& e) {
        problems.push_back(std::string("unexpected exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (problems.empty()) {
        std::printf("[PASS] %2d. %s (%.1fs)\n", idx, label, secs);
    } else {
        std::printf("[FAIL] %2d. %s (%.1fs)\n", idx, label, secs);
        for (const std::string& p : problems)
            std::printf("          - %s\n", p.c_str());
        ++g_failures;
    }
    std::fflush(stdout);
}

std::string fmt4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// Unique words + counts as plain strings, the naive reference's input shape.
struct Uniques {
    std::vector<std::string> words;
    std::vector<int64_t> counts;
};

Uniques uniques_of(const WordStream& stream) {
    bpe::WordTable t = bpe::WordTable::build(stream);
    Uniques u;
    u.words.reserve(t.words.size());
    for (std::string_view w : t.words)
        u.words.emplace_back(w);
    u.counts = t.counts;
    return u;
}

bool same_vocab(const Vocabulary& v, const reference::NaiveVocab& n, std::string* why) {
    if (v.base_size() != n.base_size) {
        *why = "base size " + std::to_string(v.base_size()) + " vs " +
               std::to_string(n.base_size);
        return false;
    }
    if (v.merges().size() != n.merges.size()) {
        *why = "merge count " + std::to_string(v.merges().size()) + " vs " +
               std::to_string(n.merges.size());
        return false;
    }
    for (size_t r = 0; r < n.merges.size(); ++r) {
        const MergeRule& m = v.merges()[r];
        if (m.left != n.merges[r][0] || m.right != n.merges[r][1] ||
            m.result != n.merges[r][2]) {
            *why = "merge rank " + std::to_string(r) + " differs";
            return false;
        }
    }
    for (size_t id = 0; id < v.size(); ++id)
        if (v.surface(TokenId(id)) != n.surfaces[id]) {
            *why = "surface of id " + std::to_string(id) + " differs";
            return false;
        }
    return true;
}

std::map<std::string, std::string> dir_bytes(const std::string& root) {
    std::map<std::string, std::string> m;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
        if (!e.is_regular_file())
            continue;
        std::string rel = std::filesystem::relative(e.path(), root).generic_string();
        m[rel] = testsup::read_file(e.path().string());
    }
    return m;
}

} // namespace

int main() {
    std::printf("acceptance gate: 10 criteria\n");

    // ---- 1. quarter-cosine mixture table -------------------------------
    criterion(1, "mixture schedule reproduces the 16-stage 30->90/5 table to 0.01pp",
              [](CheckFn check) {
        const double kTolPp = 0.01; // percentage points
        schedule::MixturePlan mix = schedule::mixture_schedule(16, 30.0, 90.0, 5.0);
        static const double want_ar[16] = {30.00, 30.33, 31.31, 32.94, 35.19, 38.04,
                                           41.46, 45.41, 49.85, 54.73, 60.00, 65.60,
                                           71.46, 77.53, 83.73, 90.00};
        static const double want_en[16] = {65.00, 64.67, 63.69, 62.06, 59.81, 56.96,
                                           53.54, 49.59, 45.15, 40.27, 35.00, 29.40,
                                           23.54, 17.47, 11.27, 5.00};
        check(mix.rows.size() == 16, "expected 16 rows");
        for (size_t i = 0; i < mix.rows.size() && i < 16; ++i) {
            const auto& r = mix.rows[i];
            check(std::fabs(r.arabic_pct - want_ar[i]) <= kTolPp,
                  "stage " + std::to_string(i + 1) + " arabic " + fmt4(r.arabic_pct) +
                      " want " + fmt4(want_ar[i]));
            check(std::fabs(r.english_pct - want_en[i]) <= kTolPp,
                  "stage " + std::to_string(i + 1) + " english " + fmt4(r.english_pct) +
                      " want " + fmt4(want_en[i]));
            check(std::fabs(r.math_code_pct - 5.0) <= kTolPp,
                  "stage " + std::to_string(i + 1) + " math/code not 5.00");
        }
    });

    // ---- 2. expansion schedules ----------------------------------------
    criterion(2, "exponential doubling and uniform endpoint schedules are exact",
              [](CheckFn check) {
        schedule::ExpansionSchedule e = schedule::exponential_schedule(12800, 16);
        const std::vector<uint64_t> want = {0,   1,    2,    4,    8,    16,   32,  64,
                                            128, 256, 512, 1024, 2048, 4096, 8192, 12800};
        check(e.cumulative == want, "exponential(12800, 16) cumulative list differs");
        schedule::ExpansionSchedule u = schedule::uniform_schedule(12800, 16);
        check(u.cumulative.size() == 16, "uniform(12800, 16) must have 16 entries");
        check(u.cumulative[1] == 853,
              "uniform stage 2 is " + std::to_string(u.cumulative[1]) + ", want 853");
        check(u.cumulative[15] == 12800,
              "uniform stage 16 is " + std::to_string(u.cumulative[15]) + ", want 12800");
    });

    // ---- 3. fertility arithmetic ---------------------------------------
    criterion(3, "fertility at full-corpus scale matches to 4 decimals",
              [](CheckFn check) {
        check(fmt4(metrics::fertility(210027671, 39006442)) == "5.3844",
              "fertility(210027671, 39006442) = " +
                  fmt4(metrics::fertility(210027671, 39006442)) + ", want 5.3844");
        check(fmt4(metrics::fertility(66554771, 39006442)) == "1.7063",
              "fertility(66554771, 39006442) = " +
                  fmt4(metrics::fertility(66554771, 39006442)) + ", want 1.7063");
    });

    // ---- 4. trainer and tokenizer against the naive reference ----------
    criterion(4, "trained merges and token streams match the naive reference on 120 corpora",
              [](CheckFn check) {
        Rng rng(0xACCE04);
        for (int t = 0; t < 120; ++t) {
            std::string text = testsup::small_corpus(rng);
            WordStream stream = segment_words(normalize(text));
            Uniques u = uniques_of(stream);
            uint64_t base_sz = bpe::alphabet_size(stream);
            size_t budget = rng.below(13);
            bpe::TrainOptions opt;
            opt.min_pair_count = 2;
            bpe::TrainResult fast = bpe::train_base(stream, base_sz + budget, opt);
            reference::NaiveVocab naive =
                reference::naive_train(u.words, u.counts, budget, 2);
            std::string why;
            if (!same_vocab(fast.vocab, naive, &why)) {
                check(false, "instance " + std::to_string(t) + ": " + why);
                return;
            }
            for (const std::string& w : u.words) {
                std::vector<TokenId> a = bpe::tokenize_word(fast.vocab, w);
                std::vector<uint32_t> b = reference::naive_tokenize(naive, w);
                if (a != b) {
                    check(false, "instance " + std::to_string(t) +
                                     ": token stream differs on \"" + w + "\"");
                    return;
                }
            }
        }
        check(true, "");
    });

    // ---- 5. staged extension equals one-shot training -------------------
    criterion(5, "chained extensions equal one-shot training on 110 instances",
              [](CheckFn check) {
        Rng rng(0xACCE05);
        for (int t = 0; t < 110; ++t) {
            std::string text = testsup::small_corpus(rng);
            WordStream stream = segment_words(normalize(text));
            uint64_t base_sz = bpe::alphabet_size(stream);
            uint64_t total = rng.below(13);
            size_t stages = 2 + rng.below(3);
            std::vector<uint64_t> cuts;
            for (size_t s = 0; s + 1 < stages; ++s)
                cuts.push_back(rng.below(total + 1));
            cuts.push_back(total);
            std::sort(cuts.begin(), cuts.end());

            bpe::TrainOptions opt;
            opt.min_pair_count = 1 + int(rng.below(2));
            bpe::TrainResult one = bpe::train_base(stream, base_sz + total, opt);
            bpe::TrainResult cur = bpe::train_base(stream, base_sz + cuts[0], opt);
            for (size_t s = 1; s < cuts.size(); ++s)
                cur = bpe::extend_vocab(cur.vocab, stream, base_sz + cuts[s],
                                        uint32_t(s), opt);

            bool equal = one.vocab.size() == cur.vocab.size() &&
                         one.vocab.merges().size() == cur.vocab.merges().size();
            for (size_t r = 0; equal && r < one.vocab.merges().size(); ++r) {
                const MergeRule& a = one.vocab.merges()[r];
                const MergeRule& b = cur.vocab.merges()[r];
                equal = a.left == b.left && a.right == b.right && a.result == b.result;
            }
            if (!equal) {
                check(false, "instance " + std::to_string(t) +
                                 ": staged merge list differs from one-shot");
                return;
            }
        }
        check(true, "");
    });

    // ---- 6./7./10. staged pipeline runs on a synthetic Arabic corpus ----
    testsup::TempDir tmp("acceptance");
    std::string ar_path;
    uint64_t ar_words = 0;
    pipeline::RunConfig exp_cfg;
    pipeline::RunResult exp_result;
    bool have_runs = false;

    criterion(6, "uniform spikes, exponential stays smooth (512 new tokens, 10 stages)",
              [&](CheckFn check) {
        std::string text = testsup::synthetic_arabic(99, 120000);
        ar_words = testsup::word_count(text);
        check(ar_words >= 100000, "corpus has only " + std::to_string(ar_words) + " words");
        std::vector<Document> docs =
            testsup::docs_from_text(text, LangClass::arabic, "ar", 7);
        ar_path = tmp.file("ar.jsonl");
        write_corpus(ar_path, docs);

        auto make_cfg = [&](schedule::Strategy st, const char* out) {
            pipeline::RunConfig cfg;
            cfg.corpus_paths[size_t(LangClass::arabic)] = ar_path;
            cfg.base.train_target = 0; // alphabet-only base
            cfg.strategy = st;
            cfg.budget = 512;
            cfg.stages = 10;
            cfg.use_mixture = false;
            cfg.words_per_stage = {ar_words}; // every stage sees the full corpus
            cfg.out_dir = tmp.file(out);
            cfg.min_pair_count = 2;
            cfg.seed = 1;
            return cfg;
        };
        pipeline::RunConfig uni_cfg = make_cfg(schedule::Strategy::uniform, "uni");
        exp_cfg = make_cfg(schedule::Strategy::exponential, "exp");
        check(pipeline::validate(uni_cfg).empty(), "uniform config failed validation");
        check(pipeline::validate(exp_cfg).empty(), "exponential config failed validation");

        pipeline::RunResult uni_result = pipeline::run(uni_cfg);
        exp_result = pipeline::run(exp_cfg);
        have_runs = true;

        auto max_oov = [](const pipeline::RunResult& r) {
            double m = 0;
            for (const auto& a : r.artifacts)
                m = std::max(m, a.stage_report.oov_ratio_stage_slice);
            return m;
        };
        auto max_drop = [](const pipeline::RunResult& r) {
            double m = 0;
            for (size_t i = 1; i < r.artifacts.size(); ++i)
                m = std::max(m, r.artifacts[i - 1].stage_report.compression_ratio -
                                    r.artifacts[i].stage_report.compression_ratio);
            return m;
        };
        double uni_oov = max_oov(uni_result), exp_oov = max_oov(exp_result);
        double uni_drop = max_drop(uni_result), exp_drop = max_drop(exp_result);
        check(uni_oov > exp_oov, "max new-token occurrence ratio: uniform " +
                                     fmt(uni_oov) + " not > exponential " + fmt(exp_oov));
        check(exp_drop < uni_drop, "max compression drop: exponential " + fmt(exp_drop) +
                                       " not < uniform " + fmt(uni_drop));
    });

    criterion(7, "final vocabulary at most halves the character-level token count",
              [&](CheckFn check) {
        check(have_runs, "pipeline runs unavailable");
        if (!have_runs)
            return;
        WordStream stream = build_word_stream(read_corpus(ar_path));
        Vocabulary base = Vocabulary::load(exp_result.base_vocab_path);
        Vocabulary final_v = Vocabulary::load(exp_result.artifacts.back().vocab_path);
        int64_t base_tokens = metrics::accumulate(stream, base).total_tokens;
        int64_t final_tokens = metrics::accumulate(stream, final_v).total_tokens;
        check(base.merges().empty(), "base vocabulary should be alphabet-only");
        check(final_tokens * 2 <= base_tokens,
              "final " + std::to_string(final_tokens) + " tokens vs base " +
                  std::to_string(base_tokens) + " (need factor >= 2)");
    });

    // ---- 8. embedding initialization -----------------------------------
    criterion(8, "1000 random init plans average constituent rows exactly",
              [](CheckFn check) {
        const double kRelTol = 1e-6;
        std::mt19937_64 g(0xE8BED);
        std::uniform_real_distribution<float> val(-2.0f, 2.0f);
        for (int t = 0; t < 1000; ++t) {
            uint32_t dim = 1 + uint32_t(g() % 16);
            uint32_t rows = 2 + uint32_t(g() % 40);
            embed::EmbeddingMatrix m;
            m.rows = rows;
            m.dim = dim;
            m.data.resize(size_t(rows) * dim);
            for (float& x : m.data)
                x = val(g);
            embed::InitPlan plan;
            size_t entries = 1 + g() % 8;
            for (size_t i = 0; i < entries; ++i) {
                embed::InitEntry e;
                e.new_id = rows + TokenId(i);
                size_t k = 1 + g() % 6;
                for (size_t c = 0; c < k; ++c)
                    e.constituents.push_back(TokenId(g() % rows));
                plan.entries.push_back(std::move(e));
            }
            embed::EmbeddingMatrix grown = embed::apply_plan(m, plan);
            if (std::memcmp(grown.data.data(), m.data.data(),
                            m.data.size() * sizeof(float)) != 0) {
                check(false, "instance " + std::to_string(t) + ": old rows changed");
                return;
            }
            for (const embed::InitEntry& e : plan.entries) {
                auto got = grown.row(e.new_id);
                double max_norm2 = 0, got_norm2 = 0;
                for (TokenId c : e.constituents) {
                    double n2 = 0;
                    for (uint32_t d = 0; d < dim; ++d)
                        n2 += double(m.row(c)[d]) * double(m.row(c)[d]);
                    max_norm2 = std::max(max_norm2, n2);
                }
                for (uint32_t d = 0; d < dim; ++d) {
                    double s = 0;
                    float lo = m.row(e.constituents[0])[d];
                    float hi = lo;
                    for (TokenId c : e.constituents) {
                        s += double(m.row(c)[d]);
                        lo = std::min(lo, m.row(c)[d]);
                        hi = std::max(hi, m.row(c)[d]);
                    }
                    double mean = s / double(e.constituents.size());
                    double err = std::fabs(double(got[d]) - mean);
                    if (err > kRelTol * std::max(1.0, std::fabs(mean))) {
                        check(false, "instance " + std::to_string(t) + ": row " +
                                         std::to_string(e.new_id) + " dim " +
                                         std::to_string(d) + " off by " + fmt(err));
                        return;
                    }
                    if (got[d] < lo || got[d] > hi) {
                        check(false, "instance " + std::to_string(t) +
                                         ": mean escapes the constituent hull");
                        return;
                    }
                    got_norm2 += double(got[d]) * double(got[d]);
                }
                if (got_norm2 > max_norm2 * (1.0 + 1e-6) + 1e-12) {
                    check(false, "instance " + std::to_string(t) +
                                     ": mean norm exceeds max constituent norm");
                    return;
                }
                if (e.constituents.size() == 1) {
                    auto src = m.row(e.constituents[0]);
                    if (std::memcmp(got.data(), src.data(), dim * sizeof(float)) != 0) {
                        check(false, "instance " + std::to_string(t) +
                                         ": single constituent not copied bitwise");
                        return;
                    }
                }
            }
        }
        check(true, "");
    });

    // ---- 9. Renyi efficiency -------------------------------------------
    criterion(9, "Renyi efficiency identities and the {3,1} closed form hold",
              [](CheckFn check) {
        const std::vector<int64_t> flat = {5, 5, 5, 5};
        check(metrics::renyi_efficiency(flat, 4, 2.5) == 1.0,
              "uniform over the full vocabulary must give exactly 1.0");
        const std::vector<int64_t> point = {42};
        check(metrics::renyi_efficiency(point, 2, 2.5) == 0.0,
              "a point mass must give exactly 0.0");
        const std::vector<int64_t> skew = {3, 1};
        double got = metrics::renyi_efficiency(skew, 2, 2.5);
        check(std::fabs(got - 0.6319) <= 1e-4,
              "counts {3,1}, |V|=2, alpha=2.5: got " + fmt(got) + ", want 0.6319");
        // closed form: H_a = ln(sum p^a) / (1-a), efficiency = H_a / ln |V|
        double p1 = 0.75, p2 = 0.25, a = 2.5;
        double h = std::log(std::pow(p1, a) + std::pow(p2, a)) / (1.0 - a);
        check(std::fabs(got - h / std::log(2.0)) <= 1e-12,
              "implementation drifts from the closed form");
    });

    // ---- 10. determinism across thread counts ---------------------------
    criterion(10, "thread counts 1 and 8 produce byte-identical artifacts",
              [&](CheckFn check) {
        check(have_runs, "pipeline runs unavailable");
        if (!have_runs)
            return;
        pipeline::RunConfig cfg1 = exp_cfg;
        cfg1.out_dir = tmp.file("threads1");
        pipeline::RunConfig cfg8 = exp_cfg;
        cfg8.out_dir = tmp.file("threads8");

        omp_set_num_threads(1);
        pipeline::RunResult r1 = pipeline::run(cfg1);
        pipeline::report(cfg1, r1);
        omp_set_num_threads(8);
        pipeline::RunResult r8 = pipeline::run(cfg8);
        pipeline::report(cfg8, r8);

        check(r1.run_key == r8.run_key, "run keys differ across thread counts");
        std::map<std::string, std::string> a = dir_bytes(cfg1.out_dir);
        std::map<std::string, std::string> b = dir_bytes(cfg8.out_dir);
        check(a.size() == b.size(), "artifact file sets differ in size");
        for (const auto& [rel, bytes] : a) {
            auto it = b.find(rel);
            if (it == b.end()) {
                check(false, "missing in 8-thread run: " + rel);
                return;
            }
            if (it->second != bytes) {
                check(false, "bytes differ: " + rel);
                return;
            }
        }
        check(!a.empty(), "no artifacts were produced");
    });

    if (g_failures == 0) {
        std::printf("all 10 criteria passed\n");
        return 0;
    }
    std::printf("%d of 10 criteria FAILED\n", g_failures);
    return 1;
}
