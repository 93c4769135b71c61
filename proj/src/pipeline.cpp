#include "vexp/pipeline.hpp"

#include <omp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "vexp/bpe.hpp"
#include "vexp/corpus_io.hpp"
#include "vexp/digest.hpp"
#include "vexp/embed_init.hpp"
#include "vexp/errors.hpp"
#include "vexp/rng.hpp"

namespace vexp::pipeline {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failed on " + path);
    return data;
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out.write(text.data(), std::streamsize(text.size()));
    if (!out)
        throw IoError("write failed on " + path);
}

void require_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                  const char* where) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (key == k)
                known = true;
        if (!known)
            throw InvalidArgument(std::string("unknown config key \"") + key + "\" in " + where);
    }
}

// The identity of a run: every knob that changes artifacts, plus the corpus
// and base-vocabulary content digests. out_dir and file paths stay out so
// artifact bytes do not depend on where they are written.
std::string run_identity(const RunConfig& cfg, const std::string& corpora_digest,
                         const std::string& base_digest) {
    ordered_json j;
    j["strategy"] = schedule::strategy_name(cfg.strategy);
    j["budget"] = cfg.budget;
    j["stages"] = cfg.stages;
    j["explicit_targets"] = cfg.explicit_targets;
    if (cfg.use_mixture) {
        j["mixture"] = {{"start_pct", cfg.mixture_start},
                        {"end_pct", cfg.mixture_end},
                        {"constant_pct", cfg.mixture_constant}};
    } else {
        j["mixture"] = nullptr;
    }
    j["alpha"] = cfg.alpha;
    j["words_per_stage"] = cfg.words_per_stage;
    j["restrict_script"] = cfg.restrict_script;
    j["min_pair_count"] = cfg.min_pair_count;
    j["seed"] = cfg.seed;
    j["base_train_target"] = cfg.base.train_target;
    return sha256_hex(j.dump() + "\x1f" + corpora_digest + "\x1f" + base_digest);
}

bool stamp_matches(const fs::path& stamp_path, const std::string& run_key) {
    std::ifstream in(stamp_path);
    if (!in)
        return false;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ordered_json j = ordered_json::parse(text, nullptr, false);
    return j.is_object() && j.contains("run_key") && j["run_key"].is_string() &&
           j["run_key"].get<std::string>() == run_key;
}

void write_stamp(const fs::path& stamp_path, const std::string& run_key) {
    ordered_json j;
    j["run_key"] = run_key;
    write_text_file(stamp_path.string(), j.dump(2, ' ', true) + "\n");
}

ordered_json mixture_to_json(const schedule::MixtureRow& row) {
    ordered_json j;
    j["arabic_pct"] = row.arabic_pct;
    j["english_pct"] = row.english_pct;
    j["math_code_pct"] = row.math_code_pct;
    return j;
}

ordered_json stage_report_to_json(const StageArtifact& a) {
    ordered_json j;
    j["stage"] = a.stage;
    j["mixture"] = mixture_to_json(a.mixture);
    auto& s = j["stage_report"];
    s["vocab_size"] = a.stage_report.vocab_size;
    s["cumulative_new"] = a.stage_report.cumulative_new;
    s["compression_ratio"] = a.stage_report.compression_ratio;
    s["oov_ratio_stage_slice"] = a.stage_report.oov_ratio_stage_slice;
    s["oov_ratio_full_corpus"] = a.stage_report.oov_ratio_full_corpus;
    auto& t = j["tokenizer_report"];
    t["total_words"] = a.tokenizer_report.total_words;
    t["total_tokens"] = a.tokenizer_report.total_tokens;
    t["fertility"] = a.tokenizer_report.fertility;
    t["unbroken_ratio"] = a.tokenizer_report.unbroken_ratio;
    t["renyi_efficiency"] = a.tokenizer_report.renyi_efficiency;
    t["compression_ratio"] = a.tokenizer_report.compression_ratio;
    t["alpha"] = a.tokenizer_report.alpha;
    return j;
}

StageArtifact stage_report_from_json(const std::string& text, const std::string& vocab_path) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw DataError("malformed stage report under " + vocab_path);
    try {
    StageArtifact a;
    a.stage = j.at("stage").get<uint64_t>();
    const auto& m = j.at("mixture");
    a.mixture.arabic_pct = m.at("arabic_pct").get<double>();
    a.mixture.english_pct = m.at("english_pct").get<double>();
    a.mixture.math_code_pct = m.at("math_code_pct").get<double>();
    const auto& s = j.at("stage_report");
    a.stage_report.stage = uint32_t(a.stage);
    a.stage_report.vocab_size = s.at("vocab_size").get<uint64_t>();
    a.stage_report.cumulative_new = s.at("cumulative_new").get<uint64_t>();
    a.stage_report.compression_ratio = s.at("compression_ratio").get<double>();
    a.stage_report.oov_ratio_stage_slice = s.at("oov_ratio_stage_slice").get<double>();
    a.stage_report.oov_ratio_full_corpus = s.at("oov_ratio_full_corpus").get<double>();
    const auto& t = j.at("tokenizer_report");
    a.tokenizer_report.total_words = t.at("total_words").get<int64_t>();
    a.tokenizer_report.total_tokens = t.at("total_tokens").get<int64_t>();
    a.tokenizer_report.fertility = t.at("fertility").get<double>();
    a.tokenizer_report.unbroken_ratio = t.at("unbroken_ratio").get<double>();
    a.tokenizer_report.renyi_efficiency = t.at("renyi_efficiency").get<double>();
    a.tokenizer_report.compression_ratio = t.at("compression_ratio").get<double>();
    a.tokenizer_report.alpha = t.at("alpha").get<double>();
    a.vocab_path = vocab_path;
    a.resumed = true;
    return a;
    } catch (const ordered_json::exception& e) {
        throw DataError("malformed stage report under " + vocab_path + ": " + e.what());
    }
}

std::string stage_dir_name(uint32_t stage) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "stage_%02u", stage);
    return buf;
}

// One language class's documents, normalized once up front.
struct ClassData {
    std::vector<std::string> ids;
    std::vector<NormalizedText> norm;
    std::vector<int64_t> words;
    int64_t total_words = 0;
};

ClassData prepare_class(std::vector<Document>&& docs) {
    ClassData cd;
    cd.ids.reserve(docs.size());
    cd.norm.resize(docs.size());
    cd.words.resize(docs.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (size_t i = 0; i < docs.size(); ++i) {
        cd.norm[i] = normalize(docs[i].text);
        WordStream s = segment_words(cd.norm[i]);
        cd.words[i] = int64_t(s.word_count());
    }
    for (auto& d : docs)
        cd.ids.push_back(std::move(d.id));
    for (int64_t w : cd.words)
        cd.total_words += w;
    return cd;
}

} // namespace

RunConfig load_config(const std::string& path) {
    std::string text = read_text_file(path);
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw InvalidArgument("config file " + path + " is not a JSON object");
    require_keys(j,
                 {"corpus", "base", "strategy", "budget", "stages", "explicit_targets",
                  "mixture", "alpha", "words_per_stage", "out_dir", "restrict_script",
                  "min_pair_count", "seed"},
                 "the top level");

    RunConfig cfg;
    try {
        if (j.contains("corpus")) {
            const auto& c = j["corpus"];
            if (!c.is_object())
                throw InvalidArgument("\"corpus\" must map lang tags to paths");
            require_keys(c, {"ar", "en", "mc", "other"}, "\"corpus\"");
            for (const auto& [tag, value] : c.items()) {
                if (value.is_null())
                    continue;
                cfg.corpus_paths[size_t(lang_class_from_tag(tag))] = value.get<std::string>();
            }
        }
        if (j.contains("base")) {
            const auto& b = j["base"];
            if (!b.is_object())
                throw InvalidArgument("\"base\" must be an object");
            require_keys(b, {"path", "train_target"}, "\"base\"");
            if (b.contains("path") && !b["path"].is_null())
                cfg.base.path = b["path"].get<std::string>();
            if (b.contains("train_target"))
                cfg.base.train_target = b["train_target"].get<uint64_t>();
        }
        if (j.contains("strategy"))
            cfg.strategy = schedule::strategy_from_name(j["strategy"].get<std::string>());
        if (j.contains("budget"))
            cfg.budget = j["budget"].get<uint64_t>();
        if (j.contains("stages"))
            cfg.stages = j["stages"].get<uint64_t>();
        if (j.contains("explicit_targets"))
            cfg.explicit_targets = j["explicit_targets"].get<std::vector<uint64_t>>();
        if (j.contains("mixture")) {
            const auto& m = j["mixture"];
            if (m.is_null()) {
                cfg.use_mixture = false;
            } else {
                if (!m.is_object())
                    throw InvalidArgument("\"mixture\" must be an object or null");
                require_keys(m, {"start_pct", "end_pct", "constant_pct"}, "\"mixture\"");
                if (m.contains("start_pct"))
                    cfg.mixture_start = m["start_pct"].get<double>();
                if (m.contains("end_pct"))
                    cfg.mixture_end = m["end_pct"].get<double>();
                if (m.contains("constant_pct"))
                    cfg.mixture_constant = m["constant_pct"].get<double>();
            }
        }
        if (j.contains("alpha"))
            cfg.alpha = j["alpha"].get<double>();
        if (j.contains("words_per_stage")) {
            const auto& w = j["words_per_stage"];
            if (w.is_array())
                cfg.words_per_stage = w.get<std::vector<uint64_t>>();
            else
                cfg.words_per_stage = {w.get<uint64_t>()};
        }
        if (j.contains("out_dir"))
            cfg.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("restrict_script"))
            cfg.restrict_script = j["restrict_script"].get<bool>();
        if (j.contains("min_pair_count"))
            cfg.min_pair_count = j["min_pair_count"].get<int>();
        if (j.contains("seed"))
            cfg.seed = j["seed"].get<uint64_t>();
    } catch (const ordered_json::exception& e) {
        throw InvalidArgument("config file " + path + ": " + e.what());
    }
    return cfg;
}

std::vector<std::string> validate(const RunConfig& cfg) {
    std::vector<std::string> errs;
    auto err = [&](std::string msg) { errs.push_back(std::move(msg)); };

    if (cfg.stages < 2)
        err("stages must be >= 2 (got " + std::to_string(cfg.stages) + ")");
    if (cfg.budget < 1)
        err("budget must be >= 1");

    if (cfg.strategy == schedule::Strategy::explicit_targets) {
        if (cfg.explicit_targets.size() != cfg.stages)
            err("explicit_targets must list exactly one cumulative count per stage");
        else {
            if (cfg.explicit_targets.front() != 0)
                err("explicit_targets must start at 0");
            for (size_t i = 1; i < cfg.explicit_targets.size(); ++i)
                if (cfg.explicit_targets[i] < cfg.explicit_targets[i - 1]) {
                    err("explicit_targets must be non-decreasing");
                    break;
                }
        }
    } else if (!cfg.explicit_targets.empty()) {
        err("explicit_targets given but strategy is not \"explicit\"");
    }

    bool any_corpus = false;
    for (size_t k = 0; k < kNumLangClasses; ++k) {
        const std::string& path = cfg.corpus_paths[k];
        if (path.empty())
            continue;
        any_corpus = true;
        if (!fs::exists(path))
            err("corpus file for " + std::string(lang_class_name(LangClass(k))) +
                " does not exist: " + path);
    }
    if (!any_corpus)
        err("no corpus files configured");

    if (!cfg.base.path.empty()) {
        if (!fs::exists(cfg.base.path))
            err("base vocabulary file does not exist: " + cfg.base.path);
        if (cfg.base.train_target != 0)
            err("base path and base train_target are mutually exclusive");
    }

    if (cfg.use_mixture) {
        if (!(cfg.mixture_start >= 0) || !(cfg.mixture_start < cfg.mixture_end))
            err("mixture needs 0 <= start_pct < end_pct");
        if (!(cfg.mixture_end + cfg.mixture_constant <= 100) || cfg.mixture_constant < 0)
            err("mixture needs end_pct + constant_pct <= 100 and constant_pct >= 0");
        if (cfg.corpus_paths[size_t(LangClass::arabic)].empty() ||
            cfg.corpus_paths[size_t(LangClass::english)].empty())
            err("mixture annealing needs both arabic and english corpora");
    }

    if (!(cfg.alpha > 0) || cfg.alpha == 1.0)
        err("alpha must be positive and != 1");

    if (cfg.words_per_stage.size() != 1 && cfg.words_per_stage.size() != cfg.stages)
        err("words_per_stage must hold one value or one per stage");
    for (uint64_t w : cfg.words_per_stage)
        if (w < 1) {
            err("words_per_stage values must be >= 1");
            break;
        }

    if (cfg.out_dir.empty())
        err("out_dir is required");
    if (cfg.min_pair_count < 1)
        err("min_pair_count must be >= 1");
    return errs;
}

RunResult run(const RunConfig& cfg) {
    if (auto errs = validate(cfg); !errs.empty()) {
        std::string joined = "invalid config:";
        for (const auto& e : errs)
            joined += "\n  - " + e;
        throw InvalidArgument(joined);
    }

    // Ingest and normalize every class once.
    std::array<ClassData, kNumLangClasses> classes;
    Sha256 corpora_hash;
    for (size_t k = 0; k < kNumLangClasses; ++k) {
        if (cfg.corpus_paths[k].empty())
            continue;
        std::vector<Document> docs = read_corpus(cfg.corpus_paths[k]);
        corpora_hash.update(lang_class_tag(LangClass(k)));
        corpora_hash.update(corpus_digest(docs));
        classes[k] = prepare_class(std::move(docs));
    }
    std::string corpora_digest = corpora_hash.hex();

    std::string base_digest;
    if (!cfg.base.path.empty())
        base_digest = sha256_hex(read_text_file(cfg.base.path));
    std::string run_key = run_identity(cfg, corpora_digest, base_digest);

    fs::create_directories(cfg.out_dir);
    fs::path out(cfg.out_dir);

    // The pooled stream (class order, file order) backs base training, the
    // whole-corpus OOV slice, and alphabet coverage for every stage.
    WordStream full_stream;
    for (const auto& cd : classes)
        for (const auto& n : cd.norm)
            full_stream.append(n);

    fs::path base_dir = out / "base";
    fs::create_directories(base_dir);
    std::string base_vocab_path = (base_dir / "vocab.json").string();
    Vocabulary base;
    if (!cfg.base.path.empty()) {
        base = Vocabulary::load(cfg.base.path);
        base.save(base_vocab_path);
        write_stamp(base_dir / "stamp.json", run_key);
    } else if (stamp_matches(base_dir / "stamp.json", run_key) &&
               fs::exists(base_vocab_path)) {
        base = Vocabulary::load(base_vocab_path);
    } else {
        uint64_t target = std::max(cfg.base.train_target, bpe::alphabet_size(full_stream));
        bpe::TrainOptions topt;
        topt.min_pair_count = cfg.min_pair_count;
        bpe::TrainResult tr = bpe::train_base(full_stream, target, topt);
        if (!tr.reached_target)
            std::fprintf(stderr, "warning: base training ran out of pairs before %llu tokens\n",
                         (unsigned long long)target);
        base = std::move(tr.vocab);
        base.stage_targets = {base.size()};
        base.corpus_digest = corpora_digest;
        base.save(base_vocab_path);
        write_stamp(base_dir / "stamp.json", run_key);
    }

    // Per-stage cumulative targets and sampling percentages.
    schedule::ExpansionSchedule exp;
    switch (cfg.strategy) {
    case schedule::Strategy::uniform:
        exp = schedule::uniform_schedule(cfg.budget, uint32_t(cfg.stages));
        break;
    case schedule::Strategy::exponential:
        exp = schedule::exponential_schedule(cfg.budget, uint32_t(cfg.stages));
        break;
    case schedule::Strategy::explicit_targets:
        exp = schedule::explicit_schedule(cfg.explicit_targets);
        break;
    }

    std::vector<schedule::MixtureRow> rows;
    std::array<double, kNumLangClasses> share{};
    if (cfg.use_mixture) {
        rows = schedule::mixture_schedule(uint32_t(cfg.stages), cfg.mixture_start,
                                          cfg.mixture_end, cfg.mixture_constant)
                   .rows;
    } else {
        // No annealing: every stage samples each class by its share of the
        // corpus, so single-class corpora run unchanged.
        int64_t total = 0;
        for (const auto& cd : classes)
            total += cd.total_words;
        for (size_t k = 0; k < kNumLangClasses; ++k)
            share[k] = total > 0 ? 100.0 * double(classes[k].total_words) / double(total) : 0.0;
        schedule::MixtureRow flat{share[0], share[1], share[2]};
        rows.assign(cfg.stages, flat);
    }

    RunResult result;
    result.base_vocab_path = base_vocab_path;
    result.run_key = run_key;

    Vocabulary prev = base;
    for (uint32_t stage = 1; stage <= cfg.stages; ++stage) {
        fs::path sdir = out / stage_dir_name(stage);
        fs::create_directories(sdir);
        std::string vocab_path = (sdir / "vocab.json").string();
        std::string report_path = (sdir / "report.json").string();
        std::string plan_path = (sdir / "init_plan.jsonl").string();

        if (stamp_matches(sdir / "stamp.json", run_key) && fs::exists(vocab_path) &&
            fs::exists(report_path) && fs::exists(plan_path)) {
            prev = Vocabulary::load(vocab_path);
            result.artifacts.push_back(
                stage_report_from_json(read_text_file(report_path), vocab_path));
            continue;
        }

        // Compose the stage slice: per-class word targets from the mixture
        // row, documents drawn in seeded shuffle order until the target is
        // crossed (so consumption is within one document of the budget).
        const schedule::MixtureRow& row = rows[stage - 1];
        int64_t budget_words = int64_t(
            cfg.words_per_stage[cfg.words_per_stage.size() == 1 ? 0 : stage - 1]);
        WordStream slice;
        Sha256 slice_hash;
        for (size_t k = 0; k < kNumLangClasses; ++k) {
            const ClassData& cd = classes[k];
            if (cd.norm.empty())
                continue;
            double pct = 0;
            switch (LangClass(k)) {
            case LangClass::arabic: pct = row.arabic_pct; break;
            case LangClass::english: pct = row.english_pct; break;
            case LangClass::math_code: pct = row.math_code_pct; break;
            case LangClass::other: pct = cfg.use_mixture ? 0.0 : share[k]; break;
            }
            int64_t target = llround(double(budget_words) * pct / 100.0);
            if (target <= 0)
                continue;
            std::vector<uint32_t> order(cd.norm.size());
            for (uint32_t i = 0; i < order.size(); ++i)
                order[i] = i;
            Rng rng(mix_seed(cfg.seed, uint64_t(stage) * kNumLangClasses + k));
            shuffle(order, rng);
            int64_t got = 0;
            for (uint32_t idx : order) {
                slice.append(cd.norm[idx]);
                slice_hash.update(cd.ids[idx]);
                slice_hash.update(std::string_view("\x1f", 1));
                got += cd.words[idx];
                if (got >= target)
                    break;
            }
            if (got < target)
                std::fprintf(stderr,
                             "warning: stage %u exhausted the %s corpus at %lld of %lld words\n",
                             stage, lang_class_name(LangClass(k)), (long long)got,
                             (long long)target);
        }
        if (slice.word_count() == 0)
            throw DataError("stage " + std::to_string(stage) + " corpus slice is empty");

        uint64_t vocab_target = base.size() + exp.cumulative[stage - 1];
        bpe::TrainOptions topt;
        topt.min_pair_count = cfg.min_pair_count;
        if (cfg.restrict_script)
            topt.restrict_script = WordScript::arabic_script;
        bpe::TrainResult tr = bpe::extend_vocab(prev, slice, vocab_target, stage, topt);
        if (!tr.reached_target)
            std::fprintf(stderr,
                         "warning: stage %u ran out of eligible pairs at %llu of %llu tokens\n",
                         stage, (unsigned long long)tr.vocab.size(),
                         (unsigned long long)vocab_target);
        Vocabulary cur = std::move(tr.vocab);
        cur.stage_targets.push_back(vocab_target);
        cur.corpus_digest = sha256_hex(prev.corpus_digest + "\x1f" + slice_hash.hex());
        cur.save(vocab_path);

        metrics::EvalAccum slice_acc = metrics::accumulate(slice, cur);
        metrics::EvalAccum full_acc = metrics::accumulate(full_stream, cur);

        StageArtifact a;
        a.stage = stage;
        a.vocab_path = vocab_path;
        a.mixture = row;
        a.stage_report.stage = stage;
        a.stage_report.vocab_size = cur.size();
        a.stage_report.cumulative_new = cur.size() - base.size();
        a.stage_report.compression_ratio =
            metrics::compression_ratio(slice_acc.total_tokens, slice_acc.total_bytes);
        a.stage_report.oov_ratio_stage_slice = slice_acc.new_token_ratio(stage - 1);
        a.stage_report.oov_ratio_full_corpus = full_acc.new_token_ratio(stage - 1);
        a.tokenizer_report = metrics::report_from_accum(full_acc, cur, cfg.alpha,
                                                        metrics::RenyiDenominator::full_vocab);

        embed::InitPlan plan = embed::make_plan(prev, cur, &base);
        embed::save_plan(plan_path, plan);
        write_text_file(report_path, stage_report_to_json(a).dump(2, ' ', true) + "\n");
        write_stamp(sdir / "stamp.json", run_key);

        result.artifacts.push_back(std::move(a));
        prev = std::move(cur);
    }
    return result;
}

std::string report(const RunConfig& cfg, const RunResult& result) {
    if (result.artifacts.empty())
        throw InvalidArgument("report needs at least one stage artifact");

    // Sequence-length reduction against the base vocabulary, measured on the
    // Arabic slice (whole corpus when no Arabic data is configured).
    const std::string& ar_path = cfg.corpus_paths[size_t(LangClass::arabic)];
    WordStream eval_stream;
    {
        std::vector<Document> docs;
        if (!ar_path.empty()) {
            docs = read_corpus(ar_path);
        } else {
            for (const auto& path : cfg.corpus_paths)
                if (!path.empty()) {
                    std::vector<Document> d = read_corpus(path);
                    docs.insert(docs.end(), std::make_move_iterator(d.begin()),
                                std::make_move_iterator(d.end()));
                }
        }
        eval_stream = build_word_stream(docs);
    }

    Vocabulary base = Vocabulary::load(result.base_vocab_path);
    Vocabulary final_v = Vocabulary::load(result.artifacts.back().vocab_path);
    metrics::EvalAccum base_acc = metrics::accumulate(eval_stream, base);
    metrics::EvalAccum final_acc = metrics::accumulate(eval_stream, final_v);
    if (final_acc.total_tokens == 0)
        throw UndefinedMetric("reduction factor is undefined on an empty evaluation corpus");
    double reduction = double(base_acc.total_tokens) / double(final_acc.total_tokens);

    ordered_json summary;
    summary["run_key"] = result.run_key;
    summary["strategy"] = schedule::strategy_name(cfg.strategy);
    summary["stages"] = cfg.stages;
    summary["budget"] = cfg.budget;
    summary["base_vocab_size"] = base.size();
    summary["final_vocab_size"] = final_v.size();
    summary["sequence_length_reduction"] = reduction;
    auto& arr = summary["per_stage"] = ordered_json::array();
    std::vector<metrics::StageReport> reports;
    for (const StageArtifact& a : result.artifacts) {
        arr.push_back(stage_report_to_json(a));
        reports.push_back(a.stage_report);
    }
    std::string summary_text = summary.dump(2, ' ', true) + "\n";

    fs::path out(cfg.out_dir);
    write_text_file((out / "summary.json").string(), summary_text);
    write_text_file((out / "stage_reports.csv").string(),
                    metrics::stage_report_csv(reports, false));
    write_text_file((out / "stage_reports_full.csv").string(),
                    metrics::stage_report_csv(reports, true));

    if (result.artifacts.size() == cfg.stages) {
        schedule::ExpansionSchedule exp;
        switch (cfg.strategy) {
        case schedule::Strategy::uniform:
            exp = schedule::uniform_schedule(cfg.budget, uint32_t(cfg.stages));
            break;
        case schedule::Strategy::exponential:
            exp = schedule::exponential_schedule(cfg.budget, uint32_t(cfg.stages));
            break;
        case schedule::Strategy::explicit_targets:
            exp = schedule::explicit_schedule(cfg.explicit_targets);
            break;
        }
        schedule::MixturePlan mix;
        mix.stages = uint32_t(result.artifacts.size());
        for (const StageArtifact& a : result.artifacts)
            mix.rows.push_back(a.mixture);
        int64_t per_stage = int64_t(cfg.words_per_stage.front());
        write_text_file((out / "schedule.csv").string(),
                        schedule::schedule_csv(
                            schedule::stage_plans(exp, mix, base.size(), per_stage)));
    }
    return summary_text;
}

} // namespace vexp::pipeline
