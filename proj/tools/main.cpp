// vexpand: staged subword-vocabulary growth over a multilingual corpus.
// Subcommands operate on JSONL corpora and canonical vocabulary files; `run`
// drives the full staged pipeline from a JSON config.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "vexp/bpe.hpp"
#include "vexp/corpus.hpp"
#include "vexp/corpus_io.hpp"
#include "vexp/digest.hpp"
#include "vexp/embed_init.hpp"
#include "vexp/errors.hpp"
#include "vexp/metrics.hpp"
#include "vexp/pipeline.hpp"
#include "vexp/schedule.hpp"
#include "vexp/vocab.hpp"

namespace {

using namespace vexp;

struct GlobalOpts {
    std::string config;
    std::string out = ".";
    int threads = 0;
    uint64_t seed = 0;
    bool out_set = false;
    bool seed_set = false;
};

struct LoadedCorpus {
    std::vector<Document> docs;
    WordStream stream;
};

LoadedCorpus load_corpora(const std::vector<std::string>& paths) {
    LoadedCorpus c;
    for (const auto& p : paths) {
        std::vector<Document> docs = read_corpus(p);
        c.docs.insert(c.docs.end(), std::make_move_iterator(docs.begin()),
                      std::make_move_iterator(docs.end()));
    }
    c.stream = build_word_stream(c.docs);
    return c;
}

std::string out_path(const GlobalOpts& g, const std::string& explicit_path,
                     const char* default_name) {
    if (!explicit_path.empty())
        return explicit_path;
    std::filesystem::create_directories(g.out);
    return (std::filesystem::path(g.out) / default_name).string();
}

pipeline::RunConfig config_for_run(const GlobalOpts& g) {
    if (g.config.empty())
        throw InvalidArgument("this subcommand needs --config <file>");
    pipeline::RunConfig cfg = pipeline::load_config(g.config);
    if (g.out_set)
        cfg.out_dir = g.out;
    if (g.seed_set)
        cfg.seed = g.seed;
    std::vector<std::string> problems = pipeline::validate(cfg);
    if (!problems.empty()) {
        for (const auto& p : problems)
            std::fprintf(stderr, "config: %s\n", p.c_str());
        throw InvalidArgument("invalid config: " + std::to_string(problems.size()) +
                              " problem(s), see stderr");
    }
    return cfg;
}

void cmd_train_base(const GlobalOpts& g, const std::vector<std::string>& corpora,
                    uint64_t target_size, int min_pair_count, const std::string& output) {
    LoadedCorpus c = load_corpora(corpora);
    bpe::TrainOptions opt;
    opt.min_pair_count = min_pair_count;
    uint64_t target = std::max(target_size, bpe::alphabet_size(c.stream));
    bpe::TrainResult tr = bpe::train_base(c.stream, target, opt);
    if (!tr.reached_target)
        std::fprintf(stderr, "warning: ran out of eligible pairs before %llu tokens\n",
                     (unsigned long long)target);
    tr.vocab.stage_targets = {tr.vocab.size()};
    tr.vocab.corpus_digest = corpus_digest(c.docs);
    std::string path = out_path(g, output, "vocab.json");
    tr.vocab.save(path);
    std::printf("trained %zu tokens (%zu merges) -> %s\n", tr.vocab.size(),
                tr.vocab.merges().size(), path.c_str());
}

void cmd_expand(const GlobalOpts& g, const std::string& vocab_path,
                const std::vector<std::string>& corpora, uint64_t target_size,
                int64_t stage_flag, int min_pair_count, bool restrict_script,
                const std::string& output) {
    Vocabulary base = Vocabulary::load(vocab_path);
    LoadedCorpus c = load_corpora(corpora);
    uint32_t stage = stage_flag >= 0 ? uint32_t(stage_flag) : base.max_stage() + 1;
    bpe::TrainOptions opt;
    opt.min_pair_count = min_pair_count;
    if (restrict_script)
        opt.restrict_script = WordScript::arabic_script;
    bpe::TrainResult tr = bpe::extend_vocab(base, c.stream, target_size, stage, opt);
    if (!tr.reached_target)
        std::fprintf(stderr, "warning: ran out of eligible pairs before %llu tokens\n",
                     (unsigned long long)target_size);
    tr.vocab.stage_targets.push_back(target_size);
    Sha256 chain;
    chain.update(base.corpus_digest);
    chain.update("\x1f");
    chain.update(corpus_digest(c.docs));
    tr.vocab.corpus_digest = chain.hex();
    std::string path = out_path(g, output, "vocab.json");
    tr.vocab.save(path);
    std::printf("extended %u -> %zu tokens (stage %u) -> %s\n",
                unsigned(base.size()), tr.vocab.size(), stage, path.c_str());
}

void cmd_tokenize(const std::string& vocab_path, const std::vector<std::string>& corpora) {
    Vocabulary v = Vocabulary::load(vocab_path);
    for (const auto& p : corpora) {
        for (const Document& d : read_corpus(p)) {
            std::vector<TokenId> ids = bpe::tokenize(v, normalize(d.text));
            nlohmann::ordered_json line;
            line["id"] = d.id;
            line["tokens"] = ids;
            std::cout << line.dump() << "\n";
        }
    }
}

void cmd_evaluate(const std::vector<std::string>& vocabs,
                  const std::vector<std::string>& corpora, double alpha,
                  bool observed_support) {
    metrics::RenyiDenominator denom = observed_support
                                          ? metrics::RenyiDenominator::observed_support
                                          : metrics::RenyiDenominator::full_vocab;
    for (const auto& vp : vocabs) {
        Vocabulary v = Vocabulary::load(vp);
        for (const auto& cp : corpora) {
            LoadedCorpus c = load_corpora({cp});
            metrics::TokenizerReport r = metrics::evaluate(c.stream, v, alpha, denom);
            std::cout << metrics::report_json_line(r, vp) << "\n";
        }
    }
}

void cmd_schedule(const std::string& strategy, uint64_t budget, uint32_t stages,
                  const std::vector<uint64_t>& targets, double mix_start, double mix_end,
                  double mix_constant, uint64_t base_size, int64_t tokens_per_stage) {
    schedule::ExpansionSchedule exp;
    switch (schedule::strategy_from_name(strategy)) {
    case schedule::Strategy::uniform:
        exp = schedule::uniform_schedule(budget, stages);
        break;
    case schedule::Strategy::exponential:
        exp = schedule::exponential_schedule(budget, stages);
        break;
    case schedule::Strategy::explicit_targets:
        exp = schedule::explicit_schedule(targets);
        break;
    }
    schedule::MixturePlan mix =
        schedule::mixture_schedule(exp.stages, mix_start, mix_end, mix_constant);
    std::cout << schedule::schedule_csv(
        schedule::stage_plans(exp, mix, base_size, tokens_per_stage));
}

void cmd_stage_report(const GlobalOpts& g, bool full_corpus) {
    pipeline::RunConfig cfg = config_for_run(g);
    pipeline::RunResult res = pipeline::run(cfg);
    std::vector<metrics::StageReport> reports;
    reports.reserve(res.artifacts.size());
    for (const auto& a : res.artifacts)
        reports.push_back(a.stage_report);
    std::cout << metrics::stage_report_csv(reports, full_corpus);
}

void cmd_init_embeddings(const GlobalOpts& g, const std::string& old_path,
                         const std::string& new_path, const std::string& basis_path,
                         const std::string& matrix_in, const std::string& matrix_out,
                         const std::string& plan_out) {
    Vocabulary old_v = Vocabulary::load(old_path);
    Vocabulary new_v = Vocabulary::load(new_path);
    std::optional<Vocabulary> basis;
    if (!basis_path.empty())
        basis = Vocabulary::load(basis_path);
    embed::InitPlan plan =
        embed::make_plan(old_v, new_v, basis ? &*basis : nullptr);
    std::string plan_path = out_path(g, plan_out, "init_plan.jsonl");
    embed::save_plan(plan_path, plan);
    std::printf("plan: %zu new tokens -> %s\n", plan.entries.size(), plan_path.c_str());
    if (!matrix_in.empty()) {
        embed::EmbeddingMatrix m = embed::load_matrix(matrix_in);
        embed::EmbeddingMatrix grown = embed::apply_plan(m, plan);
        std::string mpath = out_path(g, matrix_out, "embeddings.vexpemb");
        embed::save_matrix(mpath, grown);
        std::printf("matrix: %u x %u -> %u x %u -> %s\n", m.rows, m.dim, grown.rows,
                    grown.dim, mpath.c_str());
    }
}

void cmd_run(const GlobalOpts& g) {
    pipeline::RunConfig cfg = config_for_run(g);
    pipeline::RunResult res = pipeline::run(cfg);
    std::printf("run key: %s\n", res.run_key.c_str());
    std::printf("base vocabulary: %s\n", res.base_vocab_path.c_str());
    for (const auto& a : res.artifacts)
        std::printf("stage %02u: size=%llu new=%llu oov=%.4f compress=%.4f %s%s\n",
                    unsigned(a.stage), (unsigned long long)a.stage_report.vocab_size,
                    (unsigned long long)a.stage_report.cumulative_new,
                    a.stage_report.oov_ratio_stage_slice,
                    a.stage_report.compression_ratio, a.vocab_path.c_str(),
                    a.resumed ? " (resumed)" : "");
}

void cmd_report(const GlobalOpts& g) {
    pipeline::RunConfig cfg = config_for_run(g);
    pipeline::RunResult res = pipeline::run(cfg);
    std::cout << pipeline::report(cfg, res);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"staged subword vocabulary expansion toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config, "JSON run config (run/report/stage-report)");
    auto* out_opt = app.add_option("--out", g.out, "output directory");
    app.add_option("--threads", g.threads, "worker thread count (0 = library default)");
    auto* seed_opt = app.add_option("--seed", g.seed, "sampling seed override");

    // Runs after option binding, before any subcommand callback; parallel
    // regions all start later than this.
    app.parse_complete_callback([&] {
        g.out_set = out_opt->count() > 0;
        g.seed_set = seed_opt->count() > 0;
        if (g.threads > 0)
            omp_set_num_threads(g.threads);
    });

    std::vector<std::string> corpora;
    std::vector<std::string> vocabs;
    std::string vocab_path, output, basis_path, matrix_in, matrix_out, plan_out;
    uint64_t target_size = 0;
    int min_pair_count = 2;
    int64_t stage_flag = -1;
    bool restrict_script = false;
    double alpha = 2.5;
    bool observed_support = false;

    auto* tb = app.add_subcommand("train-base", "train a base vocabulary from corpora");
    tb->add_option("--corpus", corpora, "JSONL corpus file (repeatable)")->required();
    tb->add_option("--target-size", target_size, "vocabulary size (0 = alphabet only)");
    tb->add_option("--min-pair-count", min_pair_count, "minimum pair count to merge");
    tb->add_option("--output", output, "vocabulary file (default <out>/vocab.json)");
    tb->callback([&] { cmd_train_base(g, corpora, target_size, min_pair_count, output); });

    auto* ex = app.add_subcommand("expand", "extend an existing vocabulary");
    ex->add_option("--vocab", vocab_path, "vocabulary to extend")->required();
    ex->add_option("--corpus", corpora, "JSONL corpus file (repeatable)")->required();
    ex->add_option("--target-size", target_size, "target vocabulary size")->required();
    ex->add_option("--stage", stage_flag, "stage tag (default: next stage)");
    ex->add_option("--min-pair-count", min_pair_count, "minimum pair count to merge");
    ex->add_flag("--restrict-script", restrict_script,
                 "learn merges inside Arabic-script words only");
    ex->add_option("--output", output, "vocabulary file (default <out>/vocab.json)");
    ex->callback([&] {
        cmd_expand(g, vocab_path, corpora, target_size, stage_flag, min_pair_count,
                   restrict_script, output);
    });

    auto* tk = app.add_subcommand("tokenize", "tokenize corpora, one JSON line per document");
    tk->add_option("--vocab", vocab_path, "vocabulary file")->required();
    tk->add_option("--corpus", corpora, "JSONL corpus file (repeatable)")->required();
    tk->callback([&] { cmd_tokenize(vocab_path, corpora); });

    auto* ev = app.add_subcommand("evaluate", "tokenizer metrics, one JSON line per pair");
    ev->add_option("--vocab", vocabs, "vocabulary file (repeatable)")->required();
    ev->add_option("--corpus", corpora, "JSONL corpus file (repeatable)")->required();
    ev->add_option("--alpha", alpha, "Renyi order (default 2.5)");
    ev->add_flag("--observed-support", observed_support,
                 "Renyi denominator: observed tokens instead of full vocabulary");
    ev->callback([&] { cmd_evaluate(vocabs, corpora, alpha, observed_support); });

    std::string strategy = "exponential";
    uint64_t budget = 12800;
    uint32_t stages = 16;
    std::vector<uint64_t> explicit_targets;
    double mix_start = 30.0, mix_end = 90.0, mix_constant = 5.0;
    uint64_t base_size = 0;
    int64_t tokens_per_stage = 0;

    auto* sc = app.add_subcommand("schedule", "emit the per-stage expansion plan as CSV");
    sc->add_option("--strategy", strategy, "uniform|exponential|explicit");
    sc->add_option("--budget", budget, "total new tokens");
    sc->add_option("--stages", stages, "stage count");
    sc->add_option("--targets", explicit_targets, "cumulative targets (explicit strategy)");
    sc->add_option("--mix-start", mix_start, "Arabic share at stage 1 (pct)");
    sc->add_option("--mix-end", mix_end, "Arabic share at the final stage (pct)");
    sc->add_option("--mix-constant", mix_constant, "constant math/code share (pct)");
    sc->add_option("--base-size", base_size, "base vocabulary size for targets");
    sc->add_option("--tokens-per-stage", tokens_per_stage, "per-stage token budget");
    sc->callback([&] {
        cmd_schedule(strategy, budget, stages, explicit_targets, mix_start, mix_end,
                     mix_constant, base_size, tokens_per_stage);
    });

    bool full_corpus = false;
    auto* sr = app.add_subcommand("stage-report", "per-stage compression/OOV CSV for a run");
    sr->add_flag("--full-corpus", full_corpus, "OOV over the full corpus, not the stage slice");
    sr->callback([&] { cmd_stage_report(g, full_corpus); });

    std::string old_path, new_path;
    auto* ie = app.add_subcommand("init-embeddings",
                                  "plan (and optionally apply) new-token embedding rows");
    ie->add_option("--old-vocab", old_path, "vocabulary the matrix belongs to")->required();
    ie->add_option("--new-vocab", new_path, "extended vocabulary")->required();
    ie->add_option("--basis-vocab", basis_path, "decomposition basis (default: old vocab)");
    ie->add_option("--matrix", matrix_in, "embedding matrix to grow");
    ie->add_option("--matrix-out", matrix_out, "grown matrix (default <out>/embeddings.vexpemb)");
    ie->add_option("--plan-out", plan_out, "plan file (default <out>/init_plan.jsonl)");
    ie->callback([&] {
        cmd_init_embeddings(g, old_path, new_path, basis_path, matrix_in, matrix_out,
                            plan_out);
    });

    auto* rn = app.add_subcommand("run", "execute the staged pipeline from --config");
    rn->callback([&] { cmd_run(g); });

    auto* rp = app.add_subcommand("report", "summary JSON for a (possibly resumed) run");
    rp->callback([&] { cmd_report(g); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const UndefinedMetric& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const DecodeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
