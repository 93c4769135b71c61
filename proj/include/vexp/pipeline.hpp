#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vexp/corpus.hpp"
#include "vexp/metrics.hpp"
#include "vexp/schedule.hpp"
#include "vexp/vocab.hpp"

namespace vexp::pipeline {

// Base vocabulary: either a file to load or a size to train to on the stage-0
// corpus. target_size 0 means alphabet only (plus byte fallback).
struct BaseSource {
    std::string path;
    uint64_t train_target = 0;
};

struct RunConfig {
    // One corpus file per language class; empty string = class absent.
    std::array<std::string, kNumLangClasses> corpus_paths{};

    BaseSource base;

    schedule::Strategy strategy = schedule::Strategy::exponential;
    uint64_t budget = 12800;
    uint64_t stages = 16;
    std::vector<uint64_t> explicit_targets; // strategy == explicit_targets only

    // Mixture annealing over stages. use_mixture = false samples every class
    // uniformly by its share of the corpus; required when only one class is
    // present ("mixture": null in the config file).
    bool use_mixture = true;
    double mixture_start = 30.0;
    double mixture_end = 90.0;
    double mixture_constant = 5.0;

    double alpha = 2.5;

    // Stage corpus size in words. One entry broadcasts to all stages.
    std::vector<uint64_t> words_per_stage{1000000};

    std::string out_dir;
    bool restrict_script = true; // learn stage merges inside Arabic-script words only
    int min_pair_count = 2;
    uint64_t seed = 0;
};

// Reads the JSON config file. Structural JSON errors throw DataError;
// semantic problems are left for validate().
RunConfig load_config(const std::string& path);

// Returns every problem found, not just the first. Empty means valid.
std::vector<std::string> validate(const RunConfig& cfg);

struct StageArtifact {
    uint64_t stage = 0; // 1-based
    std::string vocab_path;
    metrics::StageReport stage_report;
    metrics::TokenizerReport tokenizer_report;
    schedule::MixtureRow mixture; // row actually used for sampling
    bool resumed = false;         // artifacts matched on disk, stage skipped
};

struct RunResult {
    std::string base_vocab_path;
    std::vector<StageArtifact> artifacts;
    std::string run_key; // digest of config + corpus, stamps resumability
};

// Executes the staged run under out_dir: stage_01/ ... stage_NN/, each with
// vocab.json, report.json, init_plan.jsonl and a stamp file. Stages whose
// stamp matches the current run_key are loaded instead of recomputed.
RunResult run(const RunConfig& cfg);

// Aggregates artifacts into out_dir/summary.json, stage_reports.csv and
// schedule.csv. The summary includes the sequence-length reduction factor
// (base-vocabulary tokens / final tokens on the Arabic slice).
std::string report(const RunConfig& cfg, const RunResult& result);

} // namespace vexp::pipeline
