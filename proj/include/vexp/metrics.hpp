#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "vexp/bpe.hpp"
#include "vexp/corpus.hpp"
#include "vexp/vocab.hpp"

namespace vexp::metrics {

// tokens per word; throws UndefinedMetric when total_words == 0.
double fertility(int64_t total_tokens, int64_t total_words);

// fraction of words tokenized as exactly one token.
double unbroken_ratio(const WordStream& corpus, const Vocabulary& v);

enum class RenyiDenominator : uint8_t { full_vocab, observed_support };

// H_alpha(p) / ln(vocab_size) clamped to [0,1], p the empirical unigram
// distribution of `counts`. alpha > 0, alpha != 1.
double renyi_efficiency(std::span<const int64_t> counts, uint64_t vocab_size,
                        double alpha);
double renyi_efficiency(const std::unordered_map<TokenId, int64_t>& counts,
                        uint64_t vocab_size, double alpha);

// tokens per UTF-8 byte of normalized text.
double compression_ratio(int64_t total_tokens, int64_t total_bytes);

// Occurrence share of tokens with stage_tag > prev_stage in the corpus
// tokenized under v_curr.
double new_token_occurrence_ratio(const Vocabulary& v_curr, uint32_t prev_stage,
                                  const WordStream& corpus);

struct TokenizerReport {
    int64_t total_words = 0;
    int64_t total_tokens = 0;
    double fertility = 0;
    double unbroken_ratio = 0;
    double renyi_efficiency = 0;
    double compression_ratio = 0;
    double alpha = 0;
};

struct StageReport {
    uint32_t stage = 0;
    uint64_t vocab_size = 0;
    uint64_t cumulative_new = 0;
    double compression_ratio = 0;
    double oov_ratio_stage_slice = 0; // new-token occurrence share, stage slice
    double oov_ratio_full_corpus = 0; // same, measured on the full corpus
};

// One-pass evaluation (parallel over unique words, exact integer
// accumulation, deterministic). occurrence_by_stage[s] counts token
// occurrences whose stage_tag == s, which makes every prev_stage
// new-token ratio derivable from the same pass.
struct EvalAccum {
    int64_t total_words = 0;
    int64_t total_tokens = 0;
    int64_t unbroken_words = 0;
    int64_t total_bytes = 0;
    std::vector<int64_t> token_counts;        // per token id
    std::vector<int64_t> occurrence_by_stage; // per stage tag

    double new_token_ratio(uint32_t prev_stage) const;
};

EvalAccum accumulate(const WordStream& corpus, const Vocabulary& v);

TokenizerReport evaluate(const WordStream& corpus, const Vocabulary& v,
                         double alpha = 2.5,
                         RenyiDenominator denom = RenyiDenominator::full_vocab);

TokenizerReport report_from_accum(const EvalAccum& a, const Vocabulary& v,
                                  double alpha, RenyiDenominator denom);

// One JSON object on a single line, the `evaluate` CLI output format.
std::string report_json_line(const TokenizerReport& r, const std::string& vocab_path);

// CSV with header stage,cumulative_new,compress_ratio,oov_ratio.
std::string stage_report_csv(std::span<const StageReport> reports,
                             bool full_corpus_slice = false);

} // namespace vexp::metrics
