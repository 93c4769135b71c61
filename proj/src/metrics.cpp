#include "vexp/metrics.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "vexp/errors.hpp"

namespace vexp::metrics {

double fertility(int64_t total_tokens, int64_t total_words) {
    if (total_words <= 0)
        throw UndefinedMetric("fertility is undefined for zero words");
    return double(total_tokens) / double(total_words);
}

double compression_ratio(int64_t total_tokens, int64_t total_bytes) {
    if (total_bytes <= 0)
        throw UndefinedMetric("compression ratio is undefined for zero bytes");
    return double(total_tokens) / double(total_bytes);
}

double renyi_efficiency(std::span<const int64_t> counts, uint64_t vocab_size, double alpha) {
    if (!(alpha > 0) || alpha == 1.0)
        throw InvalidArgument("Renyi order must be positive and != 1");

    int64_t total = 0;
    uint64_t support = 0;
    int64_t max_count = 0, min_count = 0;
    for (int64_t c : counts) {
        if (c <= 0)
            continue;
        total += c;
        if (support == 0)
            min_count = max_count = c;
        min_count = std::min(min_count, c);
        max_count = std::max(max_count, c);
        ++support;
    }
    if (support == 0)
        throw UndefinedMetric("Renyi efficiency is undefined without token occurrences");
    if (vocab_size < support)
        throw InvalidArgument("vocab_size smaller than the observed token support");

    // Exact identities, kept out of floating arithmetic: a point mass has
    // zero entropy; a uniform distribution over the whole vocabulary has
    // entropy ln(vocab_size).
    if (support == 1)
        return 0.0;
    if (min_count == max_count && support == vocab_size)
        return 1.0;

    double sum = 0.0;
    for (int64_t c : counts)
        if (c > 0)
            sum += std::pow(double(c) / double(total), alpha);
    double entropy = std::log(sum) / (1.0 - alpha);
    double eff = entropy / std::log(double(vocab_size));
    return std::clamp(eff, 0.0, 1.0);
}

double renyi_efficiency(const std::unordered_map<TokenId, int64_t>& counts,
                        uint64_t vocab_size, double alpha) {
    std::vector<int64_t> flat;
    flat.reserve(counts.size());
    for (const auto& [id, c] : counts)
        flat.push_back(c);
    return renyi_efficiency(flat, vocab_size, alpha);
}

double EvalAccum::new_token_ratio(uint32_t prev_stage) const {
    if (total_tokens == 0)
        throw UndefinedMetric("new-token ratio is undefined on an empty corpus");
    int64_t fresh = 0;
    for (size_t s = prev_stage + 1; s < occurrence_by_stage.size(); ++s)
        fresh += occurrence_by_stage[s];
    return double(fresh) / double(total_tokens);
}

EvalAccum accumulate(const WordStream& corpus, const Vocabulary& v) {
    EvalAccum a;
    a.total_words = int64_t(corpus.word_count());
    a.total_bytes = corpus.total_bytes();
    a.token_counts.assign(v.size(), 0);
    a.occurrence_by_stage.assign(size_t(v.max_stage()) + 1, 0);

    bpe::WordTable table = bpe::WordTable::build(corpus);
    std::vector<std::vector<TokenId>> toks = bpe::tokenize_table(v, table);

#pragma omp parallel
    {
        int64_t tokens = 0, unbroken = 0;
        std::vector<int64_t> counts(v.size(), 0);
#pragma omp for schedule(static) nowait
        for (size_t i = 0; i < toks.size(); ++i) {
            int64_t c = table.counts[i];
            tokens += c * int64_t(toks[i].size());
            if (toks[i].size() == 1)
                unbroken += c;
            for (TokenId id : toks[i])
                counts[id] += c;
        }
#pragma omp critical
        {
            a.total_tokens += tokens;
            a.unbroken_words += unbroken;
            for (size_t id = 0; id < counts.size(); ++id)
                a.token_counts[id] += counts[id];
        }
    }

    for (size_t id = 0; id < a.token_counts.size(); ++id)
        a.occurrence_by_stage[v.stage_tag(TokenId(id))] += a.token_counts[id];
    return a;
}

double unbroken_ratio(const WordStream& corpus, const Vocabulary& v) {
    EvalAccum a = accumulate(corpus, v);
    if (a.total_words == 0)
        throw UndefinedMetric("unbroken ratio is undefined on an empty corpus");
    return double(a.unbroken_words) / double(a.total_words);
}

double new_token_occurrence_ratio(const Vocabulary& v_curr, uint32_t prev_stage,
                                  const WordStream& corpus) {
    return accumulate(corpus, v_curr).new_token_ratio(prev_stage);
}

TokenizerReport report_from_accum(const EvalAccum& a, const Vocabulary& v, double alpha,
                                  RenyiDenominator denom) {
    TokenizerReport r;
    r.total_words = a.total_words;
    r.total_tokens = a.total_tokens;
    r.alpha = alpha;
    r.fertility = fertility(a.total_tokens, a.total_words);
    r.unbroken_ratio = double(a.unbroken_words) / double(a.total_words);
    uint64_t denom_size = v.size();
    if (denom == RenyiDenominator::observed_support) {
        denom_size = 0;
        for (int64_t c : a.token_counts)
            if (c > 0)
                ++denom_size;
    }
    r.renyi_efficiency = renyi_efficiency(a.token_counts, denom_size, alpha);
    r.compression_ratio = compression_ratio(a.total_tokens, a.total_bytes);
    return r;
}

TokenizerReport evaluate(const WordStream& corpus, const Vocabulary& v, double alpha,
                         RenyiDenominator denom) {
    return report_from_accum(accumulate(corpus, v), v, alpha, denom);
}

std::string report_json_line(const TokenizerReport& r, const std::string& vocab_path) {
    char buf[256];
    std::string out = "{\"vocab\": " + nlohmann::json(vocab_path).dump();
    std::snprintf(buf, sizeof buf,
                  ", \"total_words\": %lld, \"total_tokens\": %lld, \"fertility\": %.4f"
                  ", \"unbroken_ratio\": %.4f, \"renyi_efficiency\": %.4f"
                  ", \"compression_ratio\": %.4f, \"alpha\": %g}",
                  (long long)r.total_words, (long long)r.total_tokens, r.fertility,
                  r.unbroken_ratio, r.renyi_efficiency, r.compression_ratio, r.alpha);
    return out + buf;
}

std::string stage_report_csv(std::span<const StageReport> reports, bool full_corpus_slice) {
    std::string out = "stage,cumulative_new,compress_ratio,oov_ratio\n";
    char line[128];
    for (const StageReport& r : reports) {
        double oov = full_corpus_slice ? r.oov_ratio_full_corpus : r.oov_ratio_stage_slice;
        std::snprintf(line, sizeof line, "%u,%llu,%.4f,%.4f\n", r.stage,
                      (unsigned long long)r.cumulative_new, r.compression_ratio, oov);
        out += line;
    }
    return out;
}

} // namespace vexp::metrics
