// Wall-clock comparison of the library kernels against the serial naive
// reference on a synthetic Arabic corpus. Outputs are cross-checked first,
// so a fast-but-wrong kernel fails loudly instead of winning.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "naive_bpe.hpp"
#include "support.hpp"
#include "vexp/bpe.hpp"
#include "vexp/corpus.hpp"
#include "vexp/metrics.hpp"
#include "vexp/vocab.hpp"

using namespace vexp;

namespace {

template <typename F>
double time_ms(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void row(const char* name, double lib_ms, double ref_ms) {
    std::printf("%-18s %9.1f ms %12.1f ms %8.1fx\n", name, lib_ms, ref_ms,
                ref_ms / (lib_ms > 0 ? lib_ms : 1e-9));
}

} // namespace

int main(int argc, char** argv) {
    size_t n_words = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 60000;
    size_t n_merges = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 200;

    std::string text = testsup::synthetic_arabic(5, n_words);
    WordStream stream = segment_words(normalize(text));
    bpe::WordTable table = bpe::WordTable::build(stream);
    std::vector<std::string> words;
    words.reserve(table.words.size());
    for (std::string_view w : table.words)
        words.emplace_back(w);

    std::printf("corpus: %zu words (%zu unique), %zu merges, %d threads\n",
                stream.word_count(), words.size(), n_merges, omp_get_max_threads());
    std::printf("%-18s %12s %15s %9s\n", "kernel", "library", "reference", "speedup");

    uint64_t target = bpe::alphabet_size(stream) + n_merges;
    bpe::TrainResult lib_train;
    reference::NaiveVocab ref_train;
    double t_lib_train = time_ms([&] { lib_train = bpe::train_base(stream, target); });
    double t_ref_train =
        time_ms([&] { ref_train = reference::naive_train(words, table.counts, n_merges); });

    const Vocabulary& v = lib_train.vocab;
    if (v.merges().size() != ref_train.merges.size()) {
        std::fprintf(stderr, "mismatch: %zu vs %zu merges\n", v.merges().size(),
                     ref_train.merges.size());
        return 1;
    }
    for (size_t r = 0; r < ref_train.merges.size(); ++r) {
        const MergeRule& m = v.merges()[r];
        if (m.left != ref_train.merges[r][0] || m.right != ref_train.merges[r][1]) {
            std::fprintf(stderr, "mismatch: merge rank %zu differs\n", r);
            return 1;
        }
    }
    row("train", t_lib_train, t_ref_train);

    std::vector<std::vector<TokenId>> lib_tok;
    std::vector<std::vector<uint32_t>> ref_tok;
    double t_lib_tok = time_ms([&] { lib_tok = bpe::tokenize_table(v, table); });
    double t_ref_tok = time_ms([&] {
        ref_tok.reserve(words.size());
        for (const std::string& w : words)
            ref_tok.push_back(reference::naive_tokenize(ref_train, w));
    });
    for (size_t i = 0; i < words.size(); ++i)
        if (lib_tok[i] != ref_tok[i]) {
            std::fprintf(stderr, "mismatch: token stream differs on word %zu\n", i);
            return 1;
        }
    row("tokenize", t_lib_tok, t_ref_tok);

    bpe::PairStats lib_pairs;
    std::map<std::pair<uint32_t, uint32_t>, int64_t> ref_pairs;
    double t_lib_pairs = time_ms([&] { lib_pairs = bpe::pair_frequencies(v, stream); });
    double t_ref_pairs = time_ms(
        [&] { ref_pairs = reference::naive_pair_counts(ref_train, words, table.counts); });
    for (const auto& [pair, count] : ref_pairs)
        if (lib_pairs.at(pair.first, pair.second) != count) {
            std::fprintf(stderr, "mismatch: pair count differs\n");
            return 1;
        }
    row("pair counts", t_lib_pairs, t_ref_pairs);

    std::printf("outputs cross-checked: identical\n");
    return 0;
}
