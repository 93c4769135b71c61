#pragma once

// Deliberately slow single-threaded reference implementations, kept apart
// from the library so tests and the benchmark can cross-check the fast
// kernels against from-scratch recomputation. Same contract, different
// mechanism: no where-lists, no incremental counts, no heap.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vexp::reference {

struct NaiveVocab {
    std::vector<std::string> surfaces;              // id -> surface
    std::vector<std::array<uint32_t, 3>> merges;    // (left, right, result) in rank order
    uint32_t base_size = 0;
};

// Same id convention as the library (256 byte tokens, then corpus code
// points sorted, then merges), built here independently.
NaiveVocab naive_alphabet(const std::vector<std::string>& words);

// Classical training loop: recount every adjacent pair from scratch each
// step, pick max by (count desc, left surface, right surface, left id,
// right id), rewrite every word, repeat.
NaiveVocab naive_train(const std::vector<std::string>& words,
                       const std::vector<int64_t>& counts, size_t merge_count,
                       int64_t min_count = 2);

// Continues training from an existing naive vocabulary (reference for the
// staged-extension property).
void naive_extend(NaiveVocab& v, const std::vector<std::string>& words,
                  const std::vector<int64_t>& counts, size_t merge_count,
                  int64_t min_count = 2);

// Rank-order exhaustive application, one full left-to-right scan per rank
// until that rank stops applying.
std::vector<uint32_t> naive_tokenize(const NaiveVocab& v, const std::string& word);

// From-scratch adjacent-pair counts over tokenized words.
std::map<std::pair<uint32_t, uint32_t>, int64_t>
naive_pair_counts(const NaiveVocab& v, const std::vector<std::string>& words,
                  const std::vector<int64_t>& counts);

} // namespace vexp::reference
