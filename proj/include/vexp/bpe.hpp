#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vexp/corpus.hpp"
#include "vexp/vocab.hpp"

namespace vexp::bpe {

struct TrainOptions {
    // Pairs occurring fewer times are never merged.
    int64_t min_pair_count = 2;
    // When set, pair statistics are computed only within words of this
    // script class (merge learning restriction; tokenization is unaffected).
    std::optional<WordScript> restrict_script;
};

struct TrainResult {
    Vocabulary vocab;
    // False when eligible pairs ran out before the target size was reached.
    bool reached_target = true;
};

// Alphabet size the trainer would use for this corpus: 256 byte tokens plus
// distinct multi-byte code points.
uint64_t alphabet_size(const WordStream& corpus);

TrainResult train_base(const WordStream& corpus, uint64_t target_size,
                       const TrainOptions& opt = {});

// Pure extension: ids, surfaces and merge ranks of `base` are unchanged; new
// merges carry stage_tag = stage and are chosen by recomputing pair
// statistics over `corpus` tokenized with the evolving vocabulary.
TrainResult extend_vocab(const Vocabulary& base, const WordStream& corpus,
                         uint64_t target_size, uint32_t stage,
                         const TrainOptions& opt = {});

// Tokenizes a single word: character-level units (byte fallback outside the
// alphabet), then merges applied lowest-rank-first, leftmost-first.
std::vector<TokenId> tokenize_word(const Vocabulary& v, std::string_view word);

// Whole normalized text; per-word tokenization, words concatenated in order.
// Separators are re-inserted (not tokenized) on detokenization.
std::vector<TokenId> tokenize(const Vocabulary& v, const NormalizedText& text);

std::string detokenize(const Vocabulary& v, std::span<const TokenId> ids);

struct PairStats {
    std::unordered_map<uint64_t, int64_t> counts; // (left<<32|right) -> count

    int64_t at(TokenId l, TokenId r) const {
        auto it = counts.find((uint64_t(l) << 32) | uint64_t(r));
        return it == counts.end() ? 0 : it->second;
    }
    int64_t total() const;
};

// Adjacent-pair occurrence counts over `corpus` tokenized under `v`; pairs
// never cross word boundaries. Parallel over unique words, deterministic.
PairStats pair_frequencies(const Vocabulary& v, const WordStream& corpus);

// Unique words of a stream with occurrence counts (first-seen order), the
// shared basis for training and metric passes.
struct WordTable {
    std::vector<std::string_view> words;
    std::vector<int64_t> counts;

    static WordTable build(const WordStream& stream,
                           std::optional<WordScript> only_script = std::nullopt);
};

// Tokenizes every unique word of a table under `v` (parallel kernel).
std::vector<std::vector<TokenId>> tokenize_table(const Vocabulary& v,
                                                 const WordTable& table);

} // namespace vexp::bpe
