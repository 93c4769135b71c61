#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vexp/corpus.hpp"

namespace vexp {

using TokenId = uint32_t;

struct MergeRule {
    TokenId left = 0;
    TokenId right = 0;
    TokenId result = 0; // always base_size + rank
    uint32_t rank = 0;  // creation order, dense from 0
    uint32_t stage = 0; // expansion stage that introduced it (0 = base)
};

// Immutable token inventory + ordered merge rules. ids are dense from 0:
// [0,256) byte-fallback tokens, [256, base_size) single multi-byte-UTF-8
// code points sorted by code point, [base_size, size) merge results in rank
// order. Extension produces a new value; existing ids and ranks never change.
class Vocabulary {
public:
    static constexpr size_t kByteTokens = 256;

    Vocabulary() = default;

    // Builds an alphabet-only vocabulary: 256 byte tokens plus the given
    // multi-byte code points (deduplicated, sorted).
    static Vocabulary from_alphabet(const std::vector<char32_t>& multibyte_chars);

    size_t size() const { return surfaces_.size(); }
    uint32_t base_size() const { return base_size_; }
    const std::vector<MergeRule>& merges() const { return merges_; }
    const std::string& surface(TokenId id) const { return surfaces_[id]; }
    uint32_t stage_tag(TokenId id) const { return stage_tags_[id]; }
    uint32_t max_stage() const;

    // Alphabet lookup: single-byte code points map to their byte token;
    // multi-byte code points hit the alphabet table; nullopt means byte
    // fallback is required.
    std::optional<TokenId> char_token(char32_t cp) const;

    const MergeRule* find_rule(TokenId left, TokenId right) const;

    // Appends one merge; result id is size(). Internal index updated.
    TokenId push_merge(TokenId left, TokenId right, uint32_t stage);

    // Extension-purity check: true when *this is `base` plus zero or more
    // trailing merges (identical surfaces, merges and base alphabet prefix).
    bool extends(const Vocabulary& base) const;

    // Metadata carried through training and serialization.
    std::vector<uint64_t> stage_targets; // created_stage_targets
    std::string corpus_digest;           // chained hex digest of training corpora

    // Structural invariant check; throws DataError on violation. Used after
    // deserialization.
    void validate() const;

    // Serialization (canonical JSON; load-then-save is byte-identical).
    std::string to_json() const;
    static Vocabulary from_json(std::string_view json_text);
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

private:
    friend class VocabBuilder;

    std::vector<std::string> surfaces_;
    std::vector<uint32_t> stage_tags_;
    std::vector<MergeRule> merges_;
    uint32_t base_size_ = 0;

    std::unordered_map<char32_t, TokenId> char_index_; // multi-byte alphabet only
    std::unordered_map<uint64_t, uint32_t> pair_index_; // (left<<32|right) -> rank

    void rebuild_index();

    static uint64_t pair_key(TokenId l, TokenId r) {
        return (uint64_t(l) << 32) | uint64_t(r);
    }
};

} // namespace vexp
