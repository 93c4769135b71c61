#include "vexp/vocab.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "vexp/errors.hpp"
#include "vexp/unicode.hpp"

namespace vexp {

namespace {

using ordered_json = nlohmann::ordered_json;

// Token surfaces are byte strings (byte-fallback units need not be valid
// UTF-8). For JSON they are widened byte -> U+00NN, so ensure_ascii dumping
// escapes exactly the non-printable bytes and the mapping stays injective.
std::string widen_bytes(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    for (unsigned char b : bytes)
        uni::append_utf8(out, b);
    return out;
}

std::string narrow_bytes(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    size_t pos = 0;
    while (pos < utf8.size()) {
        char32_t cp = uni::decode_next(utf8, pos);
        if (cp > 0xFF)
            throw DataError("surface escape out of byte range");
        out.push_back(char(cp));
    }
    return out;
}

} // namespace

Vocabulary Vocabulary::from_alphabet(const std::vector<char32_t>& multibyte_chars) {
    Vocabulary v;
    std::vector<char32_t> chars;
    chars.reserve(multibyte_chars.size());
    for (char32_t cp : multibyte_chars)
        if (cp >= 0x80) // single-byte code points are already byte tokens
            chars.push_back(cp);
    std::sort(chars.begin(), chars.end());
    chars.erase(std::unique(chars.begin(), chars.end()), chars.end());

    v.surfaces_.reserve(kByteTokens + chars.size());
    for (unsigned b = 0; b < kByteTokens; ++b)
        v.surfaces_.emplace_back(1, char(b));
    for (char32_t cp : chars) {
        std::string s;
        uni::append_utf8(s, cp);
        v.surfaces_.push_back(std::move(s));
    }
    v.base_size_ = uint32_t(v.surfaces_.size());
    v.stage_tags_.assign(v.surfaces_.size(), 0);
    v.rebuild_index();
    return v;
}

uint32_t Vocabulary::max_stage() const {
    return merges_.empty() ? 0 : merges_.back().stage;
}

std::optional<TokenId> Vocabulary::char_token(char32_t cp) const {
    if (cp < 0x80)
        return TokenId(cp);
    auto it = char_index_.find(cp);
    if (it == char_index_.end())
        return std::nullopt;
    return it->second;
}

const MergeRule* Vocabulary::find_rule(TokenId left, TokenId right) const {
    auto it = pair_index_.find(pair_key(left, right));
    return it == pair_index_.end() ? nullptr : &merges_[it->second];
}

TokenId Vocabulary::push_merge(TokenId left, TokenId right, uint32_t stage) {
    if (left >= size() || right >= size())
        throw InvalidArgument("merge references an unknown token id");
    if (!merges_.empty() && stage < merges_.back().stage)
        throw InvalidArgument("merge stage tags must be non-decreasing");
    TokenId result = TokenId(size());
    MergeRule rule{left, right, result, uint32_t(merges_.size()), stage};
    surfaces_.push_back(surfaces_[left] + surfaces_[right]);
    stage_tags_.push_back(stage);
    pair_index_.emplace(pair_key(left, right), rule.rank);
    merges_.push_back(rule);
    return result;
}

bool Vocabulary::extends(const Vocabulary& base) const {
    if (base.base_size_ != base_size_ || base.size() > size())
        return false;
    for (size_t i = 0; i < base.base_size_; ++i)
        if (surfaces_[i] != base.surfaces_[i])
            return false;
    for (size_t i = 0; i < base.merges_.size(); ++i) {
        const MergeRule& mine = merges_[i];
        const MergeRule& theirs = base.merges_[i];
        if (mine.left != theirs.left || mine.right != theirs.right ||
            mine.stage != theirs.stage)
            return false;
    }
    return true;
}

void Vocabulary::rebuild_index() {
    char_index_.clear();
    pair_index_.clear();
    for (uint32_t id = kByteTokens; id < base_size_; ++id) {
        size_t pos = 0;
        char_index_.emplace(uni::decode_next(surfaces_[id], pos), id);
    }
    for (const MergeRule& m : merges_)
        pair_index_.emplace(pair_key(m.left, m.right), m.rank);
}

void Vocabulary::validate() const {
    auto fail = [](const std::string& why) { throw DataError("invalid vocabulary: " + why); };

    if (surfaces_.size() != size_t(base_size_) + merges_.size())
        fail("token count != base_size + merges");
    if (surfaces_.size() != stage_tags_.size())
        fail("stage tag count mismatch");
    if (base_size_ < kByteTokens)
        fail("base alphabet smaller than the byte-fallback range");
    for (unsigned b = 0; b < kByteTokens; ++b)
        if (surfaces_[b].size() != 1 || uint8_t(surfaces_[b][0]) != b)
            fail("token " + std::to_string(b) + " is not its byte");

    char32_t prev_cp = 0;
    for (uint32_t id = kByteTokens; id < base_size_; ++id) {
        size_t pos = 0;
        char32_t cp;
        try {
            cp = uni::decode_next(surfaces_[id], pos);
        } catch (const DecodeError&) {
            fail("alphabet surface is not valid UTF-8");
            return;
        }
        if (pos != surfaces_[id].size())
            fail("alphabet surface is not a single code point");
        if (cp < 0x80 || cp <= prev_cp)
            fail("alphabet not sorted unique multi-byte code points");
        if (stage_tags_[id] != 0)
            fail("alphabet token with nonzero stage tag");
        prev_cp = cp;
    }

    uint32_t prev_stage = 0;
    std::unordered_map<uint64_t, bool> seen_pairs;
    for (size_t i = 0; i < merges_.size(); ++i) {
        const MergeRule& m = merges_[i];
        TokenId result = TokenId(base_size_ + i);
        if (m.rank != i || m.result != result)
            fail("merge ranks/results not dense in creation order");
        if (m.left >= result || m.right >= result)
            fail("merge references a later token");
        if (surfaces_[result] != surfaces_[m.left] + surfaces_[m.right])
            fail("merge surface is not left ++ right");
        if (m.stage < prev_stage)
            fail("stage tags decrease across ranks");
        if (stage_tags_[result] != m.stage)
            fail("token stage tag disagrees with its merge");
        if (!seen_pairs.emplace(pair_key(m.left, m.right), true).second)
            fail("duplicate merge pair");
        prev_stage = m.stage;
    }
}

std::string Vocabulary::to_json() const {
    ordered_json j;
    auto& alphabet = j["base_alphabet"] = ordered_json::array();
    for (uint32_t id = 0; id < base_size_; ++id)
        alphabet.push_back(widen_bytes(surfaces_[id]));
    auto& merges = j["merges"] = ordered_json::array();
    for (const MergeRule& m : merges_) {
        ordered_json rule;
        rule["left"] = m.left;
        rule["right"] = m.right;
        rule["rank"] = m.rank;
        rule["stage"] = m.stage;
        merges.push_back(std::move(rule));
    }
    j["metadata"]["created_stage_targets"] = stage_targets;
    j["metadata"]["corpus_digest"] = corpus_digest;
    return j.dump(2, ' ', true) + "\n";
}

Vocabulary Vocabulary::from_json(std::string_view json_text) {
    ordered_json j = ordered_json::parse(json_text, nullptr, false);
    if (j.is_discarded())
        throw DataError("vocabulary file is not valid JSON");
    if (!j.is_object() || !j.contains("base_alphabet") || !j.contains("merges") ||
        !j.contains("metadata"))
        throw DataError("vocabulary JSON must have base_alphabet, merges, metadata");

    Vocabulary v;
    const auto& alphabet = j["base_alphabet"];
    if (!alphabet.is_array() || alphabet.size() < kByteTokens)
        throw DataError("base_alphabet must list at least the 256 byte tokens");
    for (const auto& entry : alphabet) {
        if (!entry.is_string())
            throw DataError("base_alphabet entries must be strings");
        v.surfaces_.push_back(narrow_bytes(entry.get<std::string>()));
    }
    v.base_size_ = uint32_t(v.surfaces_.size());
    v.stage_tags_.assign(v.surfaces_.size(), 0);

    const auto& merges = j["merges"];
    if (!merges.is_array())
        throw DataError("merges must be an array");
    for (const auto& rule : merges) {
        if (!rule.is_object() || !rule.contains("left") || !rule.contains("right") ||
            !rule.contains("rank") || !rule.contains("stage") ||
            !rule["left"].is_number_unsigned() || !rule["right"].is_number_unsigned() ||
            !rule["rank"].is_number_unsigned() || !rule["stage"].is_number_unsigned())
            throw DataError("merge rules must be {left, right, rank, stage} with unsigned values");
        TokenId left = rule["left"].get<TokenId>();
        TokenId right = rule["right"].get<TokenId>();
        if (rule["rank"].get<uint64_t>() != v.merges_.size())
            throw DataError("merge ranks must be dense and ascending");
        if (left >= v.size() || right >= v.size())
            throw DataError("merge references a later token");
        MergeRule m{left, right, TokenId(v.size()), uint32_t(v.merges_.size()),
                    rule["stage"].get<uint32_t>()};
        v.surfaces_.push_back(v.surfaces_[left] + v.surfaces_[right]);
        v.stage_tags_.push_back(m.stage);
        v.merges_.push_back(m);
    }

    const auto& meta = j["metadata"];
    if (!meta.is_object() || !meta.contains("created_stage_targets") ||
        !meta.contains("corpus_digest") || !meta["created_stage_targets"].is_array() ||
        !meta["corpus_digest"].is_string())
        throw DataError("metadata must hold created_stage_targets and corpus_digest");
    for (const auto& t : meta["created_stage_targets"]) {
        if (!t.is_number_unsigned())
            throw DataError("created_stage_targets must be unsigned integers");
        v.stage_targets.push_back(t.get<uint64_t>());
    }
    v.corpus_digest = meta["corpus_digest"].get<std::string>();

    v.rebuild_index();
    v.validate();
    return v;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    std::string text = to_json();
    out.write(text.data(), std::streamsize(text.size()));
    if (!out)
        throw IoError("write failed on " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failed on " + path);
    return from_json(text);
}

} // namespace vexp
