#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vexp {

enum class LangClass : uint8_t { arabic = 0, english = 1, math_code = 2, other = 3 };
inline constexpr size_t kNumLangClasses = 4;

const char* lang_class_name(LangClass c);
LangClass lang_class_from_tag(std::string_view tag); // "ar"|"en"|"mc"|"other"
const char* lang_class_tag(LangClass c);

struct Document {
    std::string id;
    LangClass lang = LangClass::other;
    std::string text; // UTF-8
};

// Trimmed, single-spaced, NFC text. Only produced by normalize().
struct NormalizedText {
    std::string text;
};

// normalize: validate UTF-8, NFC-compose, trim, collapse whitespace runs to
// a single space. Idempotent.
NormalizedText normalize(std::string_view raw);

enum class WordScript : uint8_t { arabic_script = 0, latin_script = 1, digit = 2, mixed = 3, other = 4 };
const char* word_script_name(WordScript s);

struct WordRef {
    uint32_t offset = 0; // byte offset into WordStream::text
    uint32_t length = 0; // byte length, > 0
    WordScript script = WordScript::other;
};

// Words (maximal non-whitespace spans) of one or more normalized documents.
// Document boundaries are kept so per-document round-trips and byte counts
// stay exact; documents are joined with '\n' in `text`.
struct WordStream {
    std::string text;
    std::vector<WordRef> words;
    std::vector<uint32_t> doc_word_begin; // size = docs + 1, prefix index into words
    std::vector<uint32_t> doc_bytes;      // normalized byte length per document

    std::string_view word(size_t i) const {
        return std::string_view(text).substr(words[i].offset, words[i].length);
    }
    size_t word_count() const { return words.size(); }
    size_t doc_count() const { return doc_bytes.size(); }
    int64_t total_bytes() const;

    void append(const NormalizedText& t);
};

WordStream segment_words(const NormalizedText& t);

// Normalizes and segments a batch of documents (parallel over documents,
// deterministic output order).
WordStream build_word_stream(std::span<const Document> docs);

WordScript classify_word(std::string_view word);

struct ClassStats {
    int64_t documents = 0;
    int64_t words = 0;
    int64_t bytes = 0; // UTF-8 bytes of normalized text
};

struct CorpusStats {
    std::array<ClassStats, kNumLangClasses> per_class{};
    ClassStats total() const;
};

// Parallel over documents with an order-independent integer reduction;
// bit-identical for any shard count.
CorpusStats corpus_stats(std::span<const Document> docs);

} // namespace vexp
