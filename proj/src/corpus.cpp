#include "vexp/corpus.hpp"

#include <omp.h>

#include "vexp/errors.hpp"
#include "vexp/unicode.hpp"

namespace vexp {

const char* lang_class_name(LangClass c) {
    switch (c) {
    case LangClass::arabic: return "arabic";
    case LangClass::english: return "english";
    case LangClass::math_code: return "math_code";
    case LangClass::other: return "other";
    }
    return "?";
}

const char* lang_class_tag(LangClass c) {
    switch (c) {
    case LangClass::arabic: return "ar";
    case LangClass::english: return "en";
    case LangClass::math_code: return "mc";
    case LangClass::other: return "other";
    }
    return "?";
}

LangClass lang_class_from_tag(std::string_view tag) {
    if (tag == "ar") return LangClass::arabic;
    if (tag == "en") return LangClass::english;
    if (tag == "mc") return LangClass::math_code;
    if (tag == "other") return LangClass::other;
    throw DataError("unknown lang tag \"" + std::string(tag) + "\"");
}

const char* word_script_name(WordScript s) {
    switch (s) {
    case WordScript::arabic_script: return "arabic_script";
    case WordScript::latin_script: return "latin_script";
    case WordScript::digit: return "digit";
    case WordScript::mixed: return "mixed";
    case WordScript::other: return "other";
    }
    return "?";
}

NormalizedText normalize(std::string_view raw) {
    uni::validate_utf8(raw);
    std::string composed = uni::nfc(raw);

    // Collapse whitespace runs to one space, drop leading/trailing. A space
    // never composes with what follows, so the result is NFC and the whole
    // function is idempotent.
    std::string out;
    out.reserve(composed.size());
    size_t pos = 0;
    bool pending_space = false;
    while (pos < composed.size()) {
        size_t start = pos;
        char32_t cp = uni::decode_next(composed, pos);
        if (uni::is_whitespace(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.append(composed, start, pos - start);
    }
    return NormalizedText{std::move(out)};
}

WordScript classify_word(std::string_view word) {
    bool has_arabic = false, has_latin = false, has_digit = false;
    size_t pos = 0;
    while (pos < word.size()) {
        switch (uni::codepoint_class(uni::decode_next(word, pos))) {
        case uni::CpClass::arabic: has_arabic = true; break;
        case uni::CpClass::latin: has_latin = true; break;
        case uni::CpClass::digit: has_digit = true; break;
        case uni::CpClass::other: break;
        }
    }
    if (has_arabic && has_latin) return WordScript::mixed;
    if (has_arabic) return WordScript::arabic_script;
    if (has_latin) return WordScript::latin_script;
    if (has_digit) return WordScript::digit;
    return WordScript::other;
}

int64_t WordStream::total_bytes() const {
    int64_t sum = 0;
    for (uint32_t b : doc_bytes)
        sum += b;
    return sum;
}

void WordStream::append(const NormalizedText& t) {
    if (doc_word_begin.empty())
        doc_word_begin.push_back(0);
    if (!doc_bytes.empty())
        text.push_back('\n'); // document boundary, never part of a word
    uint32_t base = uint32_t(text.size());
    text += t.text;

    // Normalized text has single-space separators only, so words are the
    // spans between spaces.
    size_t i = 0;
    const std::string& s = t.text;
    while (i < s.size()) {
        if (s[i] == ' ') {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < s.size() && s[j] != ' ')
            ++j;
        std::string_view w(s.data() + i, j - i);
        words.push_back(WordRef{base + uint32_t(i), uint32_t(j - i), classify_word(w)});
        i = j;
    }
    doc_word_begin.push_back(uint32_t(words.size()));
    doc_bytes.push_back(uint32_t(t.text.size()));
}

WordStream segment_words(const NormalizedText& t) {
    WordStream s;
    s.append(t);
    return s;
}

WordStream build_word_stream(std::span<const Document> docs) {
    std::vector<NormalizedText> normalized(docs.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (size_t i = 0; i < docs.size(); ++i)
        normalized[i] = normalize(docs[i].text);

    WordStream s;
    size_t total = 0;
    for (const auto& n : normalized)
        total += n.text.size() + 1;
    s.text.reserve(total);
    for (const auto& n : normalized)
        s.append(n);
    return s;
}

ClassStats CorpusStats::total() const {
    ClassStats t;
    for (const auto& c : per_class) {
        t.documents += c.documents;
        t.words += c.words;
        t.bytes += c.bytes;
    }
    return t;
}

CorpusStats corpus_stats(std::span<const Document> docs) {
    CorpusStats stats;
    auto& per_class = stats.per_class;
#pragma omp parallel
    {
        CorpusStats local;
#pragma omp for schedule(dynamic, 16) nowait
        for (size_t i = 0; i < docs.size(); ++i) {
            WordStream s = segment_words(normalize(docs[i].text));
            ClassStats& c = local.per_class[size_t(docs[i].lang)];
            c.documents += 1;
            c.words += int64_t(s.word_count());
            c.bytes += s.total_bytes();
        }
#pragma omp critical
        for (size_t k = 0; k < kNumLangClasses; ++k) {
            per_class[k].documents += local.per_class[k].documents;
            per_class[k].words += local.per_class[k].words;
            per_class[k].bytes += local.per_class[k].bytes;
        }
    }
    return stats;
}

} // namespace vexp
