#include "vexp/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "vexp/errors.hpp"

namespace vexp::uni {

namespace {

// Returns the code point at `pos` or ~0u on malformed input without
// advancing. `len` receives the sequence length on success.
constexpr char32_t kBad = 0xFFFFFFFF;

char32_t decode_raw(std::string_view s, size_t pos, size_t& len) {
    const auto b = [&](size_t i) { return uint8_t(s[pos + i]); };
    uint8_t b0 = b(0);
    if (b0 < 0x80) {
        len = 1;
        return b0;
    }
    auto cont = [&](size_t i) { return pos + i < s.size() && (b(i) & 0xC0) == 0x80; };
    if (b0 >= 0xC2 && b0 <= 0xDF) {
        if (!cont(1)) return kBad;
        len = 2;
        return (char32_t(b0 & 0x1F) << 6) | (b(1) & 0x3F);
    }
    if (b0 >= 0xE0 && b0 <= 0xEF) {
        if (!cont(1) || !cont(2)) return kBad;
        uint8_t b1 = b(1);
        // E0 A0..BF: no overlongs; ED 80..9F: no surrogates.
        if (b0 == 0xE0 && b1 < 0xA0) return kBad;
        if (b0 == 0xED && b1 > 0x9F) return kBad;
        len = 3;
        return (char32_t(b0 & 0x0F) << 12) | (char32_t(b1 & 0x3F) << 6) | (b(2) & 0x3F);
    }
    if (b0 >= 0xF0 && b0 <= 0xF4) {
        if (!cont(1) || !cont(2) || !cont(3)) return kBad;
        uint8_t b1 = b(1);
        if (b0 == 0xF0 && b1 < 0x90) return kBad;
        if (b0 == 0xF4 && b1 > 0x8F) return kBad;
        len = 4;
        return (char32_t(b0 & 0x07) << 18) | (char32_t(b1 & 0x3F) << 12) |
               (char32_t(b(2) & 0x3F) << 6) | (b(3) & 0x3F);
    }
    return kBad; // 0x80..0xC1, 0xF5..0xFF can never start a sequence
}

} // namespace

CpClass codepoint_class(char32_t cp) {
    // Arabic blocks: core, Supplement, Extended-B, Extended-A, and both
    // presentation-forms blocks.
    if ((cp >= 0x0600 && cp <= 0x06FF) || (cp >= 0x0750 && cp <= 0x077F) ||
        (cp >= 0x0870 && cp <= 0x089F) || (cp >= 0x08A0 && cp <= 0x08FF) ||
        (cp >= 0xFB50 && cp <= 0xFDFF) || (cp >= 0xFE70 && cp <= 0xFEFF)) {
        // Arabic-Indic digits live inside the core block but count as digits.
        if ((cp >= 0x0660 && cp <= 0x0669) || (cp >= 0x06F0 && cp <= 0x06F9))
            return CpClass::digit;
        return CpClass::arabic;
    }
    if ((cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z'))
        return CpClass::latin;
    if ((cp >= 0x00C0 && cp <= 0x00FF && cp != 0x00D7 && cp != 0x00F7) ||
        (cp >= 0x0100 && cp <= 0x024F) || (cp >= 0x1E00 && cp <= 0x1EFF))
        return CpClass::latin;
    if (cp >= U'0' && cp <= U'9')
        return CpClass::digit;
    return CpClass::other;
}

bool is_whitespace(char32_t cp) {
    switch (cp) {
    case 0x0009: case 0x000A: case 0x000B: case 0x000C: case 0x000D:
    case 0x0020: case 0x0085: case 0x00A0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

char32_t decode_next(std::string_view s, size_t& pos) {
    size_t len = 0;
    char32_t cp = decode_raw(s, pos, len);
    if (cp == kBad)
        throw DecodeError("invalid UTF-8", pos);
    pos += len;
    return cp;
}

char32_t decode_next_lenient(std::string_view s, size_t& pos, bool& valid) {
    size_t len = 0;
    char32_t cp = decode_raw(s, pos, len);
    if (cp == kBad) {
        valid = false;
        return uint8_t(s[pos++]);
    }
    valid = true;
    pos += len;
    return cp;
}

void validate_utf8(std::string_view s) {
    size_t pos = 0;
    while (pos < s.size())
        decode_next(s, pos);
}

size_t utf8_length(char32_t cp) {
    if (cp < 0x80) return 1;
    if (cp < 0x800) return 2;
    if (cp < 0x10000) return 3;
    return 4;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(char(cp));
    } else if (cp < 0x800) {
        out.push_back(char(0xC0 | (cp >> 6)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(char(0xE0 | (cp >> 12)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(char(0xF0 | (cp >> 18)));
        out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    }
}

std::string nfc(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status))
        throw Error("NFC normalizer unavailable");

    icu::StringPiece piece(s.data(), int32_t(s.size()));
    if (norm->isNormalizedUTF8(piece, status) && U_SUCCESS(status))
        return std::string(s); // common case: already composed

    status = U_ZERO_ERROR;
    icu::UnicodeString in = icu::UnicodeString::fromUTF8(piece);
    icu::UnicodeString composed = norm->normalize(in, status);
    if (U_FAILURE(status))
        throw Error("NFC normalization failed");
    std::string out;
    composed.toUTF8String(out);
    return out;
}

} // namespace vexp::uni
