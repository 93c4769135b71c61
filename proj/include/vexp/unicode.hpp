#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vexp::uni {

// Coarse per-codepoint class used for word script tagging.
enum class CpClass : uint8_t { arabic, latin, digit, other };

CpClass codepoint_class(char32_t cp);

bool is_whitespace(char32_t cp);

// Strict UTF-8 decoding. decode_next returns the code point starting at
// `pos` and advances `pos`; throws DecodeError (with byte offset) on
// malformed sequences, overlongs, surrogates, or out-of-range values.
char32_t decode_next(std::string_view s, size_t& pos);

// Lenient variant for token surfaces (which may hold partial UTF-8 from
// byte-level merges): on a malformed sequence sets `valid` to false and
// consumes exactly one byte, returning it as the "code point".
char32_t decode_next_lenient(std::string_view s, size_t& pos, bool& valid);

// Throws DecodeError if s is not valid UTF-8.
void validate_utf8(std::string_view s);

void append_utf8(std::string& out, char32_t cp);
size_t utf8_length(char32_t cp);

// Canonical composition (NFC). Input must be valid UTF-8.
std::string nfc(std::string_view s);

} // namespace vexp::uni
