#pragma once

#include <span>
#include <string>
#include <vector>

#include "vexp/corpus.hpp"

namespace vexp {

// Reads a JSON-lines corpus; .gz suffix selects gzip decompression.
// Each line: {"id": "...", "lang": "ar"|"en"|"mc"|"other", "text": "..."}.
// Blank lines are skipped. Malformed JSON, missing fields or an unknown lang
// tag throw DataError with the line number.
std::vector<Document> read_corpus(const std::string& path);

void write_corpus(const std::string& path, std::span<const Document> docs);

// Content digest over (id, lang, raw text) of every document, in file order.
// Stored in vocabulary metadata and checked on resume.
std::string corpus_digest(std::span<const Document> docs);

} // namespace vexp
