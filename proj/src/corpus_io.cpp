#include "vexp/corpus_io.hpp"

#include <zlib.h>

#include <fstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "vexp/digest.hpp"
#include "vexp/errors.hpp"

namespace vexp {

namespace {

using json = nlohmann::json;

bool has_gz_suffix(std::string_view path) {
    return path.size() > 3 && path.substr(path.size() - 3) == ".gz";
}

std::string read_file_maybe_gz(const std::string& path) {
    if (!has_gz_suffix(path)) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot open " + path);
        std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        if (in.bad())
            throw IoError("read failed on " + path);
        return data;
    }
    gzFile gz = gzopen(path.c_str(), "rb");
    if (!gz)
        throw IoError("cannot open " + path);
    std::string data;
    char buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof buf)) > 0)
        data.append(buf, size_t(n));
    bool ok = n == 0;
    gzclose(gz);
    if (!ok)
        throw IoError("gzip read failed on " + path);
    return data;
}

} // namespace

std::vector<Document> read_corpus(const std::string& path) {
    std::string data = read_file_maybe_gz(path);
    std::vector<Document> docs;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos < data.size()) {
        size_t eol = data.find('\n', pos);
        if (eol == std::string::npos)
            eol = data.size();
        std::string_view line(data.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;

        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded())
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed JSON record");
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("lang") ||
            !rec.contains("text") || !rec["id"].is_string() ||
            !rec["lang"].is_string() || !rec["text"].is_string())
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": record must be {\"id\", \"lang\", \"text\"} with string values");
        Document d;
        d.id = rec["id"].get<std::string>();
        try {
            d.lang = lang_class_from_tag(rec["lang"].get<std::string>());
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        d.text = rec["text"].get<std::string>();
        docs.push_back(std::move(d));
    }
    return docs;
}

void write_corpus(const std::string& path, std::span<const Document> docs) {
    std::string data;
    for (const auto& d : docs) {
        json rec;
        rec["id"] = d.id;
        rec["lang"] = lang_class_tag(d.lang);
        rec["text"] = d.text;
        data += rec.dump();
        data += '\n';
    }
    if (has_gz_suffix(path)) {
        gzFile gz = gzopen(path.c_str(), "wb");
        if (!gz)
            throw IoError("cannot open " + path + " for writing");
        bool ok = gzwrite(gz, data.data(), unsigned(data.size())) == int(data.size());
        ok = gzclose(gz) == Z_OK && ok;
        if (!ok)
            throw IoError("gzip write failed on " + path);
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out.write(data.data(), std::streamsize(data.size()));
    if (!out)
        throw IoError("write failed on " + path);
}

std::string corpus_digest(std::span<const Document> docs) {
    Sha256 h;
    for (const auto& d : docs) {
        h.update(d.id);
        h.update(std::string_view("\x1f", 1));
        h.update(lang_class_tag(d.lang));
        h.update(std::string_view("\x1f", 1));
        h.update(d.text);
        h.update(std::string_view("\x1e", 1));
    }
    return h.hex();
}

} // namespace vexp
