#include "vexp/embed_init.hpp"

#include <omp.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "vexp/bpe.hpp"
#include "vexp/errors.hpp"

namespace vexp::embed {

namespace {

constexpr char kMagic[8] = {'V', 'E', 'X', 'P', 'E', 'M', 'B', '1'};

void put_u32(std::string& out, uint32_t v) {
    out.push_back(char(v & 0xFF));
    out.push_back(char((v >> 8) & 0xFF));
    out.push_back(char((v >> 16) & 0xFF));
    out.push_back(char((v >> 24) & 0xFF));
}

uint32_t get_u32(const unsigned char* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

} // namespace

std::vector<TokenId> decompose(std::string_view surface, const Vocabulary& base) {
    return bpe::tokenize_word(base, surface);
}

InitPlan make_plan(const Vocabulary& old_v, const Vocabulary& new_v, const Vocabulary* basis) {
    if (!new_v.extends(old_v))
        throw InvalidArgument("new vocabulary is not a pure extension of the old one");
    const Vocabulary& b = basis ? *basis : old_v;
    if (basis && !old_v.extends(*basis))
        throw InvalidArgument("decomposition basis must be a prefix of the old vocabulary");

    InitPlan plan;
    plan.entries.reserve(new_v.size() - old_v.size());
    for (TokenId id = TokenId(old_v.size()); id < new_v.size(); ++id)
        plan.entries.push_back(InitEntry{id, decompose(new_v.surface(id), b)});
    return plan;
}

EmbeddingMatrix apply_plan(const EmbeddingMatrix& m, const InitPlan& plan) {
    if (size_t(m.rows) * m.dim != m.data.size())
        throw InvalidArgument("embedding matrix shape disagrees with its data");
    for (float x : m.data)
        if (!std::isfinite(x))
            throw NumericError("embedding matrix holds non-finite values");
    for (size_t i = 0; i < plan.entries.size(); ++i) {
        const InitEntry& e = plan.entries[i];
        if (e.new_id != m.rows + i)
            throw InvalidArgument("plan ids must extend the matrix rows contiguously");
        if (e.constituents.empty())
            throw InvalidArgument("init entry without constituents");
        for (TokenId c : e.constituents)
            if (c >= m.rows)
                throw InvalidArgument("constituent id " + std::to_string(c) +
                                      " has no row in the input matrix");
    }

    EmbeddingMatrix out;
    out.rows = m.rows + uint32_t(plan.entries.size());
    out.dim = m.dim;
    out.data = m.data;
    out.data.resize(size_t(out.rows) * out.dim, 0.0f);

#pragma omp parallel for schedule(static)
    for (size_t i = 0; i < plan.entries.size(); ++i) {
        const InitEntry& e = plan.entries[i];
        std::span<float> row = out.row(uint32_t(m.rows + i));
        // means accumulate in double, stored back as f32
        for (uint32_t d = 0; d < out.dim; ++d) {
            double sum = 0.0;
            for (TokenId c : e.constituents)
                sum += m.row(c)[d];
            row[d] = float(sum / double(e.constituents.size()));
        }
    }
    return out;
}

void save_matrix(const std::string& path, const EmbeddingMatrix& m) {
    if (size_t(m.rows) * m.dim != m.data.size())
        throw InvalidArgument("embedding matrix shape disagrees with its data");
    if (m.dim < 1)
        throw InvalidArgument("embedding dim must be >= 1");
    std::string out(kMagic, sizeof kMagic);
    put_u32(out, m.rows);
    put_u32(out, m.dim);
    for (float x : m.data) {
        uint32_t bits;
        std::memcpy(&bits, &x, 4);
        put_u32(out, bits);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open " + path + " for writing");
    f.write(out.data(), std::streamsize(out.size()));
    if (!f)
        throw IoError("write failed on " + path);
}

EmbeddingMatrix load_matrix(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad())
        throw IoError("read failed on " + path);

    if (data.size() < 16 || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0)
        throw DataError(path + " is not an embedding exchange file");
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    EmbeddingMatrix m;
    m.rows = get_u32(p + 8);
    m.dim = get_u32(p + 12);
    if (m.dim < 1)
        throw DataError(path + ": embedding dim must be >= 1");
    uint64_t cells = uint64_t(m.rows) * m.dim;
    if (data.size() != 16 + cells * 4)
        throw DataError(path + ": size disagrees with its header");
    m.data.resize(cells);
    for (uint64_t i = 0; i < cells; ++i) {
        uint32_t bits = get_u32(p + 16 + i * 4);
        std::memcpy(&m.data[i], &bits, 4);
    }
    return m;
}

void save_plan(const std::string& path, const InitPlan& plan) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open " + path + " for writing");
    for (const InitEntry& e : plan.entries) {
        nlohmann::ordered_json j;
        j["new_id"] = e.new_id;
        j["constituents"] = e.constituents;
        f << j.dump() << '\n';
    }
    if (!f)
        throw IoError("write failed on " + path);
}

InitPlan load_plan(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path);
    InitPlan plan;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty())
            continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("new_id") ||
            !j.contains("constituents") || !j["new_id"].is_number_unsigned() ||
            !j["constituents"].is_array() || j["constituents"].empty())
            throw DataError(path + ":" + std::to_string(line_no) + ": malformed init-plan entry");
        InitEntry e;
        e.new_id = j["new_id"].get<TokenId>();
        for (const auto& c : j["constituents"]) {
            if (!c.is_number_unsigned())
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": constituents must be unsigned token ids");
            e.constituents.push_back(c.get<TokenId>());
        }
        plan.entries.push_back(std::move(e));
    }
    if (f.bad())
        throw IoError("read failed on " + path);
    return plan;
}

} // namespace vexp::embed
