#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vexp/vocab.hpp"

namespace vexp::embed {

struct EmbeddingMatrix {
    uint32_t rows = 0;
    uint32_t dim = 0;
    std::vector<float> data; // rows * dim, row-major

    std::span<const float> row(uint32_t r) const {
        return std::span<const float>(data).subspan(size_t(r) * dim, dim);
    }
    std::span<float> row(uint32_t r) {
        return std::span<float>(data).subspan(size_t(r) * dim, dim);
    }
};

struct InitEntry {
    TokenId new_id = 0;
    std::vector<TokenId> constituents; // non-empty, ids from the old vocabulary
};

struct InitPlan {
    std::vector<InitEntry> entries; // ordered by new_id
};

// Tokenizes `surface` under `base`; concatenated surfaces reproduce the
// input exactly (byte fallback guarantees a decomposition).
std::vector<TokenId> decompose(std::string_view surface, const Vocabulary& base);

// One entry per token of new_v not in old_v. Constituents are decomposed
// under `basis` (the stage-0 vocabulary in the staged pipeline); basis =
// nullptr uses old_v itself. Throws InvalidArgument when new_v is not a pure
// extension of old_v or basis is not a prefix of old_v.
InitPlan make_plan(const Vocabulary& old_v, const Vocabulary& new_v,
                   const Vocabulary* basis = nullptr);

// New rows = arithmetic mean (computed in double) of constituent rows; old
// rows are copied byte-identically. Parallel over entries, deterministic.
EmbeddingMatrix apply_plan(const EmbeddingMatrix& m, const InitPlan& plan);

// Binary exchange format: magic "VEXPEMB1", u32 rows, u32 dim, rows*dim
// little-endian f32.
void save_matrix(const std::string& path, const EmbeddingMatrix& m);
EmbeddingMatrix load_matrix(const std::string& path);

// JSON lines: {"new_id": n, "constituents": [ids...]}
void save_plan(const std::string& path, const InitPlan& plan);
InitPlan load_plan(const std::string& path);

} // namespace vexp::embed
