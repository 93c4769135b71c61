#include <omp.h>

#include <queue>

#include "vexp/bpe.hpp"
#include "vexp/unicode.hpp"

namespace vexp::bpe {

// Character-level start state: alphabet tokens where possible, byte-fallback
// tokens otherwise. Lenient decoding because merge surfaces handed to
// decompose() may end mid-sequence. Shared with the trainer, hence not static.
std::vector<TokenId> char_units(const Vocabulary& v, std::string_view word) {
    std::vector<TokenId> ids;
    ids.reserve(word.size());
    size_t pos = 0;
    while (pos < word.size()) {
        size_t start = pos;
        bool valid = true;
        char32_t cp = uni::decode_next_lenient(word, pos, valid);
        if (valid) {
            if (auto t = v.char_token(cp)) {
                ids.push_back(*t);
                continue;
            }
        }
        for (size_t k = start; k < pos; ++k)
            ids.push_back(TokenId(uint8_t(word[k])));
    }
    return ids;
}

std::vector<TokenId> tokenize_word(const Vocabulary& v, std::string_view word) {
    std::vector<TokenId> ids = char_units(v, word);
    if (ids.size() < 2)
        return ids;

    // Lowest rank first, leftmost first among equal ranks. Every rule that
    // consumes a token outranks the rule that created it, so this ordering
    // reaches the ascending-rank fixpoint.
    const size_t n = ids.size();
    std::vector<int32_t> prev(n), next(n);
    std::vector<char> alive(n, 1);
    for (size_t i = 0; i < n; ++i) {
        prev[i] = int32_t(i) - 1;
        next[i] = i + 1 < n ? int32_t(i + 1) : -1;
    }

    struct Cand {
        uint32_t rank;
        uint32_t pos;
        TokenId left, right;
    };
    auto later = [](const Cand& a, const Cand& b) {
        return a.rank != b.rank ? a.rank > b.rank : a.pos > b.pos;
    };
    std::priority_queue<Cand, std::vector<Cand>, decltype(later)> heap(later);

    auto consider = [&](int32_t i) {
        int32_t j = next[i];
        if (j < 0)
            return;
        if (const MergeRule* r = v.find_rule(ids[i], ids[j]))
            heap.push(Cand{r->rank, uint32_t(i), ids[i], ids[j]});
    };
    for (size_t i = 0; i + 1 < n; ++i)
        consider(int32_t(i));

    const auto& rules = v.merges();
    while (!heap.empty()) {
        Cand c = heap.top();
        heap.pop();
        int32_t i = int32_t(c.pos);
        if (!alive[i] || ids[i] != c.left)
            continue;
        int32_t j = next[i];
        if (j < 0 || ids[j] != c.right)
            continue;
        ids[i] = rules[c.rank].result;
        alive[j] = 0;
        next[i] = next[j];
        if (next[j] >= 0)
            prev[next[j]] = i;
        if (prev[i] >= 0)
            consider(prev[i]);
        consider(i);
    }

    std::vector<TokenId> out;
    for (int32_t i = 0; i >= 0; i = next[i])
        out.push_back(ids[i]);
    return out;
}

std::vector<TokenId> tokenize(const Vocabulary& v, const NormalizedText& text) {
    std::vector<TokenId> out;
    const std::string& s = text.text;
    size_t i = 0;
    while (i < s.size()) {
        size_t j = s.find(' ', i);
        if (j == std::string::npos)
            j = s.size();
        if (i > 0)
            out.push_back(TokenId(' ')); // separator emitted as its byte token
        std::vector<TokenId> w = tokenize_word(v, std::string_view(s).substr(i, j - i));
        out.insert(out.end(), w.begin(), w.end());
        i = j + 1;
    }
    return out;
}

std::string detokenize(const Vocabulary& v, std::span<const TokenId> ids) {
    std::string out;
    for (TokenId id : ids)
        out += v.surface(id);
    return out;
}

int64_t PairStats::total() const {
    int64_t sum = 0;
    for (const auto& [key, count] : counts)
        sum += count;
    return sum;
}

WordTable WordTable::build(const WordStream& stream, std::optional<WordScript> only_script) {
    WordTable t;
    std::unordered_map<std::string_view, size_t> index;
    index.reserve(stream.word_count() / 2 + 16);
    for (size_t i = 0; i < stream.word_count(); ++i) {
        if (only_script && stream.words[i].script != *only_script)
            continue;
        std::string_view w = stream.word(i);
        auto [it, fresh] = index.emplace(w, t.words.size());
        if (fresh) {
            t.words.push_back(w);
            t.counts.push_back(1);
        } else {
            ++t.counts[it->second];
        }
    }
    return t;
}

std::vector<std::vector<TokenId>> tokenize_table(const Vocabulary& v, const WordTable& table) {
    std::vector<std::vector<TokenId>> out(table.words.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (size_t i = 0; i < table.words.size(); ++i)
        out[i] = tokenize_word(v, table.words[i]);
    return out;
}

PairStats pair_frequencies(const Vocabulary& v, const WordStream& corpus) {
    WordTable table = WordTable::build(corpus);
    std::vector<std::vector<TokenId>> toks = tokenize_table(v, table);

    PairStats stats;
#pragma omp parallel
    {
        PairStats local;
#pragma omp for schedule(static) nowait
        for (size_t i = 0; i < toks.size(); ++i) {
            const auto& ids = toks[i];
            int64_t c = table.counts[i];
            for (size_t k = 0; k + 1 < ids.size(); ++k)
                local.counts[(uint64_t(ids[k]) << 32) | ids[k + 1]] += c;
        }
#pragma omp critical
        for (const auto& [key, count] : local.counts)
            stats.counts[key] += count;
    }
    return stats;
}

} // namespace vexp::bpe
