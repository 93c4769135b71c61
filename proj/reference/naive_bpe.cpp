#include "naive_bpe.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace vexp::reference {
namespace {

size_t char_len(unsigned char b) {
    if (b < 0x80) return 1;
    if (b < 0xE0) return 2;
    if (b < 0xF0) return 3;
    return 4;
}

char32_t char_value(const std::string& s, size_t off, size_t len) {
    auto b = [&](size_t i) { return char32_t(uint8_t(s[off + i])); };
    switch (len) {
    case 1: return b(0);
    case 2: return ((b(0) & 0x1F) << 6) | (b(1) & 0x3F);
    case 3: return ((b(0) & 0x0F) << 12) | ((b(1) & 0x3F) << 6) | (b(2) & 0x3F);
    default: return ((b(0) & 0x07) << 18) | ((b(1) & 0x3F) << 12) | ((b(2) & 0x3F) << 6) | (b(3) & 0x3F);
    }
}

// Splits a word into alphabet ids: byte value for ASCII, looked-up id for
// multi-byte characters.
std::vector<uint32_t> char_ids(const NaiveVocab& v, const std::string& word) {
    std::vector<uint32_t> out;
    for (size_t i = 0; i < word.size();) {
        size_t len = char_len(uint8_t(word[i]));
        if (len == 1) {
            out.push_back(uint8_t(word[i]));
            i += 1;
            continue;
        }
        std::string ch = word.substr(i, len);
        uint32_t id = 0;
        bool found = false;
        for (uint32_t j = 256; j < v.base_size; ++j) {
            if (v.surfaces[j] == ch) {
                id = j;
                found = true;
                break;
            }
        }
        if (!found) throw std::runtime_error("naive: character not in alphabet");
        out.push_back(id);
        i += len;
    }
    return out;
}

struct PairPick {
    int64_t count = -1;
    uint32_t left = 0, right = 0;
};

// (count desc, left surface, right surface, left id, right id); returns true
// when (c, l, r) should replace the current pick.
bool better(const NaiveVocab& v, const PairPick& cur, int64_t c, uint32_t l, uint32_t r) {
    if (c != cur.count) return c > cur.count;
    if (v.surfaces[l] != v.surfaces[cur.left]) return v.surfaces[l] < v.surfaces[cur.left];
    if (v.surfaces[r] != v.surfaces[cur.right]) return v.surfaces[r] < v.surfaces[cur.right];
    if (l != cur.left) return l < cur.left;
    return r < cur.right;
}

void train_steps(NaiveVocab& v, std::vector<std::vector<uint32_t>>& toks,
                 const std::vector<int64_t>& counts, size_t merge_count,
                 int64_t min_count) {
    for (size_t step = 0; step < merge_count; ++step) {
        std::map<std::pair<uint32_t, uint32_t>, int64_t> freq;
        for (size_t w = 0; w < toks.size(); ++w)
            for (size_t i = 0; i + 1 < toks[w].size(); ++i)
                freq[{toks[w][i], toks[w][i + 1]}] += counts[w];

        PairPick best;
        for (const auto& [pr, c] : freq)
            if (c >= min_count && better(v, best, c, pr.first, pr.second)) best = {c, pr.first, pr.second};
        if (best.count < 0) break;

        uint32_t result = uint32_t(v.surfaces.size());
        v.surfaces.push_back(v.surfaces[best.left] + v.surfaces[best.right]);
        v.merges.push_back({best.left, best.right, result});

        for (auto& word : toks) {
            std::vector<uint32_t> next;
            next.reserve(word.size());
            for (size_t i = 0; i < word.size();) {
                if (i + 1 < word.size() && word[i] == best.left && word[i + 1] == best.right) {
                    next.push_back(result);
                    i += 2;
                } else {
                    next.push_back(word[i]);
                    i += 1;
                }
            }
            word = std::move(next);
        }
    }
}

} // namespace

NaiveVocab naive_alphabet(const std::vector<std::string>& words) {
    NaiveVocab v;
    v.surfaces.resize(256);
    for (int b = 0; b < 256; ++b) v.surfaces[b] = std::string(1, char(b));

    std::vector<std::pair<char32_t, std::string>> extra;
    for (const auto& w : words) {
        for (size_t i = 0; i < w.size();) {
            size_t len = char_len(uint8_t(w[i]));
            if (len > 1) extra.emplace_back(char_value(w, i, len), w.substr(i, len));
            i += len;
        }
    }
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
    for (auto& [cp, s] : extra) v.surfaces.push_back(s);
    v.base_size = uint32_t(v.surfaces.size());
    return v;
}

NaiveVocab naive_train(const std::vector<std::string>& words,
                       const std::vector<int64_t>& counts, size_t merge_count,
                       int64_t min_count) {
    NaiveVocab v = naive_alphabet(words);
    naive_extend(v, words, counts, merge_count, min_count);
    return v;
}

void naive_extend(NaiveVocab& v, const std::vector<std::string>& words,
                  const std::vector<int64_t>& counts, size_t merge_count,
                  int64_t min_count) {
    std::vector<std::vector<uint32_t>> toks;
    toks.reserve(words.size());
    for (const auto& w : words) toks.push_back(naive_tokenize(v, w));
    train_steps(v, toks, counts, merge_count, min_count);
}

std::vector<uint32_t> naive_tokenize(const NaiveVocab& v, const std::string& word) {
    std::vector<uint32_t> toks = char_ids(v, word);
    for (const auto& m : v.merges) {
        bool applied = true;
        while (applied) {
            applied = false;
            for (size_t i = 0; i + 1 < toks.size(); ++i) {
                if (toks[i] == m[0] && toks[i + 1] == m[1]) {
                    toks[i] = m[2];
                    toks.erase(toks.begin() + long(i) + 1);
                    applied = true;
                }
            }
        }
    }
    return toks;
}

std::map<std::pair<uint32_t, uint32_t>, int64_t>
naive_pair_counts(const NaiveVocab& v, const std::vector<std::string>& words,
                  const std::vector<int64_t>& counts) {
    std::map<std::pair<uint32_t, uint32_t>, int64_t> freq;
    for (size_t w = 0; w < words.size(); ++w) {
        auto toks = naive_tokenize(v, words[w]);
        for (size_t i = 0; i + 1 < toks.size(); ++i)
            freq[{toks[i], toks[i + 1]}] += counts[w];
    }
    return freq;
}

} // namespace vexp::reference
