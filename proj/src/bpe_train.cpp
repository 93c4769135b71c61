#include <omp.h>

#include <algorithm>
#include <unordered_set>

#include "vexp/bpe.hpp"
#include "vexp/errors.hpp"
#include "vexp/unicode.hpp"

namespace vexp::bpe {

std::vector<TokenId> char_units(const Vocabulary& v, std::string_view word);

namespace {

uint64_t pair_key(TokenId l, TokenId r) {
    return (uint64_t(l) << 32) | uint64_t(r);
}

std::vector<char32_t> collect_multibyte(const WordStream& corpus) {
    std::unordered_set<char32_t> seen;
#pragma omp parallel
    {
        std::unordered_set<char32_t> local;
#pragma omp for schedule(static) nowait
        for (size_t i = 0; i < corpus.word_count(); ++i) {
            std::string_view w = corpus.word(i);
            size_t pos = 0;
            while (pos < w.size()) {
                char32_t cp = uni::decode_next(w, pos);
                if (cp >= 0x80)
                    local.insert(cp);
            }
        }
#pragma omp critical
        seen.merge(local);
    }
    std::vector<char32_t> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

// Training state over the unique-word table: current tokenization per word,
// live pair counts, and per-pair word lists (append-only, lazily deduped) so
// a merge touches only the words that can contain its pair.
struct TrainState {
    WordTable table;
    std::vector<std::vector<TokenId>> toks;
    std::unordered_map<uint64_t, int64_t> counts;
    std::unordered_map<uint64_t, std::vector<uint32_t>> where;

    void add_pairs(uint32_t w) {
        const auto& ids = toks[w];
        int64_t c = table.counts[w];
        for (size_t k = 0; k + 1 < ids.size(); ++k) {
            uint64_t key = pair_key(ids[k], ids[k + 1]);
            counts[key] += c;
            auto& list = where[key];
            if (list.empty() || list.back() != w)
                list.push_back(w);
        }
    }

    void sub_pairs(uint32_t w) {
        const auto& ids = toks[w];
        int64_t c = table.counts[w];
        for (size_t k = 0; k + 1 < ids.size(); ++k) {
            auto it = counts.find(pair_key(ids[k], ids[k + 1]));
            it->second -= c;
            if (it->second == 0)
                counts.erase(it);
        }
    }
};

void rewrite(std::vector<TokenId>& ids, TokenId l, TokenId r, TokenId result) {
    size_t out = 0, i = 0;
    while (i < ids.size()) {
        if (i + 1 < ids.size() && ids[i] == l && ids[i + 1] == r) {
            ids[out++] = result;
            i += 2;
        } else {
            ids[out++] = ids[i++];
        }
    }
    ids.resize(out);
}

struct BestPair {
    int64_t count = -1;
    TokenId l = 0, r = 0;
};

// Total order: count desc, then left surface, right surface, left id, right
// id (byte-lexicographic). Makes the argmax independent of hash iteration
// order, hence of thread count and platform.
bool beats(const Vocabulary& v, int64_t count, TokenId l, TokenId r, const BestPair& best) {
    if (count != best.count)
        return count > best.count;
    int c = v.surface(l).compare(v.surface(best.l));
    if (c != 0)
        return c < 0;
    c = v.surface(r).compare(v.surface(best.r));
    if (c != 0)
        return c < 0;
    if (l != best.l)
        return l < best.l;
    return r < best.r;
}

TrainResult grow(Vocabulary v, const WordStream& corpus, uint64_t target_size,
                 uint32_t stage, const TrainOptions& opt) {
    TrainState st;
    st.table = WordTable::build(corpus, opt.restrict_script);
    st.toks = tokenize_table(v, st.table);
    for (uint32_t w = 0; w < st.toks.size(); ++w)
        st.add_pairs(w);

    bool reached = true;
    std::vector<uint32_t> touched;
    while (v.size() < target_size) {
        BestPair best;
        for (const auto& [key, count] : st.counts) {
            if (count < opt.min_pair_count)
                continue;
            TokenId l = TokenId(key >> 32), r = TokenId(key & 0xFFFFFFFFu);
            if (beats(v, count, l, r, best))
                best = BestPair{count, l, r};
        }
        if (best.count < 0) {
            reached = false;
            break;
        }

        TokenId result = v.push_merge(best.l, best.r, stage);
        uint64_t key = pair_key(best.l, best.r);
        touched.clear();
        if (auto it = st.where.find(key); it != st.where.end()) {
            touched.swap(it->second);
            st.where.erase(it);
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (uint32_t w : touched) {
            st.sub_pairs(w);
            rewrite(st.toks[w], best.l, best.r, result);
            st.add_pairs(w);
        }
        st.counts.erase(key);
    }
    return TrainResult{std::move(v), reached};
}

} // namespace

uint64_t alphabet_size(const WordStream& corpus) {
    return Vocabulary::kByteTokens + collect_multibyte(corpus).size();
}

TrainResult train_base(const WordStream& corpus, uint64_t target_size,
                       const TrainOptions& opt) {
    Vocabulary v = Vocabulary::from_alphabet(collect_multibyte(corpus));
    if (target_size < v.size())
        throw InvalidArgument("target_size " + std::to_string(target_size) +
                              " is below the alphabet size " + std::to_string(v.size()));
    return grow(std::move(v), corpus, target_size, 0, opt);
}

TrainResult extend_vocab(const Vocabulary& base, const WordStream& corpus,
                         uint64_t target_size, uint32_t stage,
                         const TrainOptions& opt) {
    if (target_size < base.size())
        throw InvalidArgument("target_size " + std::to_string(target_size) +
                              " is below the current vocabulary size " +
                              std::to_string(base.size()));
    if (stage <= base.max_stage())
        throw InvalidArgument("stage must exceed every existing stage tag");
    return grow(base, corpus, target_size, stage, opt);
}

} // namespace vexp::bpe
