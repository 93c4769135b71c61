#pragma once

// Corpus generators and scratch-dir helpers shared by the test binaries.
// Generators are deterministic in the seed so every failure is replayable.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "vexp/bpe.hpp"
#include "vexp/corpus.hpp"
#include "vexp/rng.hpp"

namespace testsup {

inline vexp::bpe::TrainOptions min_pairs(int64_t n) {
    vexp::bpe::TrainOptions o;
    o.min_pair_count = n;
    return o;
}

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<uint64_t> n{0};
        path = std::filesystem::temp_directory_path() /
               ("vexp_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(n.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Space-separated words, |alphabet| <= 8 ('a'..'h'), <= max_words occurrences.
// Short words over a tiny alphabet force heavy pair collisions and ties.
inline std::string small_corpus(vexp::Rng& rng, size_t max_words = 200) {
    size_t alpha = 1 + rng.below(8);
    size_t words = 1 + rng.below(max_words);
    // A small pool of word shapes keeps duplicate words frequent.
    size_t pool = 1 + rng.below(24);
    std::vector<std::string> shapes;
    shapes.reserve(pool);
    for (size_t i = 0; i < pool; ++i) {
        size_t len = 1 + rng.below(8);
        std::string w;
        for (size_t j = 0; j < len; ++j) w.push_back(char('a' + rng.below(alpha)));
        shapes.push_back(w);
    }
    std::string text;
    for (size_t i = 0; i < words; ++i) {
        if (i) text.push_back(' ');
        text += shapes[rng.below(pool)];
    }
    return text;
}

namespace detail {

inline void append_cp(std::string& s, char32_t cp) {
    if (cp < 0x80) {
        s.push_back(char(cp));
    } else if (cp < 0x800) {
        s.push_back(char(0xC0 | (cp >> 6)));
        s.push_back(char(0x80 | (cp & 0x3F)));
    } else {
        s.push_back(char(0xE0 | (cp >> 12)));
        s.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        s.push_back(char(0x80 | (cp & 0x3F)));
    }
}

inline std::string cps(std::initializer_list<char32_t> list) {
    std::string s;
    for (char32_t cp : list) append_cp(s, cp);
    return s;
}

// Zipf-like sampler over a fixed lexicon: weight 1/(rank+3)^1.1.
struct ZipfLexicon {
    std::vector<std::string> forms;
    std::vector<double> cumulative;

    explicit ZipfLexicon(std::vector<std::string> f) : forms(std::move(f)) {
        cumulative.reserve(forms.size());
        double acc = 0;
        for (size_t r = 0; r < forms.size(); ++r) {
            acc += 1.0 / std::pow(double(r) + 3.0, 1.1);
            cumulative.push_back(acc);
        }
    }
    const std::string& draw(std::mt19937_64& g) const {
        double u = std::uniform_real_distribution<double>(0.0, cumulative.back())(g);
        size_t lo = std::lower_bound(cumulative.begin(), cumulative.end(), u) -
                    cumulative.begin();
        return forms[std::min(lo, forms.size() - 1)];
    }
};

} // namespace detail

// Morphology-rich Arabic text: function words plus root-and-pattern stems
// with clitic prefixes and suffixes, Zipf-distributed. Shared affixes give
// the trainer genuinely frequent pairs, like real Arabic.
inline std::string synthetic_arabic(uint64_t seed, size_t n_words) {
    using detail::cps;
    std::mt19937_64 g(seed);

    static const char32_t letters[] = {0x0628, 0x062A, 0x062C, 0x062D, 0x062F, 0x0631,
                                       0x0633, 0x0634, 0x0635, 0x0637, 0x0639, 0x0641,
                                       0x0642, 0x0643, 0x0644, 0x0645, 0x0646, 0x0647};
    std::vector<std::string> forms = {
        // high-frequency function words
        cps({0x0641, 0x064A}),                  // fi
        cps({0x0645, 0x0646}),                  // min
        cps({0x0639, 0x0644, 0x0649}),          // ala
        cps({0x0625, 0x0644, 0x0649}),          // ila
        cps({0x0623, 0x0646}),                  // anna
        cps({0x0644, 0x0627}),                  // la
        cps({0x0645, 0x0627}),                  // ma
        cps({0x0647, 0x0630, 0x0627}),          // hatha
        cps({0x0643, 0x0627, 0x0646}),          // kana
        cps({0x0645, 0x0639}),                  // maa
        cps({0x0642, 0x062F}),                  // qad
        cps({0x0630, 0x0644, 0x0643}),          // thalika
    };
    // Root-and-pattern stems.
    for (int r = 0; r < 48; ++r) {
        char32_t c1 = letters[g() % std::size(letters)];
        char32_t c2 = letters[g() % std::size(letters)];
        char32_t c3 = letters[g() % std::size(letters)];
        forms.push_back(cps({c1, c2, c3}));
        forms.push_back(cps({c1, c2, 0x0627, c3}));            // CvCaC
        forms.push_back(cps({0x0645, c1, c2, c3}));            // maCCC
        forms.push_back(cps({c1, c2, c3, 0x0629}));            // CCC + ta marbuta
        forms.push_back(cps({0x062A, c1, c2, 0x064A, c3}));    // taCCiC
        forms.push_back(cps({c1, c2, 0x0648, c3}));            // CCuC
    }
    detail::ZipfLexicon lex(std::move(forms));

    const std::string al = cps({0x0627, 0x0644});   // definite article
    const std::string wa = cps({0x0648});           // conjunction
    const std::string bi = cps({0x0628});
    static const std::string suffixes[] = {cps({0x0627, 0x062A}), cps({0x0648, 0x0646}),
                                           cps({0x0647, 0x0627}), cps({0x0647, 0x0645}),
                                           cps({0x064A, 0x0646})};

    std::string text;
    text.reserve(n_words * 8);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (size_t i = 0; i < n_words; ++i) {
        if (i) text.push_back(' ');
        std::string w = lex.draw(g);
        double p = u01(g);
        if (p < 0.22) w = al + w;
        else if (p < 0.30) w = wa + w;
        else if (p < 0.34) w = bi + w;
        if (u01(g) < 0.18) w += suffixes[g() % std::size(suffixes)];
        text += w;
    }
    return text;
}

inline std::string synthetic_english(uint64_t seed, size_t n_words) {
    std::mt19937_64 g(seed);
    std::vector<std::string> forms = {"the", "of",  "and", "to",  "in", "is",
                                      "was", "for", "that", "with", "as", "on"};
    static const char* onsets[] = {"st", "pr", "tr", "gr", "bl", "m", "s", "c", "d", "r"};
    static const char* nuclei[] = {"a", "e", "i", "o", "u", "ea", "ou"};
    static const char* codas[] = {"t", "n", "nd", "rk", "st", "m", "p", "ck"};
    for (int i = 0; i < 220; ++i) {
        std::string stem = std::string(onsets[g() % std::size(onsets)]) +
                           nuclei[g() % std::size(nuclei)] + codas[g() % std::size(codas)];
        if (g() % 2) stem += std::string(nuclei[g() % std::size(nuclei)]) +
                             codas[g() % std::size(codas)];
        forms.push_back(stem);
    }
    detail::ZipfLexicon lex(std::move(forms));
    static const char* suffixes[] = {"s", "ed", "ing", "er", "tion"};

    std::string text;
    text.reserve(n_words * 7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (size_t i = 0; i < n_words; ++i) {
        if (i) text.push_back(' ');
        std::string w = lex.draw(g);
        if (w.size() > 4 && u01(g) < 0.25) w += suffixes[g() % std::size(suffixes)];
        text += w;
    }
    return text;
}

inline std::string synthetic_mathcode(uint64_t seed, size_t n_words) {
    std::mt19937_64 g(seed);
    static const char* toks[] = {"x",   "y",    "n",   "i",  "0",  "1",  "2",  "42",
                                 "(",   ")",    "{",   "}",  "=",  "+",  "*",  "==",
                                 "if",  "for",  "int", "return", "f(x)", "a[i]", ";", "<="};
    std::string text;
    text.reserve(n_words * 4);
    for (size_t i = 0; i < n_words; ++i) {
        if (i) text.push_back(' ');
        text += toks[g() % std::size(toks)];
    }
    return text;
}

// Splits running text into documents of 20..60 words each.
inline std::vector<vexp::Document> docs_from_text(const std::string& text,
                                                  vexp::LangClass lang,
                                                  const std::string& id_prefix,
                                                  uint64_t seed) {
    std::vector<std::string> words;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t sp = text.find(' ', pos);
        if (sp == std::string::npos) sp = text.size();
        if (sp > pos) words.push_back(text.substr(pos, sp - pos));
        pos = sp + 1;
    }
    std::mt19937_64 g(seed);
    std::vector<vexp::Document> docs;
    size_t i = 0, k = 0;
    while (i < words.size()) {
        size_t len = 20 + g() % 41;
        std::string body;
        for (size_t j = i; j < std::min(i + len, words.size()); ++j) {
            if (j > i) body.push_back(' ');
            body += words[j];
        }
        docs.push_back({id_prefix + "-" + std::to_string(k++), lang, body});
        i += len;
    }
    return docs;
}

inline size_t word_count(const std::string& text) {
    size_t n = 0;
    bool in_word = false;
    for (char c : text) {
        if (c == ' ') {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++n;
        }
    }
    return n;
}

} // namespace testsup
