#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "intertext/normalizer.hpp"

namespace intertext {

struct StopList {
    std::unordered_set<std::string> words;
    size_t size = 500;

    bool contains(const std::string& w) const { return words.count(w) != 0; }

    static StopList load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open stoplist: " + path);
        StopList sl;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) sl.words.insert(line);
        }
        sl.size = sl.words.size();
        return sl;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write stoplist: " + path);
        std::vector<std::string> sorted(words.begin(), words.end());
        std::sort(sorted.begin(), sorted.end());
        for (const auto& w : sorted) out << w << '\n';
    }
};

struct NGram {
    std::vector<std::string> words;
    size_t source_offset = 0;
};

// Highest-count lemmas, ties broken lexicographically ascending.
inline StopList build_stoplist(const std::unordered_map<std::string, size_t>& frequencies,
                               size_t size) {
    std::vector<std::pair<std::string, size_t>> items(frequencies.begin(), frequencies.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    StopList sl;
    sl.size = size;
    for (size_t i = 0; i < items.size() && i < size; ++i) sl.words.insert(items[i].first);
    return sl;
}

inline void count_frequencies(const std::vector<std::string>& tokens,
                              std::unordered_map<std::string, size_t>& freq) {
    for (const auto& t : tokens) ++freq[t];
}

// All overlapping windows of length n; a window is dropped iff a strict
// majority of its words are in the stop-list.
inline std::vector<NGram> extract_ngrams(const std::vector<std::string>& tokens, size_t n,
                                         const StopList& stoplist) {
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    std::vector<NGram> out;
    if (tokens.size() < n) return out;
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
        size_t stopped = 0;
        for (size_t j = 0; j < n; ++j)
            if (stoplist.contains(tokens[i + j])) ++stopped;
        if (2 * stopped > n) continue;
        NGram g;
        g.source_offset = i;
        g.words.assign(tokens.begin() + i, tokens.begin() + i + n);
        out.push_back(std::move(g));
    }
    return out;
}

inline std::vector<NGram> extract_ngrams(const NormalizedDocument& doc, size_t n,
                                         const StopList& stoplist) {
    return extract_ngrams(doc.tokens, n, stoplist);
}

}  // namespace intertext
