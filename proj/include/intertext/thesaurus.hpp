#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "intertext/embedding.hpp"

namespace intertext {

// Words co-listed in a thesaurus entry are connected; symmetric, no
// self-edges.
struct ThesaurusGraph {
    std::unordered_map<std::string, std::unordered_set<std::string>> adjacency;

    bool connected(const std::string& a, const std::string& b) const {
        auto it = adjacency.find(a);
        return it != adjacency.end() && it->second.count(b) != 0;
    }
};

struct HitReport {
    size_t k = 0;
    size_t evaluated_words = 0;
    int64_t total_hits = 0;
    std::unordered_map<std::string, int64_t> per_word_hits;
};

inline ThesaurusGraph build_thesaurus_graph(const std::vector<std::vector<std::string>>& entries) {
    ThesaurusGraph g;
    for (const auto& entry : entries) {
        for (const auto& w : entry) g.adjacency.try_emplace(w);
        for (size_t i = 0; i < entry.size(); ++i)
            for (size_t j = i + 1; j < entry.size(); ++j) {
                if (entry[i] == entry[j]) continue;
                g.adjacency[entry[i]].insert(entry[j]);
                g.adjacency[entry[j]].insert(entry[i]);
            }
    }
    return g;
}

// One entry per line, words space-separated.
inline ThesaurusGraph load_thesaurus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open thesaurus file: " + path);
    std::vector<std::vector<std::string>> entries;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> words;
        std::string w;
        while (ls >> w) words.push_back(w);
        if (!words.empty()) entries.push_back(std::move(words));
    }
    return build_thesaurus_graph(entries);
}

// Exact kNN hit counting: for every word in both the store and the
// graph, the k nearest in-vocabulary words by cosine (self excluded,
// ties lexicographic) are checked for thesaurus adjacency.
inline HitReport knn_hits(const VectorStore& store, const ThesaurusGraph& graph, size_t k,
                          size_t workers = 1) {
    if (k == 0) throw std::invalid_argument("knn_hits: k must be >= 1");

    // Deterministic vocabulary order; normalized rows for cosine by dot.
    std::vector<std::string> vocab;
    vocab.reserve(store.vocab.size());
    for (const auto& [w, v] : store.vocab) vocab.push_back(w);
    std::sort(vocab.begin(), vocab.end());
    const size_t nv = vocab.size();
    const size_t d = store.dimension;
    std::vector<float> unit(nv * d);
    for (size_t i = 0; i < nv; ++i) {
        const auto& v = store.vocab.at(vocab[i]);
        double sq = 0.0;
        for (float x : v) sq += static_cast<double>(x) * x;
        const double norm = std::sqrt(sq);
        for (size_t j = 0; j < d; ++j)
            unit[i * d + j] = norm > 0.0 ? static_cast<float>(v[j] / norm) : 0.0f;
    }

    std::vector<size_t> queries;
    for (size_t i = 0; i < nv; ++i)
        if (graph.adjacency.count(vocab[i])) queries.push_back(i);

    std::vector<int64_t> hits(queries.size(), 0);
    auto process = [&](size_t begin, size_t end) {
        using Cand = std::pair<double, size_t>;  // (similarity, vocab index)
        // "better" orders by similarity descending, then word ascending;
        // with it as the heap comparator the worst kept candidate is on top.
        auto better = [&](const Cand& a, const Cand& b) {
            if (a.first != b.first) return a.first > b.first;
            return vocab[a.second] < vocab[b.second];
        };
        for (size_t qi = begin; qi < end; ++qi) {
            const size_t q = queries[qi];
            const float* vq = unit.data() + q * d;
            std::priority_queue<Cand, std::vector<Cand>, decltype(better)> heap(better);
            for (size_t i = 0; i < nv; ++i) {
                if (i == q) continue;
                double dot = 0.0;
                const float* vi = unit.data() + i * d;
                for (size_t j = 0; j < d; ++j) dot += static_cast<double>(vq[j]) * vi[j];
                Cand c{dot, i};
                if (heap.size() < k) {
                    heap.push(c);
                } else if (better(c, heap.top())) {
                    heap.pop();
                    heap.push(c);
                }
            }
            const auto& adj = graph.adjacency.at(vocab[q]);
            int64_t h = 0;
            while (!heap.empty()) {
                if (adj.count(vocab[heap.top().second])) ++h;
                heap.pop();
            }
            hits[qi] = h;
        }
    };

    const size_t nworkers = std::max<size_t>(1, std::min(workers, queries.size()));
    if (nworkers <= 1) {
        process(0, queries.size());
    } else {
        std::vector<std::thread> pool;
        const size_t per = (queries.size() + nworkers - 1) / nworkers;
        for (size_t w = 0; w < nworkers; ++w)
            pool.emplace_back(process, w * per, std::min(queries.size(), (w + 1) * per));
        for (auto& t : pool) t.join();
    }

    HitReport report;
    report.k = k;
    report.evaluated_words = queries.size();
    for (size_t qi = 0; qi < queries.size(); ++qi) {
        report.per_word_hits[vocab[queries[qi]]] = hits[qi];
        report.total_hits += hits[qi];
    }
    return report;
}

}  // namespace intertext
