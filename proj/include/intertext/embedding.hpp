#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "intertext/ngram.hpp"

namespace intertext {

struct VectorStore {
    size_t dimension = 0;
    std::unordered_map<std::string, std::vector<float>> vocab;

    const std::vector<float>* find(const std::string& word) const {
        auto it = vocab.find(word);
        return it == vocab.end() ? nullptr : &it->second;
    }
};

// word2vec text format: header "vocab_count dimension", then one
// "word v1 ... vd" line per word. Duplicates keep the first occurrence.
inline VectorStore load_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vector file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty vector file");
    std::istringstream header(line);
    long long count = -1, dim = -1;
    if (!(header >> count >> dim) || count < 0 || dim <= 0)
        throw std::runtime_error(path + ": malformed header at line 1");

    VectorStore store;
    store.dimension = static_cast<size_t>(dim);
    store.vocab.reserve(static_cast<size_t>(count));
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        std::vector<float> vec(store.dimension);
        for (size_t i = 0; i < store.dimension; ++i) {
            if (!(ls >> vec[i]))
                throw std::runtime_error(path + ": dimension mismatch at line " +
                                         std::to_string(lineno));
            if (!std::isfinite(vec[i]))
                throw std::runtime_error(path + ": non-finite component at line " +
                                         std::to_string(lineno));
        }
        float extra;
        if (ls >> extra)
            throw std::runtime_error(path + ": dimension mismatch at line " +
                                     std::to_string(lineno));
        store.vocab.emplace(std::move(word), std::move(vec));
    }
    return store;
}

// Row matrix of n-gram embeddings with precomputed L2 norms. Zero-norm
// rows are never stored.
struct NGramMatrix {
    std::string doc_id;
    size_t m = 0;
    size_t d = 0;
    std::vector<float> rows;   // m*d, row-major
    std::vector<float> norms;  // m

    const float* row(size_t i) const { return rows.data() + i * d; }
};

// Sum of the in-vocabulary word vectors; absent when nothing is in
// vocabulary or the sum is the zero vector.
inline std::optional<std::vector<float>> embed_ngram(const NGram& ngram,
                                                     const VectorStore& store) {
    std::vector<float> sum(store.dimension, 0.0f);
    bool any = false;
    for (const auto& w : ngram.words) {
        if (const auto* v = store.find(w)) {
            for (size_t i = 0; i < store.dimension; ++i) sum[i] += (*v)[i];
            any = true;
        }
    }
    if (!any) return std::nullopt;
    double sq = 0.0;
    for (float x : sum) sq += static_cast<double>(x) * x;
    if (sq == 0.0) return std::nullopt;
    return sum;
}

inline NGramMatrix embed_document(const std::vector<NGram>& ngrams, const VectorStore& store,
                                  std::string doc_id = {}) {
    NGramMatrix mat;
    mat.doc_id = std::move(doc_id);
    mat.d = store.dimension;
    for (const auto& g : ngrams) {
        auto v = embed_ngram(g, store);
        if (!v) continue;
        mat.rows.insert(mat.rows.end(), v->begin(), v->end());
        double sq = 0.0;
        for (float x : *v) sq += static_cast<double>(x) * x;
        mat.norms.push_back(static_cast<float>(std::sqrt(sq)));
        ++mat.m;
    }
    return mat;
}

// NGMX binary format, little-endian: "NGMX", u32 version=1, u32 m,
// u32 d, m*d float32 row-major, m float32 norms.
inline void save_ngmx(const NGramMatrix& mat, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write matrix file: " + path);
    out.write("NGMX", 4);
    auto put_u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    put_u32(1);
    put_u32(static_cast<uint32_t>(mat.m));
    put_u32(static_cast<uint32_t>(mat.d));
    out.write(reinterpret_cast<const char*>(mat.rows.data()),
              static_cast<std::streamsize>(mat.rows.size() * sizeof(float)));
    out.write(reinterpret_cast<const char*>(mat.norms.data()),
              static_cast<std::streamsize>(mat.norms.size() * sizeof(float)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline NGramMatrix load_ngmx(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open matrix file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "NGMX", 4) != 0)
        throw std::runtime_error(path + ": not an NGMX file");
    auto get_u32 = [&]() {
        uint32_t v;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    uint32_t version = get_u32();
    if (version != 1) throw std::runtime_error(path + ": unsupported NGMX version");
    NGramMatrix mat;
    mat.m = get_u32();
    mat.d = get_u32();
    mat.rows.resize(mat.m * mat.d);
    mat.norms.resize(mat.m);
    in.read(reinterpret_cast<char*>(mat.rows.data()),
            static_cast<std::streamsize>(mat.rows.size() * sizeof(float)));
    in.read(reinterpret_cast<char*>(mat.norms.data()),
            static_cast<std::streamsize>(mat.norms.size() * sizeof(float)));
    if (!in) throw std::runtime_error(path + ": truncated NGMX file");
    return mat;
}

}  // namespace intertext
