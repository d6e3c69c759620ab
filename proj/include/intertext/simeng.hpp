#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "intertext/embedding.hpp"

namespace intertext {

enum class ChunkMode { ExactWeighted, PaperSimpleMean };

struct SimilarityParams {
    double tau = 0.2;            // threshold, strict |cosine| > tau
    size_t block_rows = 4096;    // tile height over B
    size_t chunk_ngrams = 0;     // 0 = no chunking
    ChunkMode chunk_mode = ChunkMode::ExactWeighted;
};

// Mean of the thresholded signed cosines; -1 when nothing qualifies.
// Consumers must test qualifying_pairs, not the value, since -1 is an
// attainable true score.
struct IntertextualityScore {
    double value = -1.0;
    int64_t qualifying_pairs = 0;
    int64_t total_pairs = 0;

    bool has_pairs() const { return qualifying_pairs > 0; }
};

namespace detail {

struct PartialSums {
    double sum = 0.0;
    int64_t count = 0;
};

using MatrixMap =
    Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// One (A rows x B tile) pass: sgemm the tile, then threshold and
// accumulate in 64-bit. The full m_A x m_B matrix is never held.
inline PartialSums accumulate_tiles(const NGramMatrix& a, const NGramMatrix& b, double tau,
                                    size_t block_rows) {
    MatrixMap ma(a.rows.data(), static_cast<Eigen::Index>(a.m), static_cast<Eigen::Index>(a.d));
    MatrixMap mb(b.rows.data(), static_cast<Eigen::Index>(b.m), static_cast<Eigen::Index>(b.d));

    // A is also tiled so the product buffer stays cache-resident.
    constexpr size_t kARows = 512;
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> prod;

    PartialSums total;
    for (size_t b0 = 0; b0 < b.m; b0 += block_rows) {
        const size_t bn = std::min(block_rows, b.m - b0);
        for (size_t a0 = 0; a0 < a.m; a0 += kARows) {
            const size_t an = std::min(kARows, a.m - a0);
            prod.noalias() =
                ma.middleRows(static_cast<Eigen::Index>(a0), static_cast<Eigen::Index>(an)) *
                mb.middleRows(static_cast<Eigen::Index>(b0), static_cast<Eigen::Index>(bn))
                    .transpose();
            PartialSums tile;
            for (size_t i = 0; i < an; ++i) {
                const float na = a.norms[a0 + i];
                const float* p = prod.data() + i * bn;
                for (size_t j = 0; j < bn; ++j) {
                    const double cos =
                        static_cast<double>(p[j]) / (static_cast<double>(na) * b.norms[b0 + j]);
                    if (std::fabs(cos) > tau) {
                        tile.sum += cos;
                        ++tile.count;
                    }
                }
            }
            total.sum += tile.sum;
            total.count += tile.count;
        }
    }
    return total;
}

inline IntertextualityScore finish(const PartialSums& p, int64_t total_pairs) {
    IntertextualityScore s;
    s.total_pairs = total_pairs;
    s.qualifying_pairs = p.count;
    s.value = p.count > 0 ? p.sum / static_cast<double>(p.count) : -1.0;
    return s;
}

}  // namespace detail

// Blocked vectorized evaluation of the thresholded mean cosine between
// two n-gram matrices.
inline IntertextualityScore intertextuality(const NGramMatrix& a, const NGramMatrix& b,
                                            const SimilarityParams& params = {}) {
    if (a.m > 0 && b.m > 0 && a.d != b.d)
        throw std::invalid_argument("dimension mismatch between n-gram matrices");
    if (params.block_rows == 0) throw std::invalid_argument("block_rows must be >= 1");
    const int64_t total = static_cast<int64_t>(a.m) * static_cast<int64_t>(b.m);
    if (total == 0) return detail::finish({}, 0);
    return detail::finish(detail::accumulate_tiles(a, b, params.tau, params.block_rows), total);
}

// Nested-loop reference: per-pair cosine from explicit dot and norms,
// all in 64-bit float. Intended for small inputs and as ground truth.
inline IntertextualityScore brute_force_oracle(const NGramMatrix& a, const NGramMatrix& b,
                                               double tau) {
    if (a.m > 0 && b.m > 0 && a.d != b.d)
        throw std::invalid_argument("dimension mismatch between n-gram matrices");
    detail::PartialSums p;
    for (size_t i = 0; i < a.m; ++i) {
        const float* ra = a.row(i);
        for (size_t j = 0; j < b.m; ++j) {
            const float* rb = b.row(j);
            double dot = 0.0, sqa = 0.0, sqb = 0.0;
            for (size_t k = 0; k < a.d; ++k) {
                dot += static_cast<double>(ra[k]) * rb[k];
                sqa += static_cast<double>(ra[k]) * ra[k];
                sqb += static_cast<double>(rb[k]) * rb[k];
            }
            const double cos = dot / std::sqrt(sqa * sqb);
            if (std::fabs(cos) > tau) {
                p.sum += cos;
                ++p.count;
            }
        }
    }
    return detail::finish(p, static_cast<int64_t>(a.m) * static_cast<int64_t>(b.m));
}

namespace detail {

inline NGramMatrix slice_rows(const NGramMatrix& src, size_t r0, size_t rn) {
    NGramMatrix out;
    out.doc_id = src.doc_id;
    out.d = src.d;
    out.m = rn;
    out.rows.assign(src.rows.begin() + r0 * src.d, src.rows.begin() + (r0 + rn) * src.d);
    out.norms.assign(src.norms.begin() + r0, src.norms.begin() + r0 + rn);
    return out;
}

}  // namespace detail

// Sub-document evaluation: both inputs are partitioned row-wise into
// chunks of at most chunk_ngrams rows and every sub-pair is scored.
// ExactWeighted recombines as (sum S_ij)/(sum c_ij), which equals the
// unchunked score; PaperSimpleMean averages sub-pair values directly,
// skipping sub-pairs with no qualifying pair.
inline IntertextualityScore intertextuality_chunked(const NGramMatrix& a, const NGramMatrix& b,
                                                    const SimilarityParams& params) {
    if (params.chunk_ngrams == 0) throw std::invalid_argument("chunk_ngrams must be > 0");
    if (a.m > 0 && b.m > 0 && a.d != b.d)
        throw std::invalid_argument("dimension mismatch between n-gram matrices");
    const int64_t total = static_cast<int64_t>(a.m) * static_cast<int64_t>(b.m);
    if (total == 0) return detail::finish({}, 0);

    detail::PartialSums combined;
    double value_sum = 0.0;
    int64_t scored_subpairs = 0;
    for (size_t a0 = 0; a0 < a.m; a0 += params.chunk_ngrams) {
        const size_t an = std::min(params.chunk_ngrams, a.m - a0);
        NGramMatrix ca = detail::slice_rows(a, a0, an);
        for (size_t b0 = 0; b0 < b.m; b0 += params.chunk_ngrams) {
            const size_t bn = std::min(params.chunk_ngrams, b.m - b0);
            NGramMatrix cb = detail::slice_rows(b, b0, bn);
            auto part = detail::accumulate_tiles(ca, cb, params.tau, params.block_rows);
            combined.sum += part.sum;
            combined.count += part.count;
            if (part.count > 0) {
                value_sum += part.sum / static_cast<double>(part.count);
                ++scored_subpairs;
            }
        }
    }

    if (params.chunk_mode == ChunkMode::ExactWeighted) return detail::finish(combined, total);

    IntertextualityScore s;
    s.total_pairs = total;
    s.qualifying_pairs = combined.count;
    s.value = scored_subpairs > 0 ? value_sum / static_cast<double>(scored_subpairs) : -1.0;
    return s;
}

// Dispatches on chunk_ngrams so callers can pass one parameter set.
inline IntertextualityScore score_pair(const NGramMatrix& a, const NGramMatrix& b,
                                       const SimilarityParams& params) {
    if (params.chunk_ngrams > 0 &&
        (a.m > params.chunk_ngrams || b.m > params.chunk_ngrams))
        return intertextuality_chunked(a, b, params);
    return intertextuality(a, b, params);
}

}  // namespace intertext
