#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "intertext/pipeline.hpp"

namespace intertext {

enum class GraphMode { Directed, Undirected };

struct GraphNode {
    std::string doc_id;
    std::string title;
    std::string author;
    std::optional<int> year;
};

struct GraphEdge {
    size_t from = 0;
    size_t to = 0;
    double weight = 0.0;
};

// Document graph. Directed edges always point from the chronologically
// later work to the earlier one.
struct WeightedDocGraph {
    GraphMode mode = GraphMode::Undirected;
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    std::vector<std::string> warnings;  // e.g. equal-year pairs dropped

    size_t node_count() const { return nodes.size(); }

    size_t index_of(const std::string& doc_id) const {
        for (size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].doc_id == doc_id) return i;
        throw std::out_of_range("unknown doc_id: " + doc_id);
    }

    // adjacency[u] lists (v, w) for edges u->v; undirected graphs list
    // both endpoints.
    std::vector<std::vector<std::pair<size_t, double>>> out_adjacency() const {
        std::vector<std::vector<std::pair<size_t, double>>> adj(nodes.size());
        for (const auto& e : edges) {
            adj[e.from].emplace_back(e.to, e.weight);
            if (mode == GraphMode::Undirected) adj[e.to].emplace_back(e.from, e.weight);
        }
        return adj;
    }

    std::vector<std::vector<std::pair<size_t, double>>> in_adjacency() const {
        std::vector<std::vector<std::pair<size_t, double>>> adj(nodes.size());
        for (const auto& e : edges) {
            adj[e.to].emplace_back(e.from, e.weight);
            if (mode == GraphMode::Undirected) adj[e.from].emplace_back(e.to, e.weight);
        }
        return adj;
    }
};

struct CentralityResult {
    std::string algorithm;
    std::map<std::string, double> parameters;
    std::unordered_map<std::string, double> scores;
    size_t iterations = 0;
    bool converged = true;
};

struct Partition {
    std::unordered_map<std::string, int> labels;
    double modularity = 0.0;
};

// Edges with no qualifying pair or with value <= weight_floor are
// omitted. Directed mode orients later -> earlier; equal-year pairs are
// dropped from the directed view with a warning.
inline WeightedDocGraph build_graph(const EdgeTable& table,
                                    const std::vector<ManifestEntry>& manifest, GraphMode mode,
                                    double weight_floor = 0.0) {
    WeightedDocGraph g;
    g.mode = mode;
    std::unordered_map<std::string, size_t> index;
    for (const auto& e : manifest) {
        index.emplace(e.doc_id, g.nodes.size());
        g.nodes.push_back({e.doc_id, e.title, e.author, e.year});
    }
    for (const auto& rec : table.records) {
        if (rec.status != EdgeStatus::Ok) continue;
        if (rec.qualifying_pairs == 0 || rec.value <= weight_floor) continue;
        auto ia = index.find(rec.doc_id_a);
        auto ib = index.find(rec.doc_id_b);
        if (ia == index.end() || ib == index.end())
            throw std::runtime_error("edge references doc_id missing from manifest: " +
                                     (ia == index.end() ? rec.doc_id_a : rec.doc_id_b));
        size_t u = ia->second, v = ib->second;
        if (mode == GraphMode::Directed) {
            const auto& yu = g.nodes[u].year;
            const auto& yv = g.nodes[v].year;
            if (!yu) throw std::runtime_error("missing year for document " + g.nodes[u].doc_id);
            if (!yv) throw std::runtime_error("missing year for document " + g.nodes[v].doc_id);
            if (*yu == *yv) {
                g.warnings.push_back("equal-year pair dropped: " + g.nodes[u].doc_id + " / " +
                                     g.nodes[v].doc_id);
                continue;
            }
            if (*yu < *yv) std::swap(u, v);  // from later to earlier
        }
        g.edges.push_back({u, v, rec.value});
    }
    return g;
}

namespace detail {

inline CentralityResult make_result(const WeightedDocGraph& g, std::string name,
                                    const std::vector<double>& scores) {
    CentralityResult r;
    r.algorithm = std::move(name);
    for (size_t i = 0; i < g.nodes.size(); ++i) r.scores[g.nodes[i].doc_id] = scores[i];
    return r;
}

}  // namespace detail

// Weighted power iteration with per-node out-weight normalization and
// uniform dangling-node redistribution. damping = 1.0 is the undamped
// variant.
inline CentralityResult pagerank(const WeightedDocGraph& g, double damping = 0.85,
                                 double tol = 1e-12, size_t max_iter = 10000) {
    const size_t n = g.node_count();
    if (n == 0) throw std::invalid_argument("pagerank: empty graph");
    if (damping <= 0.0 || damping > 1.0)
        throw std::invalid_argument("pagerank: damping must be in (0, 1]");

    auto out = g.out_adjacency();
    std::vector<double> out_weight(n, 0.0);
    for (size_t u = 0; u < n; ++u)
        for (auto& [v, w] : out[u]) out_weight[u] += w;

    std::vector<double> x(n, 1.0 / static_cast<double>(n)), next(n);
    size_t iter = 0;
    bool converged = false;
    for (; iter < max_iter; ++iter) {
        double dangling = 0.0;
        for (size_t u = 0; u < n; ++u)
            if (out_weight[u] == 0.0) dangling += x[u];
        const double base = (1.0 - damping) / static_cast<double>(n) +
                            damping * dangling / static_cast<double>(n);
        std::fill(next.begin(), next.end(), base);
        for (size_t u = 0; u < n; ++u) {
            if (out_weight[u] == 0.0) continue;
            const double share = damping * x[u] / out_weight[u];
            for (auto& [v, w] : out[u]) next[v] += share * w;
        }
        double delta = 0.0;
        for (size_t i = 0; i < n; ++i) delta += std::fabs(next[i] - x[i]);
        x.swap(next);
        if (delta < tol) {
            converged = true;
            ++iter;
            break;
        }
    }
    auto r = detail::make_result(g, "pagerank", x);
    r.parameters["damping"] = damping;
    r.iterations = iter;
    r.converged = converged;
    return r;
}

// Power iteration on the weighted adjacency, incoming-edge convention,
// L2-normalized.
inline CentralityResult eigenvector_centrality(const WeightedDocGraph& g, double tol = 1e-10,
                                               size_t max_iter = 1000) {
    const size_t n = g.node_count();
    if (n == 0) throw std::invalid_argument("eigenvector_centrality: empty graph");
    auto in = g.in_adjacency();

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
    size_t iter = 0;
    for (; iter < max_iter; ++iter) {
        for (size_t v = 0; v < n; ++v) {
            double s = 0.0;
            for (auto& [u, w] : in[v]) s += w * x[u];
            next[v] = s;
        }
        double norm = std::sqrt(
            std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
        if (norm == 0.0)
            throw std::runtime_error("eigenvector_centrality: zero vector, did not converge");
        for (auto& v : next) v /= norm;
        double delta = 0.0;
        for (size_t i = 0; i < n; ++i) delta += std::fabs(next[i] - x[i]);
        x.swap(next);
        if (delta < tol) {
            auto r = detail::make_result(g, "eigenvector", x);
            r.iterations = iter + 1;
            return r;
        }
    }
    throw std::runtime_error("eigenvector_centrality: did not converge in " +
                             std::to_string(max_iter) + " iterations");
}

namespace detail {

// Laplacian energy: sum of squared weighted degrees plus twice the sum
// of squared edge weights, over the undirected/symmetrized view.
inline double laplacian_energy(const std::vector<double>& degree,
                               const std::vector<GraphEdge>& edges) {
    double e = 0.0;
    for (double d : degree) e += d * d;
    for (const auto& ed : edges) e += 2.0 * ed.weight * ed.weight;
    return e;
}

}  // namespace detail

// Relative drop in Laplacian energy when the node is removed.
inline CentralityResult laplacian_centrality(const WeightedDocGraph& g) {
    const size_t n = g.node_count();
    if (n == 0) throw std::invalid_argument("laplacian_centrality: empty graph");

    std::vector<double> degree(n, 0.0);
    for (const auto& e : g.edges) {
        degree[e.from] += e.weight;
        degree[e.to] += e.weight;
    }
    const double full = detail::laplacian_energy(degree, g.edges);

    std::vector<double> scores(n, 0.0);
    if (full > 0.0) {
        for (size_t v = 0; v < n; ++v) {
            std::vector<double> deg = degree;
            std::vector<GraphEdge> kept;
            kept.reserve(g.edges.size());
            for (const auto& e : g.edges) {
                if (e.from == v || e.to == v) {
                    deg[e.from == v ? e.to : e.from] -= e.weight;
                } else {
                    kept.push_back(e);
                }
            }
            deg[v] = 0.0;
            scores[v] = (full - detail::laplacian_energy(deg, kept)) / full;
        }
    }
    return detail::make_result(g, "laplacian", scores);
}

namespace detail {

// Single-source shortest distances with dist = 1/weight; for directed
// graphs paths follow edges toward the source (incoming convention).
inline std::vector<double> shortest_to(const WeightedDocGraph& g,
                                       const std::vector<std::vector<std::pair<size_t, double>>>& rev,
                                       size_t source) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.node_count(), inf);
    using Item = std::pair<double, size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0.0;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (auto& [v, w] : rev[u]) {
            const double nd = d + 1.0 / w;
            if (nd < dist[v]) {
                dist[v] = nd;
                pq.emplace(nd, v);
            }
        }
    }
    return dist;
}

}  // namespace detail

// Closeness with the standard disconnected-component correction
// (reachable-1)/(N-1).
inline CentralityResult closeness_centrality(const WeightedDocGraph& g) {
    const size_t n = g.node_count();
    if (n == 0) throw std::invalid_argument("closeness_centrality: empty graph");
    auto rev = g.in_adjacency();
    std::vector<double> scores(n, 0.0);
    for (size_t u = 0; u < n; ++u) {
        auto dist = detail::shortest_to(g, rev, u);
        double sum = 0.0;
        size_t reachable = 0;
        for (size_t v = 0; v < n; ++v) {
            if (v == u || std::isinf(dist[v])) continue;
            sum += dist[v];
            ++reachable;
        }
        if (reachable > 0 && sum > 0.0 && n > 1) {
            const double frac = static_cast<double>(reachable) / static_cast<double>(n - 1);
            scores[u] = frac * static_cast<double>(reachable) / sum;
        }
    }
    auto r = detail::make_result(g, "closeness", scores);
    r.parameters["distance"] = 0.0;  // dist = 1/weight, recorded for output metadata
    return r;
}

inline CentralityResult harmonic_centrality(const WeightedDocGraph& g) {
    const size_t n = g.node_count();
    if (n == 0) throw std::invalid_argument("harmonic_centrality: empty graph");
    auto rev = g.in_adjacency();
    std::vector<double> scores(n, 0.0);
    for (size_t u = 0; u < n; ++u) {
        auto dist = detail::shortest_to(g, rev, u);
        double s = 0.0;
        for (size_t v = 0; v < n; ++v)
            if (v != u && !std::isinf(dist[v])) s += 1.0 / dist[v];
        scores[u] = s;
    }
    return detail::make_result(g, "harmonic", scores);
}

namespace detail {

inline double modularity_of(const std::vector<std::vector<std::pair<size_t, double>>>& adj,
                            const std::vector<int>& community, double resolution) {
    const size_t n = adj.size();
    double two_m = 0.0;
    std::vector<double> degree(n, 0.0);
    for (size_t u = 0; u < n; ++u)
        for (auto& [v, w] : adj[u]) {
            degree[u] += w;
            two_m += w;
        }
    if (two_m == 0.0) return 0.0;
    double q = 0.0;
    for (size_t u = 0; u < n; ++u)
        for (auto& [v, w] : adj[u])
            if (community[u] == community[v])
                q += w - resolution * degree[u] * degree[v] / two_m;
    return q / two_m;
}

}  // namespace detail

inline double modularity(const WeightedDocGraph& g,
                         const std::unordered_map<std::string, int>& labels,
                         double resolution = 1.0) {
    std::vector<int> comm(g.node_count());
    for (size_t i = 0; i < g.node_count(); ++i) comm[i] = labels.at(g.nodes[i].doc_id);
    return detail::modularity_of(g.out_adjacency(), comm, resolution);
}

// Two-phase Louvain on the undirected weighted graph. The node visiting
// order is shuffled with the given seed so runs are reproducible.
inline Partition louvain(const WeightedDocGraph& g, double resolution = 1.0,
                         uint64_t seed = 0) {
    if (g.node_count() == 0) throw std::invalid_argument("louvain: empty graph");
    if (g.mode != GraphMode::Undirected)
        throw std::invalid_argument("louvain: undirected graph required");

    const size_t n0 = g.node_count();
    // community[i] tracks the final label of original node i across levels.
    std::vector<int> final_label(n0);
    std::iota(final_label.begin(), final_label.end(), 0);

    // Working graph as adjacency with self-loop weights.
    std::vector<std::vector<std::pair<size_t, double>>> adj = g.out_adjacency();
    std::vector<size_t> node_of(n0);  // original node -> current super-node
    std::iota(node_of.begin(), node_of.end(), 0);

    std::mt19937_64 rng(seed);

    while (true) {
        const size_t n = adj.size();
        std::vector<double> degree(n, 0.0), self_loop(n, 0.0);
        double two_m = 0.0;
        for (size_t u = 0; u < n; ++u)
            for (auto& [v, w] : adj[u]) {
                degree[u] += w;
                two_m += w;
                if (v == u) self_loop[u] += w;  // self-loops appear twice in adj
            }
        if (two_m == 0.0) break;

        std::vector<int> comm(n);
        std::iota(comm.begin(), comm.end(), 0);
        std::vector<double> comm_tot = degree;

        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);

        bool moved_any = false;
        bool improved = true;
        while (improved) {
            improved = false;
            for (size_t u : order) {
                const int cu = comm[u];
                // Weight from u to each neighbouring community.
                std::unordered_map<int, double> links;
                for (auto& [v, w] : adj[u])
                    if (v != u) links[comm[v]] += w;
                comm_tot[cu] -= degree[u];
                double best_gain = 0.0;
                int best = cu;
                const double base = links.count(cu) ? links[cu] : 0.0;
                const double base_gain =
                    base - resolution * comm_tot[cu] * degree[u] / two_m;
                for (auto& [c, w] : links) {
                    const double gain = w - resolution * comm_tot[c] * degree[u] / two_m;
                    if (gain - base_gain > best_gain + 1e-12) {
                        best_gain = gain - base_gain;
                        best = c;
                    }
                }
                comm_tot[best] += degree[u];
                comm[u] = best;
                if (best != cu) {
                    improved = true;
                    moved_any = true;
                }
            }
        }
        if (!moved_any) break;

        // Renumber communities densely and aggregate.
        std::unordered_map<int, int> renum;
        for (size_t u = 0; u < n; ++u)
            if (!renum.count(comm[u])) {
                int next = static_cast<int>(renum.size());
                renum[comm[u]] = next;
            }
        const size_t nc = renum.size();
        for (size_t i = 0; i < n0; ++i)
            final_label[i] = renum[comm[static_cast<size_t>(node_of[i])]];
        for (size_t i = 0; i < n0; ++i) node_of[i] = static_cast<size_t>(final_label[i]);

        std::vector<std::unordered_map<size_t, double>> agg(nc);
        for (size_t u = 0; u < n; ++u) {
            const size_t cu = static_cast<size_t>(renum[comm[u]]);
            for (auto& [v, w] : adj[u]) agg[cu][static_cast<size_t>(renum[comm[v]])] += w;
        }
        adj.assign(nc, {});
        for (size_t c = 0; c < nc; ++c)
            for (auto& [d, w] : agg[c]) adj[c].emplace_back(d, w);
        if (nc == n) break;
    }

    Partition p;
    for (size_t i = 0; i < n0; ++i) p.labels[g.nodes[i].doc_id] = final_label[i];
    p.modularity = modularity(g, p.labels, resolution);
    return p;
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace detail

inline void export_graphml(const WeightedDocGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graphml file: " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"title\" for=\"node\" attr.name=\"title\" attr.type=\"string\"/>\n"
        << "  <key id=\"author\" for=\"node\" attr.name=\"author\" attr.type=\"string\"/>\n"
        << "  <key id=\"year\" for=\"node\" attr.name=\"year\" attr.type=\"int\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <graph edgedefault=\""
        << (g.mode == GraphMode::Directed ? "directed" : "undirected") << "\">\n";
    for (const auto& n : g.nodes) {
        out << "    <node id=\"" << detail::xml_escape(n.doc_id) << "\">\n"
            << "      <data key=\"title\">" << detail::xml_escape(n.title) << "</data>\n"
            << "      <data key=\"author\">" << detail::xml_escape(n.author) << "</data>\n";
        if (n.year) out << "      <data key=\"year\">" << *n.year << "</data>\n";
        out << "    </node>\n";
    }
    for (const auto& e : g.edges) {
        out << "    <edge source=\"" << detail::xml_escape(g.nodes[e.from].doc_id)
            << "\" target=\"" << detail::xml_escape(g.nodes[e.to].doc_id) << "\">"
            << "<data key=\"weight\">" << e.weight << "</data></edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

}  // namespace intertext
