#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "intertext/embedding.hpp"
#include "intertext/ngram.hpp"
#include "intertext/normalizer.hpp"
#include "intertext/simeng.hpp"

namespace intertext {

struct ManifestEntry {
    std::string doc_id;
    std::string path;
    std::string title;
    std::string author;
    std::optional<int> year;
};

enum class EdgeStatus { Ok, Failed };

struct EdgeRecord {
    std::string doc_id_a;  // doc_id_a < doc_id_b lexicographically
    std::string doc_id_b;
    double value = -1.0;
    int64_t qualifying_pairs = 0;
    int64_t total_pairs = 0;
    EdgeStatus status = EdgeStatus::Ok;
    std::string reason;  // only for failed pairs
};

struct EdgeTable {
    std::vector<EdgeRecord> records;

    void sort() {
        std::sort(records.begin(), records.end(), [](const EdgeRecord& a, const EdgeRecord& b) {
            if (a.doc_id_a != b.doc_id_a) return a.doc_id_a < b.doc_id_a;
            return a.doc_id_b < b.doc_id_b;
        });
    }
};

// Manifest: tab-separated with header "doc_id path title author year".
inline std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty manifest");
    std::vector<ManifestEntry> entries;
    std::unordered_set<std::string> ids;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (f.size() != 5)
            throw std::runtime_error(path + ": malformed manifest line " +
                                     std::to_string(lineno));
        ManifestEntry e;
        e.doc_id = f[0];
        e.path = f[1];
        e.title = f[2];
        e.author = f[3];
        if (!f[4].empty()) e.year = std::stoi(f[4]);
        if (!ids.insert(e.doc_id).second)
            throw std::runtime_error(path + ": duplicate doc_id '" + e.doc_id + "' at line " +
                                     std::to_string(lineno));
        entries.push_back(std::move(e));
    }
    return entries;
}

// Checkpoint line: "doc_a<TAB>doc_b<TAB>value<TAB>c<TAB>total<TAB>status[<TAB>reason]".
inline std::string format_edge_line(const EdgeRecord& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.doc_id_a << '\t' << r.doc_id_b << '\t' << r.value << '\t' << r.qualifying_pairs
       << '\t' << r.total_pairs << '\t' << (r.status == EdgeStatus::Ok ? "ok" : "failed");
    if (r.status == EdgeStatus::Failed) os << '\t' << r.reason;
    return os.str();
}

inline EdgeRecord parse_edge_line(const std::string& line, const std::string& path,
                                  size_t lineno) {
    std::vector<std::string> f;
    size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    if (f.size() < 6)
        throw std::runtime_error(path + ": corrupted checkpoint line " + std::to_string(lineno));
    EdgeRecord r;
    r.doc_id_a = f[0];
    r.doc_id_b = f[1];
    try {
        r.value = std::stod(f[2]);
        r.qualifying_pairs = std::stoll(f[3]);
        r.total_pairs = std::stoll(f[4]);
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": corrupted checkpoint line " + std::to_string(lineno));
    }
    if (f[5] == "ok") r.status = EdgeStatus::Ok;
    else if (f[5] == "failed") r.status = EdgeStatus::Failed;
    else
        throw std::runtime_error(path + ": corrupted checkpoint line " + std::to_string(lineno));
    if (f.size() > 6) r.reason = f[6];
    return r;
}

inline EdgeTable read_edge_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge table: " + path);
    EdgeTable table;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        table.records.push_back(parse_edge_line(line, path, lineno));
    }
    return table;
}

inline void write_edge_table(const EdgeTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write edge table: " + path);
    for (const auto& r : table.records) out << format_edge_line(r) << '\n';
}

// Number of unordered pairs a 'corpus run' schedules; used by --dry-run.
inline int64_t scheduled_pair_count(size_t doc_count) {
    return static_cast<int64_t>(doc_count) * static_cast<int64_t>(doc_count - 1) / 2;
}

struct CorpusConfig {
    std::vector<RewriteRule> rules;
    const Lexicon* lexicon = nullptr;
    NormalizerOptions normalizer;
    size_t n = 3;
    SimilarityParams params;
    // Stop-list over the analysis corpus (stoplist_size) or a precomputed
    // file (stoplist); the file wins when both are set.
    size_t stoplist_size = 500;
    std::optional<std::string> stoplist_path;
    std::string cache_dir = "ngmx-cache";
    size_t workers = 1;
    int64_t pair_limit = 0;  // 0 = unlimited; used for sharding and tests
};

struct CorpusStats {
    int64_t engine_invocations = 0;
    int64_t pairs_skipped = 0;  // already present in the checkpoint
    int64_t docs_failed = 0;
};

namespace detail {

inline std::string cache_file(const std::string& dir, const std::string& doc_id) {
    std::string safe;
    for (char c : doc_id)
        safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return dir + "/" + safe + ".ngmx";
}

}  // namespace detail

// All-pairs corpus run. Each document is normalized and embedded once
// into an on-disk NGMX cache; pairs stream from the cache, results are
// appended to the checkpoint as they complete, and pairs already in the
// checkpoint are skipped on restart.
inline EdgeTable run_corpus(const std::vector<ManifestEntry>& manifest, const VectorStore& store,
                            const CorpusConfig& cfg, const std::string& checkpoint_path,
                            CorpusStats* stats = nullptr) {
    if (!cfg.lexicon) throw std::invalid_argument("run_corpus: lexicon required");
    std::filesystem::create_directories(cfg.cache_dir);

    std::vector<ManifestEntry> docs = manifest;
    std::sort(docs.begin(), docs.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.doc_id < b.doc_id; });

    // Load or recover the checkpoint.
    EdgeTable table;
    std::unordered_set<std::string> done;
    if (std::filesystem::exists(checkpoint_path)) {
        table = read_edge_table(checkpoint_path);
        for (const auto& r : table.records) done.insert(r.doc_id_a + "\t" + r.doc_id_b);
    }

    // Phase 1: per-document preprocessing into the NGMX cache.
    std::unordered_map<std::string, std::string> failed_docs;
    std::unordered_map<std::string, std::vector<std::string>> tokens_by_doc;
    for (const auto& doc : docs) {
        std::ifstream in(doc.path);
        if (!in) {
            failed_docs[doc.doc_id] = "unreadable document: " + doc.path;
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        auto norm = normalize_document(buf.str(), cfg.rules, *cfg.lexicon, cfg.normalizer,
                                       doc.doc_id);
        tokens_by_doc.emplace(doc.doc_id, std::move(norm.tokens));
    }
    if (stats) stats->docs_failed = static_cast<int64_t>(failed_docs.size());

    StopList stoplist;
    if (cfg.stoplist_path) {
        stoplist = StopList::load(*cfg.stoplist_path);
    } else {
        std::unordered_map<std::string, size_t> freq;
        for (const auto& [id, toks] : tokens_by_doc) count_frequencies(toks, freq);
        stoplist = build_stoplist(freq, cfg.stoplist_size);
    }

    std::vector<std::string> cached_ids;
    for (const auto& doc : docs) {
        if (failed_docs.count(doc.doc_id)) continue;
        const std::string file = detail::cache_file(cfg.cache_dir, doc.doc_id);
        if (!std::filesystem::exists(file)) {
            auto ngrams = extract_ngrams(tokens_by_doc.at(doc.doc_id), cfg.n, stoplist);
            save_ngmx(embed_document(ngrams, store, doc.doc_id), file);
        }
        cached_ids.push_back(doc.doc_id);
    }
    tokens_by_doc.clear();

    // Phase 2: pair list (doc_id_a < doc_id_b), minus finished pairs.
    struct Pair {
        std::string a, b;
        const std::string* fail_reason = nullptr;
    };
    std::vector<Pair> todo;
    for (size_t i = 0; i < docs.size(); ++i) {
        for (size_t j = i + 1; j < docs.size(); ++j) {
            const std::string& a = docs[i].doc_id;
            const std::string& b = docs[j].doc_id;
            if (done.count(a + "\t" + b)) {
                if (stats) ++stats->pairs_skipped;
                continue;
            }
            Pair p{a, b, nullptr};
            auto fa = failed_docs.find(a);
            auto fb = failed_docs.find(b);
            if (fa != failed_docs.end()) p.fail_reason = &fa->second;
            else if (fb != failed_docs.end()) p.fail_reason = &fb->second;
            todo.push_back(std::move(p));
        }
    }
    if (cfg.pair_limit > 0 && static_cast<int64_t>(todo.size()) > cfg.pair_limit)
        todo.resize(static_cast<size_t>(cfg.pair_limit));

    // Matrices are read-only during the pairwise phase.
    std::unordered_map<std::string, NGramMatrix> cache;
    for (const auto& id : cached_ids) cache.emplace(id, load_ngmx(detail::cache_file(cfg.cache_dir, id)));

    std::ofstream ckpt(checkpoint_path, std::ios::app);
    if (!ckpt) throw std::runtime_error("cannot open checkpoint for append: " + checkpoint_path);

    std::mutex write_mutex;
    std::atomic<size_t> next_pair{0};
    std::atomic<int64_t> invocations{0};
    std::vector<EdgeRecord> new_records(todo.size());

    auto worker = [&]() {
        while (true) {
            const size_t idx = next_pair.fetch_add(1);
            if (idx >= todo.size()) return;
            const Pair& p = todo[idx];
            EdgeRecord rec;
            rec.doc_id_a = p.a;
            rec.doc_id_b = p.b;
            if (p.fail_reason) {
                rec.status = EdgeStatus::Failed;
                rec.reason = *p.fail_reason;
            } else {
                auto score = score_pair(cache.at(p.a), cache.at(p.b), cfg.params);
                ++invocations;
                rec.value = score.value;
                rec.qualifying_pairs = score.qualifying_pairs;
                rec.total_pairs = score.total_pairs;
            }
            {
                // One writer: a full line is appended and flushed atomically.
                std::lock_guard<std::mutex> lock(write_mutex);
                ckpt << format_edge_line(rec) << '\n';
                ckpt.flush();
            }
            new_records[idx] = std::move(rec);
        }
    };

    const size_t nworkers = std::max<size_t>(1, cfg.workers);
    if (nworkers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < nworkers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (stats) stats->engine_invocations = invocations.load();
    for (auto& r : new_records) table.records.push_back(std::move(r));
    table.sort();
    return table;
}

enum class CellKind { Value, Self, Absent };

struct HeatmapMatrix {
    std::vector<std::string> order;
    std::vector<double> values;    // n*n row-major
    std::vector<CellKind> kinds;   // n*n

    double at(size_t i, size_t j) const { return values[i * order.size() + j]; }
    CellKind kind(size_t i, size_t j) const { return kinds[i * order.size() + j]; }
};

// Symmetric score matrix in the requested document order; sentinel
// pairs and pairs missing from the table are marked absent.
inline HeatmapMatrix heatmap_matrix(const EdgeTable& table,
                                    const std::vector<std::string>& order) {
    std::unordered_map<std::string, size_t> index;
    for (size_t i = 0; i < order.size(); ++i) index.emplace(order[i], i);

    std::unordered_set<std::string> known;
    for (const auto& r : table.records) {
        known.insert(r.doc_id_a);
        known.insert(r.doc_id_b);
    }
    for (const auto& id : order)
        if (!known.count(id)) throw std::out_of_range("unknown doc_id in order: " + id);

    const size_t n = order.size();
    HeatmapMatrix m;
    m.order = order;
    m.values.assign(n * n, 0.0);
    m.kinds.assign(n * n, CellKind::Absent);
    for (size_t i = 0; i < n; ++i) m.kinds[i * n + i] = CellKind::Self;

    for (const auto& r : table.records) {
        auto ia = index.find(r.doc_id_a);
        auto ib = index.find(r.doc_id_b);
        if (ia == index.end() || ib == index.end()) continue;
        if (r.status != EdgeStatus::Ok || r.qualifying_pairs == 0) continue;
        m.values[ia->second * n + ib->second] = r.value;
        m.values[ib->second * n + ia->second] = r.value;
        m.kinds[ia->second * n + ib->second] = CellKind::Value;
        m.kinds[ib->second * n + ia->second] = CellKind::Value;
    }
    return m;
}

}  // namespace intertext
