// intertext: quantify intertextuality between documents via thresholded
// pairwise cosine similarity of n-gram embeddings, plus the supporting
// preprocessing, corpus and network-analysis commands.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "intertext/embedding.hpp"
#include "intertext/graph.hpp"
#include "intertext/ngram.hpp"
#include "intertext/normalizer.hpp"
#include "intertext/pipeline.hpp"
#include "intertext/simeng.hpp"
#include "intertext/thesaurus.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> read_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open token file: " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) tokens.push_back(line);
    }
    return tokens;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    return out;
}

struct LexiconArgs {
    std::string rules_path;
    std::string lexicon_path;
    std::string lemmas_path;
    std::string contractions_path;
    bool no_contractions = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--rules", rules_path, "Spelling rewrite rules file")->required();
        cmd->add_option("--lexicon", lexicon_path, "Valid word forms, one per line")->required();
        cmd->add_option("--lemmas", lemmas_path, "Lemma table, form<TAB>lemma")->required();
        cmd->add_option("--contractions", contractions_path,
                        "Contraction table, surface<TAB>expansion words");
        cmd->add_flag("--no-contractions", no_contractions,
                      "Keep contractions as single tokens");
    }

    intertext::Lexicon load() const {
        intertext::Lexicon lex;
        lex.load_wordlist(lexicon_path);
        lex.load_lemmas(lemmas_path);
        if (!contractions_path.empty()) lex.load_contractions(contractions_path);
        return lex;
    }
};

void write_score(const intertext::IntertextualityScore& s, bool as_json) {
    if (as_json) {
        nlohmann::json j{{"value", s.value},
                         {"qualifying_pairs", s.qualifying_pairs},
                         {"total_pairs", s.total_pairs},
                         {"has_pairs", s.has_pairs()}};
        std::cout << j.dump() << '\n';
    } else {
        std::cout.precision(10);
        std::cout << s.value << '\t' << s.qualifying_pairs << '\t' << s.total_pairs << '\n';
    }
}

void write_centrality(const intertext::CentralityResult& r, const std::string& out_path) {
    auto out = open_output(out_path);
    out.precision(12);
    out << "# algorithm=" << r.algorithm;
    for (const auto& [k, v] : r.parameters) out << " " << k << "=" << v;
    out << " iterations=" << r.iterations << " converged=" << (r.converged ? 1 : 0)
        << " distance=1/weight\n";
    std::vector<std::pair<std::string, double>> rows(r.scores.begin(), r.scores.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (const auto& [id, score] : rows) out << id << '\t' << score << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intertextuality analysis of document collections"};
    app.require_subcommand(1);
    app.set_config("--config")->description("Config file (key=value, flag names as keys)");

    unsigned hw = std::thread::hardware_concurrency();
    size_t default_workers = hw == 0 ? 1 : hw;

    // normalize
    auto* norm_cmd = app.add_subcommand("normalize", "Normalize a raw text to lemma tokens");
    LexiconArgs norm_lex;
    norm_lex.attach(norm_cmd);
    std::string norm_in, norm_out;
    norm_cmd->add_option("input", norm_in, "Input text file")->required();
    norm_cmd->add_option("-o,--output", norm_out, "Output token file (one per line)")->required();

    // stoplist
    auto* stop_cmd = app.add_subcommand("stoplist", "Build a frequency stop-list");
    size_t stop_size = 500;
    std::vector<std::string> stop_inputs;
    std::string stop_out;
    stop_cmd->add_option("--size", stop_size, "Stop-list size")->capture_default_str();
    stop_cmd->add_option("inputs", stop_inputs, "Token files")->required();
    stop_cmd->add_option("-o,--output", stop_out, "Output stop-list file")->required();

    // ngrams
    auto* ngram_cmd = app.add_subcommand("ngrams", "Extract stop-filtered n-grams");
    size_t ngram_n = 3;
    std::string ngram_stoplist, ngram_in, ngram_out;
    ngram_cmd->add_option("-n", ngram_n, "N-gram size")->capture_default_str()
        ->check(CLI::PositiveNumber);
    ngram_cmd->add_option("--stoplist", ngram_stoplist, "Stop-list file");
    ngram_cmd->add_option("input", ngram_in, "Input token file")->required();
    ngram_cmd->add_option("-o,--output", ngram_out, "Output n-gram file")->required();

    // compare
    auto* cmp_cmd = app.add_subcommand("compare", "Score one pair of token files");
    std::string cmp_model, cmp_stoplist, cmp_a, cmp_b, cmp_chunk_mode = "exact";
    size_t cmp_n = 3, cmp_chunk = 0, cmp_block = 4096;
    double cmp_tau = 0.2;
    bool cmp_json = false;
    cmp_cmd->add_option("--model", cmp_model, "Word vectors (word2vec text format)")->required();
    cmp_cmd->add_option("-n", cmp_n, "N-gram size")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmp_cmd->add_option("--tau", cmp_tau, "Similarity threshold")->capture_default_str()
        ->check(CLI::Range(0.0, 1.0 - 1e-12));
    cmp_cmd->add_option("--stoplist", cmp_stoplist, "Stop-list file");
    cmp_cmd->add_option("--chunk", cmp_chunk, "Max n-grams per sub-document (0 = off)");
    cmp_cmd->add_option("--chunk-mode", cmp_chunk_mode, "exact or paper")
        ->check(CLI::IsMember({"exact", "paper"}));
    cmp_cmd->add_option("--block-rows", cmp_block, "Tile height for the blocked engine")
        ->check(CLI::PositiveNumber);
    cmp_cmd->add_flag("--json", cmp_json, "Emit structured output");
    cmp_cmd->add_option("a", cmp_a, "First token file")->required();
    cmp_cmd->add_option("b", cmp_b, "Second token file")->required();

    // corpus
    auto* corpus_cmd = app.add_subcommand("corpus", "All-pairs run over a manifest");
    LexiconArgs corpus_lex;
    corpus_lex.attach(corpus_cmd);
    std::string corpus_manifest, corpus_model, corpus_checkpoint, corpus_out;
    std::string corpus_stoplist, corpus_cache = "ngmx-cache", corpus_chunk_mode = "exact";
    size_t corpus_n = 3, corpus_workers = default_workers, corpus_chunk = 0;
    size_t corpus_stoplist_size = 500;
    double corpus_tau = 0.2;
    bool corpus_dry = false;
    corpus_cmd->add_option("--manifest", corpus_manifest, "Corpus manifest TSV")->required();
    corpus_cmd->add_option("--model", corpus_model, "Word vectors");
    corpus_cmd->add_option("-n", corpus_n, "N-gram size")->capture_default_str()
        ->check(CLI::PositiveNumber);
    corpus_cmd->add_option("--tau", corpus_tau, "Similarity threshold")->capture_default_str()
        ->check(CLI::Range(0.0, 1.0 - 1e-12));
    corpus_cmd->add_option("--workers", corpus_workers, "Worker pool size")
        ->capture_default_str()->check(CLI::PositiveNumber);
    corpus_cmd->add_option("--checkpoint", corpus_checkpoint, "Checkpoint file");
    corpus_cmd->add_option("--stoplist", corpus_stoplist, "Precomputed stop-list file");
    corpus_cmd->add_option("--stoplist-size", corpus_stoplist_size,
                           "Stop-list size when computed from the corpus")
        ->capture_default_str();
    corpus_cmd->add_option("--chunk", corpus_chunk, "Max n-grams per sub-document (0 = off)");
    corpus_cmd->add_option("--chunk-mode", corpus_chunk_mode, "exact or paper")
        ->check(CLI::IsMember({"exact", "paper"}));
    corpus_cmd->add_option("--cache-dir", corpus_cache, "NGMX cache directory")
        ->capture_default_str();
    corpus_cmd->add_flag("--dry-run", corpus_dry, "Only report the scheduled pair count");
    corpus_cmd->add_option("-o,--output", corpus_out, "Final edge table TSV");

    // matrix
    auto* matrix_cmd = app.add_subcommand("matrix", "Render an edge table as a dense matrix");
    std::string matrix_edges, matrix_order, matrix_out;
    matrix_cmd->add_option("--edges", matrix_edges, "Edge table TSV")->required();
    matrix_cmd->add_option("--order", matrix_order, "doc_id order, one per line")->required();
    matrix_cmd->add_option("-o,--output", matrix_out, "Output matrix TSV")->required();

    // graph
    auto* graph_cmd = app.add_subcommand("graph", "Centrality / community analysis");
    std::string graph_edges, graph_manifest, graph_mode = "directed", graph_algo, graph_out;
    std::string graph_export;
    double graph_damping = 1.0, graph_resolution = 1.0, graph_floor = 0.0;
    uint64_t graph_seed = 0;
    graph_cmd->add_option("--edges", graph_edges, "Edge table TSV")->required();
    graph_cmd->add_option("--manifest", graph_manifest, "Corpus manifest TSV")->required();
    graph_cmd->add_option("--mode", graph_mode, "directed or undirected")
        ->capture_default_str()->check(CLI::IsMember({"directed", "undirected"}));
    graph_cmd->add_option("--algo", graph_algo,
                          "pagerank | eigenvector | laplacian | closeness | harmonic | louvain");
    graph_cmd->add_option("--damping", graph_damping, "PageRank damping factor")
        ->capture_default_str()->check(CLI::Range(1e-9, 1.0));
    graph_cmd->add_option("--resolution", graph_resolution, "Louvain resolution")
        ->capture_default_str();
    graph_cmd->add_option("--seed", graph_seed, "Louvain shuffle seed")->capture_default_str();
    graph_cmd->add_option("--weight-floor", graph_floor, "Minimum edge weight kept")
        ->capture_default_str();
    graph_cmd->add_option("--export", graph_export, "Write the graph as GraphML to this path");
    graph_cmd->add_option("-o,--output", graph_out, "Output TSV");

    // eval-thesaurus
    auto* thes_cmd = app.add_subcommand("eval-thesaurus",
                                        "Score a vector model against a thesaurus graph");
    std::string thes_model, thes_file, thes_out;
    size_t thes_k = 50, thes_workers = default_workers;
    thes_cmd->add_option("--model", thes_model, "Word vectors")->required();
    thes_cmd->add_option("--thesaurus", thes_file, "Entries, one per line")->required();
    thes_cmd->add_option("-k", thes_k, "Neighbour count")->capture_default_str()
        ->check(CLI::PositiveNumber);
    thes_cmd->add_option("--workers", thes_workers, "Worker pool size")
        ->capture_default_str()->check(CLI::PositiveNumber);
    thes_cmd->add_option("-o,--output", thes_out, "Per-word report TSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*norm_cmd) {
            auto rules = intertext::load_rules(norm_lex.rules_path);
            auto lex = norm_lex.load();
            intertext::NormalizerOptions opts;
            opts.expand_contractions = !norm_lex.no_contractions;
            auto doc = intertext::normalize_document(read_file(norm_in), rules, lex, opts);
            auto out = open_output(norm_out);
            for (const auto& t : doc.tokens) out << t << '\n';
        } else if (*stop_cmd) {
            std::unordered_map<std::string, size_t> freq;
            for (const auto& path : stop_inputs)
                intertext::count_frequencies(read_tokens(path), freq);
            intertext::build_stoplist(freq, stop_size).save(stop_out);
        } else if (*ngram_cmd) {
            intertext::StopList sl;
            if (!ngram_stoplist.empty()) sl = intertext::StopList::load(ngram_stoplist);
            auto ngrams = intertext::extract_ngrams(read_tokens(ngram_in), ngram_n, sl);
            auto out = open_output(ngram_out);
            for (const auto& g : ngrams) {
                for (size_t i = 0; i < g.words.size(); ++i)
                    out << (i ? " " : "") << g.words[i];
                out << '\n';
            }
        } else if (*cmp_cmd) {
            auto store = intertext::load_vectors(cmp_model);
            intertext::StopList sl;
            if (!cmp_stoplist.empty()) sl = intertext::StopList::load(cmp_stoplist);
            auto ma = intertext::embed_document(
                intertext::extract_ngrams(read_tokens(cmp_a), cmp_n, sl), store, "a");
            auto mb = intertext::embed_document(
                intertext::extract_ngrams(read_tokens(cmp_b), cmp_n, sl), store, "b");
            intertext::SimilarityParams params;
            params.tau = cmp_tau;
            params.block_rows = cmp_block;
            params.chunk_ngrams = cmp_chunk;
            params.chunk_mode = cmp_chunk_mode == "paper"
                                    ? intertext::ChunkMode::PaperSimpleMean
                                    : intertext::ChunkMode::ExactWeighted;
            write_score(intertext::score_pair(ma, mb, params), cmp_json);
        } else if (*corpus_cmd) {
            auto manifest = intertext::read_manifest(corpus_manifest);
            if (corpus_dry) {
                std::cout << intertext::scheduled_pair_count(manifest.size()) << '\n';
                return kExitOk;
            }
            if (corpus_model.empty() || corpus_checkpoint.empty())
                throw CLI::RequiredError("--model and --checkpoint");
            auto store = intertext::load_vectors(corpus_model);
            intertext::CorpusConfig cfg;
            cfg.rules = intertext::load_rules(corpus_lex.rules_path);
            auto lex = corpus_lex.load();
            cfg.lexicon = &lex;
            cfg.normalizer.expand_contractions = !corpus_lex.no_contractions;
            cfg.n = corpus_n;
            cfg.params.tau = corpus_tau;
            cfg.params.chunk_ngrams = corpus_chunk;
            cfg.params.chunk_mode = corpus_chunk_mode == "paper"
                                        ? intertext::ChunkMode::PaperSimpleMean
                                        : intertext::ChunkMode::ExactWeighted;
            cfg.stoplist_size = corpus_stoplist_size;
            if (!corpus_stoplist.empty()) cfg.stoplist_path = corpus_stoplist;
            cfg.cache_dir = corpus_cache;
            cfg.workers = corpus_workers;
            auto table = intertext::run_corpus(manifest, store, cfg, corpus_checkpoint);
            if (!corpus_out.empty()) intertext::write_edge_table(table, corpus_out);
        } else if (*matrix_cmd) {
            auto table = intertext::read_edge_table(matrix_edges);
            auto order = read_tokens(matrix_order);
            auto m = intertext::heatmap_matrix(table, order);
            auto out = open_output(matrix_out);
            out.precision(10);
            out << "doc_id";
            for (const auto& id : order) out << '\t' << id;
            out << '\n';
            for (size_t i = 0; i < order.size(); ++i) {
                out << order[i];
                for (size_t j = 0; j < order.size(); ++j) {
                    out << '\t';
                    switch (m.kind(i, j)) {
                        case intertext::CellKind::Self: out << "self"; break;
                        case intertext::CellKind::Absent: out << "absent"; break;
                        case intertext::CellKind::Value: out << m.at(i, j); break;
                    }
                }
                out << '\n';
            }
        } else if (*graph_cmd) {
            auto table = intertext::read_edge_table(graph_edges);
            auto manifest = intertext::read_manifest(graph_manifest);
            auto mode = graph_mode == "directed" ? intertext::GraphMode::Directed
                                                 : intertext::GraphMode::Undirected;
            auto g = intertext::build_graph(table, manifest, mode, graph_floor);
            for (const auto& w : g.warnings) std::cerr << "warning: " << w << '\n';
            if (!graph_export.empty()) intertext::export_graphml(g, graph_export);
            if (!graph_algo.empty()) {
                if (graph_out.empty()) throw CLI::RequiredError("--output");
                if (graph_algo == "louvain") {
                    auto p = intertext::louvain(g, graph_resolution, graph_seed);
                    auto out = open_output(graph_out);
                    out << "# algorithm=louvain resolution=" << graph_resolution
                        << " seed=" << graph_seed << " modularity=" << p.modularity << '\n';
                    std::vector<std::pair<std::string, int>> rows(p.labels.begin(),
                                                                  p.labels.end());
                    std::sort(rows.begin(), rows.end());
                    for (const auto& [id, c] : rows) out << id << '\t' << c << '\n';
                } else {
                    intertext::CentralityResult r;
                    if (graph_algo == "pagerank") r = intertext::pagerank(g, graph_damping);
                    else if (graph_algo == "eigenvector") r = intertext::eigenvector_centrality(g);
                    else if (graph_algo == "laplacian") r = intertext::laplacian_centrality(g);
                    else if (graph_algo == "closeness") r = intertext::closeness_centrality(g);
                    else if (graph_algo == "harmonic") r = intertext::harmonic_centrality(g);
                    else throw CLI::ValidationError("--algo", "unknown algorithm " + graph_algo);
                    write_centrality(r, graph_out);
                }
            }
        } else if (*thes_cmd) {
            auto store = intertext::load_vectors(thes_model);
            auto graph = intertext::load_thesaurus(thes_file);
            auto report = intertext::knn_hits(store, graph, thes_k, thes_workers);
            auto out = open_output(thes_out);
            std::vector<std::pair<std::string, int64_t>> rows(report.per_word_hits.begin(),
                                                              report.per_word_hits.end());
            std::sort(rows.begin(), rows.end());
            for (const auto& [w, h] : rows) out << w << '\t' << h << '\n';
            out << "# total_hits=" << report.total_hits << " evaluated_words="
                << report.evaluated_words << " k=" << report.k << '\n';
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}
