// pathnat: command-line entry point.
//
// Every subcommand takes its randomness from --seed and writes artifacts that
// start with a "# pathnat <version> command=<name> config_hash=<hex>" line.
// Failures print one JSON object on stderr and exit non-zero.

#include "pathnat/agreement.hpp"
#include "pathnat/analogy.hpp"
#include "pathnat/annotate.hpp"
#include "pathnat/baselines.hpp"
#include "pathnat/dataset.hpp"
#include "pathnat/entropy.hpp"
#include "pathnat/features.hpp"
#include "pathnat/model.hpp"
#include "pathnat/retrieval.hpp"
#include "pathnat/sense.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace pathnat;
using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// Writes to --out when given, else stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw Error("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw Error("write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string header(const std::string& command, std::uint64_t hash) {
    return "# " + std::string(kToolVersion) + " command=" + command + " config_hash=" + hex64(hash) + "\n";
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

std::vector<double> parse_percents(const std::string& s) {
    std::vector<double> out;
    for (const auto& t : split_list(s)) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != t.size() || !(v > 0 && v <= 100)) throw Error("bad percentage '" + t + "'");
        out.push_back(v);
    }
    if (out.empty()) throw Error("empty percentage list");
    return out;
}

struct GraphArgs {
    std::string edges;
    std::string relations;

    void add(CLI::App* app) {
        app->add_option("--graph", edges, "Edge dump (TSV)")->required()->check(CLI::ExistingFile);
        app->add_option("--relations", relations, "Relation table (default: built-in ConceptNet table)")
            ->check(CLI::ExistingFile);
    }
    Graph load() const {
        return Graph::load(edges, relations.empty() ? RelationTable::conceptnet() : RelationTable::load(relations));
    }
};

/// Graph, vectors, senses and an optional trained model, built in place so
/// the featurizer's references stay valid.
struct Workspace {
    Graph graph;
    std::optional<EmbeddingTable> table;
    std::optional<SenseInventory> senses;
    std::optional<PcaProjection> pca;
    std::optional<Checkpoint> checkpoint;
    std::unique_ptr<Featurizer> featurizer;

    void load_inputs(const GraphArgs& g, const std::string& vectors, const std::string& sense_file) {
        graph = g.load();
        if (!vectors.empty()) table = EmbeddingTable::load(vectors);
        if (!sense_file.empty()) senses = SenseInventory::load(sense_file);
    }

    void make_featurizer(const FeatureMask& mask, std::size_t embedding_dim) {
        if (!table) throw Error("--vectors is required");
        FeaturizerOptions opts;
        opts.mask = mask;
        if (embedding_dim != 0 && embedding_dim != table->dimension()) {
            pca = fit_pca(*table, embedding_dim);
            opts.pca = &*pca;
        }
        featurizer = std::make_unique<Featurizer>(graph, *table, senses ? &*senses : nullptr, opts);
    }

    void load_model(const std::string& file) {
        checkpoint = load_checkpoint(file);
        make_featurizer(checkpoint->config.mask, checkpoint->config.embedding_dim);
        if (!(featurizer->layout() == checkpoint->params.shape().layout)) {
            throw Error("checkpoint feature layout does not match the graph/vectors given");
        }
    }

    PathScorer scorer(const std::string& strategy, std::uint64_t seed) const {
        if (strategy == "model") {
            if (!checkpoint) throw Error("strategy 'model' needs --checkpoint");
            return model_scorer(*featurizer, checkpoint->params);
        }
        if (strategy == "random") {
            return [this, seed](const Path& p) {
                return static_cast<double>(mix64(fnv1a(format_path(graph, p), mix64(seed))) >> 11);
            };
        }
        const auto kind = parse_baseline(strategy);
        if (!kind) throw Error("unknown strategy '" + strategy + "'");
        return baseline_scorer(*kind, graph, table ? &*table : nullptr, seed);
    }
};

std::unordered_set<std::string> read_word_list(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open " + file);
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.insert(normalize_concept(line));
    }
    return out;
}

/// Featurized paths plus judged examples over them.
struct JudgedFeatures {
    std::vector<FeaturizedPath> paths;
    std::vector<Path> graph_paths;
    std::vector<PairExample> examples;
};

JudgedFeatures judged_features(const Workspace& ws, const std::string& pairs_file, const std::string& judgments_file) {
    const auto pairs = load_pairs(pairs_file);
    std::unordered_set<std::string> ids;
    for (const auto& p : pairs) ids.insert(p.id);
    const auto judgments = load_judgments(judgments_file, &ids);
    auto data = collect_examples(pairs, judgments);
    JudgedFeatures out;
    out.examples = std::move(data.examples);
    for (const auto& lp : data.paths) {
        out.graph_paths.push_back(resolve(ws.graph, lp));
        out.paths.push_back(ws.featurizer->featurize(out.graph_paths.back()));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path naturalness toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    std::uint64_t seed = 0;
    std::string out_path;
    std::string command;
    std::function<void(std::uint64_t)> action;

    auto sub = [&](const std::string& name, const std::string& description) {
        auto* s = app.add_subcommand(name, description);
        s->add_option("--seed", seed, "Random seed")->capture_default_str();
        s->add_option("--out", out_path, "Output file (default: stdout)");
        return s;
    };

    // ---- build-graph -------------------------------------------------------
    GraphArgs bg;
    auto* build = sub("build-graph", "Load an edge dump and write it in canonical form");
    bg.add(build);
    build->callback([&] {
        action = [&](std::uint64_t hash) {
            const auto g = bg.load();
            Output out(out_path);
            out.stream() << header("build-graph", hash);
            g.save(out.stream());
            out.finish();
            std::cerr << json{{"concepts", g.concept_count()}, {"edges", g.edge_count()}}.dump() << '\n';
        };
    });

    // ---- sample ------------------------------------------------------------
    GraphArgs sg;
    std::size_t max_nodes = 4, count = 100, vocab_size = 0, pair_count = 0;
    std::string center, allowed_file, pairs_out;
    auto* sample = sub("sample", "Sample distinct relational paths (and optionally pairs of them)");
    sg.add(sample);
    sample->add_option("--max-nodes", max_nodes, "Maximum vertices per path")->capture_default_str();
    sample->add_option("--count", count, "Number of paths")->capture_default_str();
    sample->add_option("--center", center, "Random-walk start word for a sampled vocabulary");
    sample->add_option("--vocab-size", vocab_size, "Vocabulary size for the random walk");
    sample->add_option("--allowed", allowed_file, "Word list restricting the walk")->check(CLI::ExistingFile);
    sample->add_option("--pairs", pair_count, "Also draw this many distinct path pairs");
    sample->add_option("--pairs-out", pairs_out, "Pair records output");
    sample->callback([&] {
        action = [&](std::uint64_t hash) {
            const auto g = sg.load();
            std::optional<std::unordered_set<std::string>> vocab;
            if (!center.empty()) {
                if (vocab_size == 0) throw Error("--center needs --vocab-size");
                std::unordered_set<std::string> allowed;
                if (!allowed_file.empty()) {
                    allowed = read_word_list(allowed_file);
                } else {
                    for (std::size_t c = 0; c < g.concept_count(); ++c) allowed.insert(g.label(static_cast<ConceptId>(c)));
                }
                const auto words = sample_vocabulary(g, normalize_concept(center), allowed, vocab_size, mix64(seed));
                vocab.emplace(words.begin(), words.end());
            }
            const auto paths = sample_paths(g, vocab ? &*vocab : nullptr, max_nodes, count, mix64(seed + 1));
            std::vector<LabeledPath> labeled;
            for (const auto& p : paths) labeled.push_back(label_path(g, p));
            Output out(out_path);
            out.stream() << header("sample", hash);
            write_paths(out.stream(), labeled);
            out.finish();
            if (pair_count > 0) {
                if (pairs_out.empty()) throw Error("--pairs needs --pairs-out");
                std::vector<std::size_t> members(labeled.size());
                std::iota(members.begin(), members.end(), std::size_t{0});
                Rng rng(mix64(seed + 2));
                std::vector<PathPair> pairs;
                for (const auto& ix : pair_up(members, pair_count, rng)) {
                    pairs.push_back({"s" + std::to_string(seed) + "-" + std::to_string(pairs.size()),
                                     labeled[ix.first], labeled[ix.second]});
                }
                Output po(pairs_out);
                po.stream() << header("sample", hash);
                write_pairs(po.stream(), pairs);
                po.finish();
            }
        };
    });

    // ---- featurize ---------------------------------------------------------
    GraphArgs fg;
    std::string vectors, senses, paths_file, mask_spec = "all";
    std::size_t pca_dim = 0;
    auto* featurize = sub("featurize", "Compute per-path feature sequences");
    fg.add(featurize);
    featurize->add_option("--vectors", vectors, "Word vectors")->required()->check(CLI::ExistingFile);
    featurize->add_option("--senses", senses, "Sense inventory")->check(CLI::ExistingFile);
    featurize->add_option("--paths", paths_file, "Path records")->required()->check(CLI::ExistingFile);
    featurize->add_option("--pca", pca_dim, "Reduce embeddings to this many components (0: keep)");
    featurize->add_option("--mask", mask_spec, "Feature subset")->capture_default_str();
    featurize->callback([&] {
        action = [&](std::uint64_t hash) {
            Workspace ws;
            ws.load_inputs(fg, vectors, senses);
            ws.make_featurizer(FeatureMask::parse(mask_spec), pca_dim);
            std::vector<FeaturizedPath> fps;
            for (const auto& lp : load_paths(paths_file)) fps.push_back(ws.featurizer->featurize(resolve(ws.graph, lp)));
            Output out(out_path);
            out.stream() << header("featurize", hash);
            write_featurized(out.stream(), ws.featurizer->layout(), fps);
            out.finish();
        };
    });

    // ---- train -------------------------------------------------------------
    GraphArgs tg;
    TrainingConfig tc;
    std::string pairs_file, judgments_file, log_file;
    double split_ratio = 0.8;
    auto* trainc = sub("train", "Train the naturalness model on judged pairs");
    tg.add(trainc);
    trainc->add_option("--vectors", vectors, "Word vectors")->required()->check(CLI::ExistingFile);
    trainc->add_option("--senses", senses, "Sense inventory")->check(CLI::ExistingFile);
    trainc->add_option("--pairs", pairs_file, "Pair records")->required()->check(CLI::ExistingFile);
    trainc->add_option("--judgments", judgments_file, "Judgment records")->required()->check(CLI::ExistingFile);
    trainc->add_option("--split-ratio", split_ratio, "Fraction of paths used for training")->capture_default_str();
    trainc->add_option("--pca", pca_dim, "Embedding components d' (0: raw dimension)");
    trainc->add_option("--mask", mask_spec, "Feature subset")->capture_default_str();
    trainc->add_option("--epochs", tc.epochs)->capture_default_str();
    trainc->add_option("--batch-size", tc.batch_size)->capture_default_str();
    trainc->add_option("--lr", tc.adam.learning_rate)->capture_default_str();
    trainc->add_option("--feature-width", tc.feature_width, "l_f")->capture_default_str();
    trainc->add_option("--code-length", tc.code_length, "h")->capture_default_str();
    trainc->add_option("--log", log_file, "Per-epoch log (TSV)");
    trainc->callback([&] {
        action = [&](std::uint64_t hash) {
            if (out_path.empty()) throw Error("train needs --out for the checkpoint");
            tc.seed = seed;
            tc.mask = FeatureMask::parse(mask_spec);
            Workspace ws;
            ws.load_inputs(tg, vectors, senses);
            tc.embedding_dim = pca_dim == 0 ? ws.table->dimension() : pca_dim;
            ws.make_featurizer(tc.mask, tc.embedding_dim);
            const auto data = judged_features(ws, pairs_file, judgments_file);
            const auto split = split_train_test(data.paths.size(), data.examples, split_ratio, seed);
            const auto result = train(data.paths, split.train, ws.featurizer->layout(), tc, split.test);
            save_checkpoint(std::filesystem::path(out_path), tc, result.params);
            Output log(log_file);
            log.stream() << header("train", hash) << "epoch\ttrain_loss\theldout_accuracy\n";
            for (const auto& e : result.log) {
                log.stream() << e.epoch << '\t' << fmt(e.train_loss) << '\t'
                             << (e.heldout_accuracy < 0 ? std::string("nan") : fmt(e.heldout_accuracy)) << '\n';
            }
            log.finish();
        };
    });

    // ---- eval --------------------------------------------------------------
    GraphArgs eg;
    std::string checkpoint_file;
    bool no_split = false;
    auto* evalc = sub("eval", "Pairwise accuracy of the model and the baselines on held-out pairs");
    eg.add(evalc);
    evalc->add_option("--checkpoint", checkpoint_file)->required()->check(CLI::ExistingFile);
    evalc->add_option("--vectors", vectors, "Word vectors")->required()->check(CLI::ExistingFile);
    evalc->add_option("--senses", senses, "Sense inventory")->check(CLI::ExistingFile);
    evalc->add_option("--pairs", pairs_file)->required()->check(CLI::ExistingFile);
    evalc->add_option("--judgments", judgments_file)->required()->check(CLI::ExistingFile);
    evalc->add_option("--split-ratio", split_ratio, "Must match training")->capture_default_str();
    evalc->add_flag("--no-split", no_split, "Evaluate on every judged pair");
    evalc->callback([&] {
        action = [&](std::uint64_t hash) {
            Workspace ws;
            ws.load_inputs(eg, vectors, senses);
            ws.load_model(checkpoint_file);
            const auto data = judged_features(ws, pairs_file, judgments_file);
            std::vector<PairExample> test = data.examples;
            if (!no_split) test = split_train_test(data.paths.size(), data.examples, split_ratio, seed).test;
            Output out(out_path);
            out.stream() << header("eval", hash) << "method\taccuracy\tpairs\n";
            out.stream() << "model\t" << fmt(evaluate_accuracy(data.paths, test, ws.checkpoint->params)) << '\t'
                         << test.size() << '\n';
            for (auto kind : {BaselineKind::source_target, BaselineKind::pairwise, BaselineKind::flow,
                              BaselineKind::length}) {
                std::vector<ScoredPair> scored;
                for (const auto& ex : test) {
                    scored.push_back({baseline_score(kind, ws.graph, data.graph_paths[ex.first], &*ws.table, seed),
                                      baseline_score(kind, ws.graph, data.graph_paths[ex.second], &*ws.table, seed),
                                      ex.label});
                }
                out.stream() << to_string(kind) << '\t' << fmt(pairwise_accuracy(scored)) << '\t' << test.size()
                             << '\n';
            }
            out.finish();
        };
    });

    // ---- rank --------------------------------------------------------------
    GraphArgs rg;
    std::string source, target, strategy = "model";
    auto* rank = sub("rank", "Score and order all paths between two concepts");
    rg.add(rank);
    rank->add_option("--source", source)->required();
    rank->add_option("--target", target)->required();
    rank->add_option("--max-nodes", max_nodes)->capture_default_str();
    rank->add_option("--strategy", strategy, "model|st|pair|flow|length")->capture_default_str();
    rank->add_option("--checkpoint", checkpoint_file)->check(CLI::ExistingFile);
    rank->add_option("--vectors", vectors)->check(CLI::ExistingFile);
    rank->add_option("--senses", senses)->check(CLI::ExistingFile);
    rank->callback([&] {
        action = [&](std::uint64_t hash) {
            Workspace ws;
            ws.load_inputs(rg, vectors, senses);
            if (!checkpoint_file.empty()) ws.load_model(checkpoint_file);
            const auto score = ws.scorer(strategy, seed);
            auto paths = enumerate_paths(ws.graph, normalize_concept(source), normalize_concept(target), max_nodes);
            std::vector<std::pair<double, std::size_t>> order;
            for (std::size_t i = 0; i < paths.size(); ++i) order.emplace_back(score(paths[i]), i);
            std::stable_sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.first > b.first; });
            Output out(out_path);
            out.stream() << header("rank", hash) << "rank\tscore\tpath\n";
            for (std::size_t r = 0; r < order.size(); ++r) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.9g", order[r].first);
                out.stream() << r + 1 << '\t' << buf << '\t' << format_path(ws.graph, paths[order[r].second]) << '\n';
            }
            out.finish();
        };
    });

    // ---- entropy -----------------------------------------------------------
    GraphArgs ng;
    std::string strategies = "model,flow,length", percents = "10,20,30,40,50,60,70,80,90,100";
    std::size_t nodes = 4, ps_count = 0;
    auto* entropy = sub("entropy", "Average PS-relation entropy of the top-ranked paths");
    ng.add(entropy);
    entropy->add_option("--nodes", nodes, "Path length in vertices")->capture_default_str();
    entropy->add_option("--count", ps_count, "Records to sample (0: all)")->capture_default_str();
    entropy->add_option("--strategies", strategies)->capture_default_str();
    entropy->add_option("--percents", percents)->capture_default_str();
    entropy->add_option("--checkpoint", checkpoint_file)->check(CLI::ExistingFile);
    entropy->add_option("--vectors", vectors)->check(CLI::ExistingFile);
    entropy->add_option("--senses", senses)->check(CLI::ExistingFile);
    entropy->callback([&] {
        action = [&](std::uint64_t hash) {
            Workspace ws;
            ws.load_inputs(ng, vectors, senses);
            if (!checkpoint_file.empty()) ws.load_model(checkpoint_file);
            const auto records = collect_ps_paths(ws.graph, nullptr, nodes, ps_count, seed);
            std::vector<PsSample> samples;
            for (const auto& r : records) {
                samples.push_back({path_type_key(ws.graph, r.path), ws.graph.relations().name(r.relation)});
            }
            const auto pcts = parse_percents(percents);
            Output out(out_path);
            out.stream() << header("entropy", hash) << "strategy\ttop_percent\tentropy\tpaths\n";
            for (const auto& st : split_list(strategies)) {
                const auto score = ws.scorer(st, seed);
                std::vector<double> scores;
                for (const auto& r : records) scores.push_back(score(r.path));
                for (double p : pcts) {
                    out.stream() << st << '\t' << p << '\t' << fmt(avg_entropy(samples, scores, p)) << '\t'
                                 << records.size() << '\n';
                }
            }
            out.finish();
        };
    });

    // ---- expand ------------------------------------------------------------
    GraphArgs xg;
    std::string corpus, queries_file, qrels_file, budgets = "0,1,2,3,4,5";
    std::string expand_strategies = "naturalness,pairwise,length,random,naturalness+length";
    bool hard_only = false;
    auto* expand = sub("expand", "Query expansion with connecting paths; P@10 and MAP per word budget");
    xg.add(expand);
    expand->add_option("--corpus", corpus, "Directory of documents")->required()->check(CLI::ExistingDirectory);
    expand->add_option("--queries", queries_file)->required()->check(CLI::ExistingFile);
    expand->add_option("--qrels", qrels_file)->required()->check(CLI::ExistingFile);
    expand->add_option("--strategies", expand_strategies)->capture_default_str();
    expand->add_option("--budgets", budgets)->capture_default_str();
    expand->add_option("--max-nodes", max_nodes)->capture_default_str();
    expand->add_flag("--hard-only", hard_only, "Only queries with zero P@10 before expansion");
    expand->add_option("--checkpoint", checkpoint_file)->check(CLI::ExistingFile);
    expand->add_option("--vectors", vectors)->check(CLI::ExistingFile);
    expand->add_option("--senses", senses)->check(CLI::ExistingFile);
    expand->callback([&] {
        action = [&](std::uint64_t hash) {
            Workspace ws;
            ws.load_inputs(xg, vectors, senses);
            if (!checkpoint_file.empty()) ws.load_model(checkpoint_file);
            const TfidfIndex index(load_corpus(corpus));
            auto queries = load_queries(queries_file);
            const auto relevance = load_relevance(qrels_file);
            if (hard_only) {
                std::map<std::string, std::string> hard;
                for (const auto& q : hard_queries(index, queries, relevance)) hard.emplace(q, queries.at(q));
                queries = std::move(hard);
            }
            std::optional<PathScorer> natural;
            if (ws.checkpoint) natural = ws.scorer("model", seed);
            std::vector<std::size_t> budget_list;
            for (const auto& b : split_list(budgets)) budget_list.push_back(std::stoul(b));
            Output out(out_path);
            out.stream() << header("expand", hash) << "strategy\twords_added\tp_at_10\tmap\tqueries\n";
            for (const auto& name : split_list(expand_strategies)) {
                const auto st = parse_expansion_strategy(name);
                if (!st) throw Error("unknown expansion strategy '" + name + "'");
                ExpansionInputs in;
                in.graph = &ws.graph;
                in.naturalness = natural ? &*natural : nullptr;
                in.table = ws.table ? &*ws.table : nullptr;
                in.seed = seed;
                in.max_nodes = max_nodes;
                for (auto budget : budget_list) {
                    std::map<std::string, std::string> expanded;
                    for (const auto& [qid, text] : queries) {
                        std::vector<std::string> terms;
                        std::istringstream ss(text);
                        for (std::string w; ss >> w;) terms.push_back(w);
                        std::string joined;
                        for (const auto& t : expand_query(terms, *st, budget, in).terms()) joined += t + " ";
                        expanded.emplace(qid, joined);
                    }
                    const auto scores = evaluate_queries(index, expanded, relevance);
                    out.stream() << name << '\t' << budget << '\t' << fmt(scores.precision_at_10) << '\t'
                                 << fmt(scores.map) << '\t' << scores.ap.size() << '\n';
                }
            }
            out.finish();
        };
    });

    // ---- analogy -----------------------------------------------------------
    GraphArgs ag;
    std::string questions_file, analogy_percents = "100";
    auto* analogy = sub("analogy", "Analogy accuracy as a function of the path filter");
    ag.add(analogy);
    analogy->add_option("--questions", questions_file)->required()->check(CLI::ExistingFile);
    analogy->add_option("--percents", analogy_percents, "Top-percent filters")->capture_default_str();
    analogy->add_option("--checkpoint", checkpoint_file)->check(CLI::ExistingFile);
    analogy->add_option("--vectors", vectors)->check(CLI::ExistingFile);
    analogy->add_option("--senses", senses)->check(CLI::ExistingFile);
    analogy->callback([&] {
        action = [&](std::uint64_t hash) {
            Workspace ws;
            ws.load_inputs(ag, vectors, senses);
            if (!checkpoint_file.empty()) ws.load_model(checkpoint_file);
            const auto questions = load_analogies(questions_file);
            std::optional<PathScorer> natural;
            if (ws.checkpoint) natural = ws.scorer("model", seed);
            Output out(out_path);
            out.stream() << header("analogy", hash) << "top_percent\taccuracy\tanswered\tquestions\n";
            for (double p : parse_percents(analogy_percents)) {
                if (!natural && p != 100.0) throw Error("filters below 100% need --checkpoint");
                const auto acc = analogy_accuracy(questions, ws.graph, natural ? &*natural : nullptr, p);
                out.stream() << p << '\t' << fmt(acc.accuracy()) << '\t' << acc.answered << '\t' << acc.questions
                             << '\n';
            }
            out.finish();
        };
    });

    // ---- agreement ---------------------------------------------------------
    std::string histogram;
    GraphArgs mg;
    auto* agreement = sub("agreement", "Agreement upper bound and model confidence per opinion split");
    agreement->add_option("--judgments", judgments_file, "Multi-response judgments")->check(CLI::ExistingFile);
    agreement->add_option("--histogram", histogram, "Split histogram, e.g. 8/8:7,9/7:11");
    agreement->add_option("--pairs", pairs_file, "Pair records (with --checkpoint)")->check(CLI::ExistingFile);
    agreement->add_option("--checkpoint", checkpoint_file)->check(CLI::ExistingFile);
    agreement->add_option("--graph", mg.edges)->check(CLI::ExistingFile);
    agreement->add_option("--relations", mg.relations)->check(CLI::ExistingFile);
    agreement->add_option("--vectors", vectors)->check(CLI::ExistingFile);
    agreement->add_option("--senses", senses)->check(CLI::ExistingFile);
    agreement->callback([&] {
        action = [&](std::uint64_t hash) {
            Output out(out_path);
            out.stream() << header("agreement", hash);
            if (!histogram.empty()) {
                std::vector<OpinionSplit> splits;
                for (const auto& item : split_list(histogram)) {
                    unsigned a = 0, b = 0, n = 0;
                    char tail = 0;
                    if (std::sscanf(item.c_str(), "%u/%u:%u%c", &a, &b, &n, &tail) != 3 || a < b) {
                        throw Error("bad histogram entry '" + item + "'");
                    }
                    for (unsigned k = 0; k < n; ++k) splits.push_back({a, b});
                }
                out.stream() << "upper_bound\t" << fmt(agreement_upper_bound(splits)) << '\n';
                out.finish();
                return;
            }
            if (judgments_file.empty()) throw Error("agreement needs --judgments or --histogram");
            const auto set = group_judgments(load_judgments(judgments_file));
            const auto questions = opinion_splits(set);
            out.stream() << "upper_bound\t" << fmt(agreement_upper_bound(set)) << '\n';
            if (!checkpoint_file.empty()) {
                if (pairs_file.empty() || mg.edges.empty()) throw Error("confidence needs --pairs and --graph");
                Workspace ws;
                ws.load_inputs(mg, vectors, senses);
                ws.load_model(checkpoint_file);
                std::map<std::string, PathPair> by_id;
                for (auto& p : load_pairs(pairs_file)) by_id.emplace(p.id, std::move(p));
                const auto scores = [&](const std::string& id) {
                    auto it = by_id.find(id);
                    if (it == by_id.end()) throw Error("unknown pair id " + id);
                    const auto& params = ws.checkpoint->params;
                    return std::pair{
                        score_path(ws.featurizer->featurize(resolve(ws.graph, it->second.first)), params),
                        score_path(ws.featurizer->featurize(resolve(ws.graph, it->second.second)), params)};
                };
                out.stream() << "split\tquestions\tcorrect\tmean_confidence\n";
                for (const auto& row : confidence_analysis(questions, scores)) {
                    out.stream() << row.split.majority << '/' << row.split.minority << '\t' << row.questions << '\t'
                                 << row.correct << '\t' << fmt(row.mean_confidence) << '\n';
                }
            }
            out.finish();
        };
    });

    // ---- serve-annotate ----------------------------------------------------
    GraphArgs vg;
    std::string good_file, judgments_out, qc_pairs_out, listen;
    auto* serve = sub("serve-annotate", "Serve questionnaires and collect judgments over HTTP");
    vg.add(serve);
    serve->add_option("--pairs", pairs_file, "Genuine pair pool")->required()->check(CLI::ExistingFile);
    serve->add_option("--good-paths", good_file, "Curated good paths for QC items")
        ->required()
        ->check(CLI::ExistingFile);
    serve->add_option("--judgments-out", judgments_out, "Append-only judgment store")->required();
    serve->add_option("--qc-pairs-out", qc_pairs_out, "Where QC pair records are appended");
    serve->add_option("--listen", listen, "host:port (default: $PATHNAT_ANNOTATE_ADDR or 127.0.0.1:8080)");
    serve->callback([&] {
        action = [&](std::uint64_t) {
            const auto g = vg.load();
            JudgmentStore store{std::filesystem::path(judgments_out)};
            std::optional<std::filesystem::path> qc;
            if (!qc_pairs_out.empty()) qc = qc_pairs_out;
            AnnotationService service(g, load_pairs(pairs_file), load_paths(good_file), store, qc);
            const auto [host, port] = listen_address(listen);
            serve_http(service, host, port, [&](int bound, std::function<void()>) {
                std::cerr << json{{"listening", host + ":" + std::to_string(bound)}}.dump() << std::endl;
            });
        };
    });

    try {
        app.parse(argc, argv);
        for (auto* s : app.get_subcommands()) {
            command = s->get_name();
            const auto hash = fnv1a(command + "\n" + s->config_to_str(true, false));
            action(hash);
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"error", e.what()}, {"kind", "usage"}, {"command", command}}.dump() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << json{{"error", e.what()}, {"kind", "parse"}, {"command", command}, {"line", e.line()}}.dump()
                  << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"kind", "runtime"}, {"command", command}}.dump() << '\n';
        return 1;
    }
    return 0;
}
