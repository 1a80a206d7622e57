#include "pathnat/features.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace pathnat {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "vertex_embedding", "vertex_frequency", "vertex_degree",   "vertex_sense", "edge_similarity",
    "edge_direction",   "edge_relation",    "edge_provenance", "edge_sense"};

std::optional<Feature> feature_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (kFeatureNames[i] == name) return static_cast<Feature>(i);
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Feature f) {
    return kFeatureNames.at(static_cast<std::size_t>(f));
}

FeatureMask FeatureMask::all() {
    FeatureMask m;
    m.bits_.set();
    return m;
}

FeatureMask FeatureMask::with(Feature f) const {
    auto m = *this;
    m.bits_.set(static_cast<std::size_t>(f));
    return m;
}

FeatureMask FeatureMask::without(Feature f) const {
    auto m = *this;
    m.bits_.reset(static_cast<std::size_t>(f));
    return m;
}

FeatureMask FeatureMask::parse(std::string_view spec) {
    FeatureMask m;
    std::size_t begin = 0;
    while (begin <= spec.size()) {
        auto end = spec.find(',', begin);
        if (end == std::string_view::npos) end = spec.size();
        auto tok = spec.substr(begin, end - begin);
        begin = end + 1;
        if (tok.empty()) continue;
        if (tok == "all") {
            m = all();
        } else if (tok == "vertex-only") {
            for (std::size_t i = 0; i < kVertexFeatureCount; ++i) m.bits_.set(i);
        } else if (tok == "edge-only") {
            for (std::size_t i = kVertexFeatureCount; i < kFeatureCount; ++i) m.bits_.set(i);
        } else if (tok == "no-sense") {
            if (m == FeatureMask()) m = all();
            m = m.without(Feature::vertex_sense).without(Feature::edge_sense);
        } else if (tok.front() == '-') {
            if (m == FeatureMask()) m = all();
            const auto f = feature_from_name(tok.substr(1));
            if (!f) throw Error("unknown feature '" + std::string(tok.substr(1)) + "'");
            m = m.without(*f);
        } else {
            const auto f = feature_from_name(tok);
            if (!f) throw Error("unknown feature '" + std::string(tok) + "'");
            m = m.with(*f);
        }
    }
    return m;
}

std::string FeatureMask::to_string() const {
    if (bits_.all()) return "all";
    std::string out;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (!bits_.test(i)) continue;
        if (!out.empty()) out += ',';
        out += kFeatureNames[i];
    }
    return out.empty() ? "none" : out;
}

std::size_t FeatureLayout::vertex_width() const {
    std::size_t w = 0;
    for (auto d : vertex_dims) w += d;
    return w;
}

std::size_t FeatureLayout::edge_width() const {
    std::size_t w = 0;
    for (auto d : edge_dims) w += d;
    return w;
}

Featurizer::Featurizer(const Graph& graph, const EmbeddingTable& table, const SenseInventory* inventory,
                       FeaturizerOptions options)
    : graph_(graph), table_(table), inventory_(inventory), options_(options) {
    std::size_t embedding_dim = table.dimension();
    if (options_.one_hot_vocabulary) {
        const auto& vocab = *options_.one_hot_vocabulary;
        for (std::size_t i = 0; i < vocab.size(); ++i) one_hot_index_.emplace(normalize_concept(vocab[i]), i);
        embedding_dim = vocab.size();
    } else if (options_.pca) {
        if (static_cast<std::size_t>(options_.pca->mean.size()) != table.dimension()) {
            throw Error("PCA projection dimension does not match the embedding table");
        }
        embedding_dim = options_.pca->components();
    }
    layout_.vertex_dims = {embedding_dim, 1, 1, 1};
    layout_.edge_dims = {1, 3, graph.relations().size(), kSourceCount, 1};
}

FeaturizedPath Featurizer::featurize(const Path& path) const {
    const auto n = path.vertices.size();
    if (n < 2 || path.steps.size() != n - 1) throw Error("featurize: malformed path");
    const auto& mask = options_.mask;

    std::vector<std::string> words;
    std::vector<Embedding> raw;
    words.reserve(n);
    raw.reserve(n);
    FeaturizedPath out;
    for (auto v : path.vertices) {
        words.push_back(graph_.label(v));
        raw.push_back(table_.lookup(words.back()));
        out.has_oov = out.has_oov || raw.back().oov;
    }

    std::optional<SenseScorer> scorer;
    SenseAssignment assignment(n);
    if (inventory_) {
        scorer.emplace(table_, *inventory_);
        assignment = scorer->disambiguate(words);
    }

    const auto push = [](std::vector<double>& dst, bool on, std::span<const double> src) {
        if (on) {
            dst.insert(dst.end(), src.begin(), src.end());
        } else {
            dst.insert(dst.end(), src.size(), 0.0);
        }
    };
    const auto push1 = [&push](std::vector<double>& dst, bool on, double v) {
        push(dst, on, std::span<const double>(&v, 1));
    };

    for (std::size_t i = 0; i < n; ++i) {
        PathItem vi;
        vi.vertex = true;
        vi.values.reserve(layout_.vertex_width());
        if (options_.one_hot_vocabulary) {
            std::vector<double> onehot(layout_.vertex_dims[0], 0.0);
            if (auto it = one_hot_index_.find(words[i]); it != one_hot_index_.end()) onehot[it->second] = 1.0;
            push(vi.values, mask.has(Feature::vertex_embedding), onehot);
        } else if (options_.pca) {
            push(vi.values, mask.has(Feature::vertex_embedding),
                 raw[i].oov ? std::vector<double>(layout_.vertex_dims[0], 0.0) : options_.pca->project(raw[i].values));
        } else {
            push(vi.values, mask.has(Feature::vertex_embedding), raw[i].values);
        }
        push1(vi.values, mask.has(Feature::vertex_frequency), zipf_frequency(table_, words[i]));
        push1(vi.values, mask.has(Feature::vertex_degree), static_cast<double>(graph_.degree(path.vertices[i])));
        push1(vi.values, mask.has(Feature::vertex_sense), scorer ? scorer->vertex_score(words, assignment, i) : 1.0);
        out.items.push_back(std::move(vi));

        if (i + 1 == n) break;
        const auto& step = path.steps[i];
        const auto& edge = graph_.edge(step.edge);
        PathItem ei;
        ei.vertex = false;
        ei.values.reserve(layout_.edge_width());
        push1(ei.values, mask.has(Feature::edge_similarity), cosine(raw[i].values, raw[i + 1].values));
        std::vector<double> dir(3, 0.0);
        dir[static_cast<std::size_t>(step.direction)] = 1.0;
        push(ei.values, mask.has(Feature::edge_direction), dir);
        std::vector<double> rel(layout_.edge_dims[2], 0.0);
        rel[edge.relation] = 1.0;
        push(ei.values, mask.has(Feature::edge_relation), rel);
        push(ei.values, mask.has(Feature::edge_provenance), edge.provenance);
        push1(ei.values, mask.has(Feature::edge_sense), scorer ? scorer->edge_score(words, assignment, i) : 1.0);
        out.items.push_back(std::move(ei));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cache format

namespace {

constexpr std::string_view kMagic = "pathnat-features";
constexpr int kFormatVersion = 1;

std::vector<std::size_t> read_dims(std::istream& in, std::string_view key) {
    std::string line;
    if (!std::getline(in, line)) throw Error("featurized file: missing " + std::string(key));
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word != key) throw Error("featurized file: expected " + std::string(key));
    std::vector<std::size_t> dims;
    std::size_t d;
    while (ss >> d) dims.push_back(d);
    return dims;
}

}  // namespace

void write_featurized(std::ostream& out, const FeatureLayout& layout, std::span<const FeaturizedPath> paths) {
    out << kMagic << ' ' << kFormatVersion << '\n';
    out << "vertex_dims";
    for (auto d : layout.vertex_dims) out << ' ' << d;
    out << "\nedge_dims";
    for (auto d : layout.edge_dims) out << ' ' << d;
    out << '\n';
    char buf[32];
    for (const auto& p : paths) {
        out << "path " << p.node_count() << ' ' << (p.has_oov ? 1 : 0) << '\n';
        for (const auto& item : p.items) {
            out << (item.vertex ? 'v' : 'e');
            for (double v : item.values) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << ' ' << buf;
            }
            out << '\n';
        }
    }
}

std::vector<FeaturizedPath> read_featurized(std::istream& in, FeatureLayout& layout) {
    std::string line;
    std::size_t lineno = 1;
    do {
        if (!std::getline(in, line)) throw Error("featurized file: empty");
    } while (!line.empty() && line[0] == '#' && ++lineno);
    {
        std::istringstream ss(line);
        std::string magic;
        int version = 0;
        ss >> magic >> version;
        if (magic != kMagic) throw Error("featurized file: bad header");
        if (version != kFormatVersion) throw Error("featurized file: unsupported version " + std::to_string(version));
    }
    layout.vertex_dims = read_dims(in, "vertex_dims");
    layout.edge_dims = read_dims(in, "edge_dims");
    std::vector<FeaturizedPath> out;
    lineno += 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tag;
        std::size_t nodes = 0;
        int oov = 0;
        ss >> tag >> nodes >> oov;
        if (tag != "path" || nodes < 2) throw ParseError("<featurized>", lineno, "expected path header");
        FeaturizedPath p;
        p.has_oov = oov != 0;
        for (std::size_t k = 0; k < 2 * nodes - 1; ++k) {
            if (!std::getline(in, line)) throw ParseError("<featurized>", lineno, "truncated path");
            ++lineno;
            PathItem item;
            item.vertex = (k % 2 == 0);
            const char expect = item.vertex ? 'v' : 'e';
            if (line.empty() || line[0] != expect) throw ParseError("<featurized>", lineno, "item kind mismatch");
            std::string_view rest(line);
            rest.remove_prefix(1);
            while (!rest.empty()) {
                while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
                if (rest.empty()) break;
                const auto sp = rest.find(' ');
                const auto tok = rest.substr(0, sp);
                double v = 0.0;
                const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (ec != std::errc()) throw ParseError("<featurized>", lineno, "bad number");
                (void)ptr;
                item.values.push_back(v);
                rest.remove_prefix(tok.size());
            }
            const auto width = item.vertex ? layout.vertex_width() : layout.edge_width();
            if (item.values.size() != width) throw ParseError("<featurized>", lineno, "item width mismatch");
            p.items.push_back(std::move(item));
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace pathnat
