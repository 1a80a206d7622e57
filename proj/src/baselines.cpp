#include "pathnat/baselines.hpp"

namespace pathnat {

std::string_view to_string(BaselineKind k) {
    switch (k) {
    case BaselineKind::source_target: return "st";
    case BaselineKind::pairwise: return "pair";
    case BaselineKind::flow: return "flow";
    case BaselineKind::length: return "length";
    }
    return "?";
}

std::optional<BaselineKind> parse_baseline(std::string_view s) {
    if (s == "st") return BaselineKind::source_target;
    if (s == "pair") return BaselineKind::pairwise;
    if (s == "flow") return BaselineKind::flow;
    if (s == "length") return BaselineKind::length;
    return std::nullopt;
}

double st_score(const Graph& g, const Path& p, const EmbeddingTable& table) {
    const auto a = table.lookup(g.label(p.vertices.front()));
    const auto b = table.lookup(g.label(p.vertices.back()));
    return cosine(a.values, b.values);
}

double pair_score(const Graph& g, const Path& p, const EmbeddingTable& table) {
    if (p.vertices.size() < 2) throw Error("pair_score: path needs at least two vertices");
    double total = 0.0;
    auto prev = table.lookup(g.label(p.vertices[0]));
    for (std::size_t i = 1; i < p.vertices.size(); ++i) {
        auto cur = table.lookup(g.label(p.vertices[i]));
        total += cosine(prev.values, cur.values);
        prev = std::move(cur);
    }
    return total / static_cast<double>(p.vertices.size() - 1);
}

double flow_score(const Graph& g, const Path& p) {
    if (p.vertices.size() < 2) throw Error("flow_score: path needs at least two vertices");
    double resource = 1.0 / static_cast<double>(g.degree(p.vertices.front()));
    for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i) {
        resource /= static_cast<double>(g.degree(p.vertices[i]) - 1);
    }
    return resource;
}

double length_score(const Graph& g, const Path& p, std::uint64_t seed) {
    std::uint64_t h = fnv1a("", mix64(seed));
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        h = fnv1a(g.label(p.vertices[i]), h);
        h = fnv1a("\x1f", h);
        if (i < p.steps.size()) {
            const auto& e = g.edge(p.steps[i].edge);
            h = fnv1a(g.relations().name(e.relation), h);
            h = fnv1a(to_string(p.steps[i].direction), h);
            h = fnv1a("\x1e", h);
        }
    }
    const double jitter = (static_cast<double>(mix64(h) >> 11) + 0.5) * 0x1p-53;
    return -static_cast<double>(p.vertices.size()) + jitter;
}

double baseline_score(BaselineKind kind, const Graph& g, const Path& p, const EmbeddingTable* table,
                      std::uint64_t seed) {
    switch (kind) {
    case BaselineKind::source_target:
    case BaselineKind::pairwise:
        if (!table) throw Error("baseline '" + std::string(to_string(kind)) + "' needs word vectors");
        return kind == BaselineKind::source_target ? st_score(g, p, *table) : pair_score(g, p, *table);
    case BaselineKind::flow: return flow_score(g, p);
    case BaselineKind::length: return length_score(g, p, seed);
    }
    throw Error("unknown baseline");
}

PathScorer model_scorer(const Featurizer& featurizer, const ModelParameters& params) {
    return [&featurizer, &params](const Path& p) { return score_path(featurizer.featurize(p), params); };
}

PathScorer baseline_scorer(BaselineKind kind, const Graph& g, const EmbeddingTable* table, std::uint64_t seed) {
    if ((kind == BaselineKind::source_target || kind == BaselineKind::pairwise) && !table) {
        throw Error("baseline '" + std::string(to_string(kind)) + "' needs word vectors");
    }
    return [kind, &g, table, seed](const Path& p) { return baseline_score(kind, g, p, table, seed); };
}

}  // namespace pathnat
