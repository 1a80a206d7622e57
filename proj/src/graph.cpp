#include "pathnat/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace pathnat {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        const auto pos = s.find(sep, begin);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(begin));
            return out;
        }
        out.push_back(s.substr(begin, pos - begin));
        begin = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool skippable(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Provenance split_weight(double weight, std::uint8_t sources) {
    Provenance p{};
    double total = 0.0;
    for (std::size_t s = 0; s < kSourceCount; ++s) {
        if (sources & (1u << s)) total += canonical_source_weight(static_cast<Source>(s));
    }
    for (std::size_t s = 0; s < kSourceCount; ++s) {
        if (sources & (1u << s)) {
            p[s] = weight * canonical_source_weight(static_cast<Source>(s)) / total;
        }
    }
    return p;
}

}  // namespace

UnknownConcept::UnknownConcept(std::string_view label)
    : Error("unknown concept: " + std::string(label)) {}

std::string normalize_concept(std::string_view raw) {
    std::string out;
    bool pending_sep = false;
    for (char ch : trim(raw)) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c) || ch == '_') {
            pending_sep = !out.empty();
            continue;
        }
        if (pending_sep) {
            out.push_back('_');
            pending_sep = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::forward: return "forward";
        case Direction::backward: return "backward";
        case Direction::bidirectional: return "bidirectional";
    }
    return "?";
}

Direction parse_direction(std::string_view s) {
    if (s == "forward") return Direction::forward;
    if (s == "backward") return Direction::backward;
    if (s == "bidirectional") return Direction::bidirectional;
    throw Error("unknown direction: " + std::string(s));
}

Direction reversed(Direction d) {
    switch (d) {
        case Direction::forward: return Direction::backward;
        case Direction::backward: return Direction::forward;
        case Direction::bidirectional: return Direction::bidirectional;
    }
    return d;
}

std::string_view to_string(Source s) {
    static constexpr std::array<std::string_view, kSourceCount> names{
        "wordnet", "dbpedia", "verbosity", "wiktionary", "opencyc", "omcs"};
    return names.at(static_cast<std::size_t>(s));
}

std::optional<Source> parse_source(std::string_view s) {
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (std::size_t i = 0; i < kSourceCount; ++i) {
        if (lower == to_string(static_cast<Source>(i))) return static_cast<Source>(i);
    }
    if (lower == "open_mind_common_sense") return Source::omcs;
    return std::nullopt;
}

double canonical_source_weight(Source s) {
    return s == Source::wordnet ? 2.0 : 1.0;
}

// ---------------------------------------------------------------------------
// RelationTable

RelationTable RelationTable::conceptnet() {
    static const std::array<std::string_view, 6> symmetric{
        "RelatedTo", "Synonym", "Antonym", "DistinctFrom", "SimilarTo", "EtymologicallyRelatedTo"};
    static const std::array<std::string_view, 46> names{
        "RelatedTo", "FormOf", "IsA", "PartOf", "HasA", "UsedFor", "CapableOf", "AtLocation",
        "Causes", "HasSubevent", "HasFirstSubevent", "HasLastSubevent", "HasPrerequisite",
        "HasProperty", "MotivatedByGoal", "ObstructedBy", "Desires", "CreatedBy", "Synonym",
        "Antonym", "DistinctFrom", "DerivedFrom", "SymbolOf", "DefinedAs", "MannerOf",
        "LocatedNear", "HasContext", "SimilarTo", "EtymologicallyRelatedTo",
        "EtymologicallyDerivedFrom", "CausesDesire", "MadeOf", "ReceivesAction", "InstanceOf",
        "Entails", "NotDesires", "NotUsedFor", "NotCapableOf", "NotHasProperty",
        "dbpedia/capital", "dbpedia/field", "dbpedia/genre", "dbpedia/genus",
        "dbpedia/influencedBy", "dbpedia/knownFor", "dbpedia/language"};
    RelationTable t;
    for (auto n : names) {
        const bool sym = std::find(symmetric.begin(), symmetric.end(), n) != symmetric.end();
        t.add(std::string(n), sym ? Directionality::symmetric : Directionality::directed);
    }
    return t;
}

RelationTable RelationTable::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open relation table: " + file.string());
    RelationTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        auto cols = split(trim(line), '\t');
        if (cols.size() != 2) throw ParseError(file.string(), lineno, "expected 2 columns");
        const auto name = trim(cols[0]);
        const auto cls = trim(cols[1]);
        Directionality d;
        if (cls == "directed") {
            d = Directionality::directed;
        } else if (cls == "symmetric") {
            d = Directionality::symmetric;
        } else {
            throw ParseError(file.string(), lineno, "bad directionality '" + std::string(cls) + "'");
        }
        if (name.empty()) throw ParseError(file.string(), lineno, "empty relation name");
        if (t.find(name)) throw ParseError(file.string(), lineno, "duplicate relation " + std::string(name));
        t.add(std::string(name), d);
    }
    return t;
}

RelationId RelationTable::add(std::string name, Directionality dir) {
    if (index_.count(name)) throw Error("duplicate relation: " + name);
    const auto id = static_cast<RelationId>(names_.size());
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    classes_.push_back(dir);
    return id;
}

void RelationTable::save(std::ostream& out) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        out << names_[i] << '\t'
            << (classes_[i] == Directionality::symmetric ? "symmetric" : "directed") << '\n';
    }
}

std::optional<RelationId> RelationTable::find(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

RelationId RelationTable::at(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw Error("unknown relation: " + std::string(name));
}

bool RelationTable::operator==(const RelationTable& o) const {
    return names_ == o.names_ && classes_ == o.classes_;
}

// ---------------------------------------------------------------------------
// GraphBuilder

std::size_t GraphBuilder::KeyHash::operator()(const Key& k) const {
    std::uint64_t h = fnv1a(k.start);
    h = fnv1a("\t", h);
    h = fnv1a(k.end, h);
    return static_cast<std::size_t>(mix64(h ^ k.relation));
}

GraphBuilder::GraphBuilder(RelationTable relations) : relations_(std::move(relations)) {}

void GraphBuilder::add(std::string_view start, std::string_view end, std::string_view relation,
                       double weight, std::span<const Source> sources) {
    auto s = normalize_concept(start);
    auto e = normalize_concept(end);
    if (s.empty() || e.empty()) throw Error("empty concept label");
    if (s == e) throw Error("self-loop on concept " + s);
    if (!(weight >= 0.0)) throw Error("negative or NaN edge weight");
    if (sources.empty()) throw Error("edge without provenance source");
    const auto rel = relations_.at(relation);
    if (relations_.symmetric(rel) && e < s) std::swap(s, e);
    auto& acc = rows_[Key{std::move(s), std::move(e), rel}];
    acc.weight += weight;
    for (auto src : sources) acc.sources |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(src));
}

Graph GraphBuilder::build() && {
    Graph g;
    std::set<std::string> labels;
    for (const auto& [k, _] : rows_) {
        labels.insert(k.start);
        labels.insert(k.end);
    }
    g.labels_.assign(labels.begin(), labels.end());
    for (std::size_t i = 0; i < g.labels_.size(); ++i) {
        g.index_.emplace(g.labels_[i], static_cast<ConceptId>(i));
    }
    for (const auto& [k, acc] : rows_) {
        Edge e;
        e.start = g.index_.at(k.start);
        e.end = g.index_.at(k.end);
        e.relation = k.relation;
        e.weight = acc.weight;
        e.sources = acc.sources;
        e.provenance = split_weight(acc.weight, acc.sources);
        g.edges_.push_back(e);
    }
    const auto& rel = relations_;
    std::sort(g.edges_.begin(), g.edges_.end(), [&](const Edge& a, const Edge& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end < b.end;
        return rel.name(a.relation) < rel.name(b.relation);
    });
    g.relations_ = std::move(relations_);

    std::vector<std::vector<EdgeId>> adj(g.labels_.size());
    for (EdgeId i = 0; i < g.edges_.size(); ++i) {
        adj[g.edges_[i].start].push_back(i);
        adj[g.edges_[i].end].push_back(i);
    }
    g.adjacency_offsets_.push_back(0);
    for (auto& list : adj) {
        g.adjacency_.insert(g.adjacency_.end(), list.begin(), list.end());
        g.adjacency_offsets_.push_back(g.adjacency_.size());
    }
    return g;
}

// ---------------------------------------------------------------------------
// Graph

Graph Graph::load(const std::filesystem::path& edge_file, RelationTable relations) {
    std::ifstream in(edge_file);
    if (!in) throw Error("cannot open edge file: " + edge_file.string());
    return parse(in, std::move(relations), edge_file.string());
}

Graph Graph::parse(std::istream& in, RelationTable relations, const std::string& name) {
    GraphBuilder builder(std::move(relations));
    std::string line;
    std::size_t lineno = 0;
    std::vector<Source> sources;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto cols = split(line, '\t');
        if (cols.size() != 5) {
            throw ParseError(name, lineno, "expected 5 tab-separated columns, got " + std::to_string(cols.size()));
        }
        const auto weight = parse_double(cols[3]);
        if (!weight || *weight < 0.0) throw ParseError(name, lineno, "bad weight '" + std::string(cols[3]) + "'");
        sources.clear();
        for (auto entry : split(trim(cols[4]), ',')) {
            entry = trim(entry);
            const auto colon = entry.find(':');
            const auto src_name = entry.substr(0, colon);
            const auto src = parse_source(src_name);
            if (!src) throw ParseError(name, lineno, "unknown provenance source '" + std::string(src_name) + "'");
            if (colon != std::string_view::npos) {
                const auto w = parse_double(entry.substr(colon + 1));
                if (!w || *w < 0.0) throw ParseError(name, lineno, "bad source weight in '" + std::string(entry) + "'");
            }
            sources.push_back(*src);
        }
        try {
            builder.add(cols[0], cols[1], trim(cols[2]), *weight, sources);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(name, lineno, e.what());
        }
    }
    return std::move(builder).build();
}

void Graph::save(std::ostream& out) const {
    for (const auto& e : edges_) {
        out << labels_[e.start] << '\t' << labels_[e.end] << '\t' << relations_.name(e.relation) << '\t'
            << format_double(e.weight) << '\t';
        bool first = true;
        for (std::size_t s = 0; s < kSourceCount; ++s) {
            if (!(e.sources & (1u << s))) continue;
            if (!first) out << ',';
            first = false;
            out << to_string(static_cast<Source>(s)) << ':' << format_double(e.provenance[s]);
        }
        out << '\n';
    }
}

std::optional<ConceptId> Graph::find(std::string_view label) const {
    const auto it = index_.find(normalize_concept(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

ConceptId Graph::id(std::string_view label) const {
    if (auto c = find(label)) return *c;
    throw UnknownConcept(label);
}

std::span<const EdgeId> Graph::incident(ConceptId c) const {
    if (c >= labels_.size()) throw UnknownConcept("#" + std::to_string(c));
    return std::span<const EdgeId>(adjacency_).subspan(adjacency_offsets_[c],
                                                       adjacency_offsets_[c + 1] - adjacency_offsets_[c]);
}

ConceptId Graph::other_end(EdgeId e, ConceptId from) const {
    const auto& ed = edges_.at(e);
    return ed.start == from ? ed.end : ed.start;
}

Direction Graph::traversal(EdgeId e, ConceptId from) const {
    const auto& ed = edges_.at(e);
    if (relations_.symmetric(ed.relation)) return Direction::bidirectional;
    return ed.start == from ? Direction::forward : Direction::backward;
}

std::vector<EdgeId> Graph::edges_between(ConceptId a, ConceptId b) const {
    std::vector<EdgeId> out;
    for (auto e : incident(a)) {
        if (other_end(e, a) == b) out.push_back(e);
    }
    return out;
}

bool Graph::operator==(const Graph& o) const {
    return relations_ == o.relations_ && labels_ == o.labels_ && edges_ == o.edges_;
}

// ---------------------------------------------------------------------------
// Paths

namespace {

struct PathOrder {
    const Graph& g;

    bool operator()(const Path& a, const Path& b) const {
        const auto lab = [&](ConceptId c) -> const std::string& { return g.label(c); };
        const auto n = std::min(a.vertices.size(), b.vertices.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (a.vertices[i] != b.vertices[i]) return lab(a.vertices[i]) < lab(b.vertices[i]);
        }
        if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
        for (std::size_t i = 0; i < a.steps.size(); ++i) {
            const auto& ra = g.relations().name(g.edge(a.steps[i].edge).relation);
            const auto& rb = g.relations().name(g.edge(b.steps[i].edge).relation);
            if (ra != rb) return ra < rb;
        }
        for (std::size_t i = 0; i < a.steps.size(); ++i) {
            if (a.steps[i].direction != b.steps[i].direction) return a.steps[i].direction < b.steps[i].direction;
        }
        for (std::size_t i = 0; i < a.steps.size(); ++i) {
            if (a.steps[i].edge != b.steps[i].edge) return a.steps[i].edge < b.steps[i].edge;
        }
        return false;
    }
};

void dfs(const Graph& g, ConceptId target, std::size_t max_nodes, const VertexMask* allowed,
         std::vector<bool>& on_path, Path& current, std::vector<Path>& out) {
    const auto here = current.vertices.back();
    for (auto e : g.incident(here)) {
        const auto next = g.other_end(e, here);
        if (on_path[next]) continue;
        current.vertices.push_back(next);
        current.steps.push_back({e, g.traversal(e, here)});
        if (next == target) {
            out.push_back(current);
        } else if (current.vertices.size() < max_nodes && (!allowed || (*allowed)[next])) {
            on_path[next] = true;
            dfs(g, target, max_nodes, allowed, on_path, current, out);
            on_path[next] = false;
        }
        current.vertices.pop_back();
        current.steps.pop_back();
    }
}

}  // namespace

std::vector<Path> enumerate_paths(const Graph& g, ConceptId source, ConceptId target,
                                  std::size_t max_nodes, const VertexMask* allowed) {
    if (source >= g.concept_count()) throw UnknownConcept("#" + std::to_string(source));
    if (target >= g.concept_count()) throw UnknownConcept("#" + std::to_string(target));
    if (source == target) throw Error("enumerate_paths: source equals target");
    if (max_nodes < 2) throw Error("enumerate_paths: max_nodes must be at least 2");
    std::vector<Path> out;
    std::vector<bool> on_path(g.concept_count(), false);
    on_path[source] = true;
    Path current;
    current.vertices.push_back(source);
    dfs(g, target, max_nodes, allowed, on_path, current, out);
    std::sort(out.begin(), out.end(), PathOrder{g});
    return out;
}

std::vector<Path> enumerate_paths(const Graph& g, std::string_view source, std::string_view target,
                                  std::size_t max_nodes) {
    const auto s = g.id(source);
    const auto t = g.id(target);
    return enumerate_paths(g, s, t, max_nodes);
}

std::string check_path(const Graph& g, const Path& p, std::size_t max_nodes) {
    const auto n = p.vertices.size();
    if (n < 2) return "path has fewer than 2 vertices";
    if (n > max_nodes) return "path exceeds max_nodes";
    if (p.steps.size() != n - 1) return "edge count is not vertex count - 1";
    std::set<ConceptId> seen;
    for (auto v : p.vertices) {
        if (v >= g.concept_count()) return "vertex not in graph";
        if (!seen.insert(v).second) return "repeated vertex " + g.label(v);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto& st = p.steps[i];
        if (st.edge >= g.edge_count()) return "edge not in graph";
        const auto& e = g.edge(st.edge);
        const auto a = p.vertices[i];
        const auto b = p.vertices[i + 1];
        if (!((e.start == a && e.end == b) || (e.start == b && e.end == a))) {
            return "edge " + std::to_string(i) + " not incident to its vertices";
        }
        if (st.direction != g.traversal(st.edge, a)) {
            return "edge " + std::to_string(i) + " has wrong traversal direction";
        }
    }
    return {};
}

Path reverse_path(const Graph& g, const Path& p) {
    Path r;
    r.vertices.assign(p.vertices.rbegin(), p.vertices.rend());
    for (auto it = p.steps.rbegin(); it != p.steps.rend(); ++it) {
        r.steps.push_back({it->edge, reversed(it->direction)});
    }
    (void)g;
    return r;
}

PathType path_type(const Graph& g, const Path& p) {
    PathType t;
    t.reserve(p.steps.size());
    for (const auto& st : p.steps) t.push_back({g.edge(st.edge).relation, st.direction});
    return t;
}

std::string format_path(const Graph& g, const Path& p) {
    std::string out;
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        out += g.label(p.vertices[i]);
        if (i < p.steps.size()) {
            const auto& rel = g.relations().name(g.edge(p.steps[i].edge).relation);
            switch (p.steps[i].direction) {
                case Direction::forward: out += " -" + rel + "-> "; break;
                case Direction::backward: out += " <-" + rel + "- "; break;
                case Direction::bidirectional: out += " <-" + rel + "-> "; break;
            }
        }
    }
    return out;
}

std::vector<std::string> sample_vocabulary(const Graph& g, std::string_view center,
                                           const std::unordered_set<std::string>& allowed,
                                           std::size_t count, std::uint64_t seed) {
    if (count == 0) throw Error("sample_vocabulary: count must be at least 1");
    const auto start = g.id(center);
    if (!allowed.count(g.label(start))) throw Error("sample_vocabulary: center word not allowed");
    std::vector<bool> ok(g.concept_count(), false);
    for (ConceptId c = 0; c < g.concept_count(); ++c) ok[c] = allowed.count(g.label(c)) > 0;

    // Reachability first, so an infeasible request fails instead of walking forever.
    std::vector<bool> reach(g.concept_count(), false);
    std::vector<ConceptId> frontier{start};
    reach[start] = true;
    std::size_t reachable = 1;
    while (!frontier.empty()) {
        const auto c = frontier.back();
        frontier.pop_back();
        for (auto e : g.incident(c)) {
            const auto n = g.other_end(e, c);
            if (ok[n] && !reach[n]) {
                reach[n] = true;
                ++reachable;
                frontier.push_back(n);
            }
        }
    }
    if (reachable < count) {
        throw Error("sample_vocabulary: only " + std::to_string(reachable) +
                    " allowed words reachable from " + g.label(start) + ", requested " + std::to_string(count));
    }

    Rng rng(seed);
    std::vector<std::string> words{g.label(start)};
    std::vector<bool> seen(g.concept_count(), false);
    seen[start] = true;
    auto current = start;
    std::vector<ConceptId> moves;
    while (words.size() < count) {
        moves.clear();
        for (auto e : g.incident(current)) {
            const auto n = g.other_end(e, current);
            if (ok[n]) moves.push_back(n);
        }
        current = moves[rng.uniform_index(moves.size())];
        if (!seen[current]) {
            seen[current] = true;
            words.push_back(g.label(current));
        }
    }
    return words;
}

std::vector<Path> sample_paths(const Graph& g, const std::unordered_set<std::string>* vocabulary,
                               std::size_t max_nodes, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw Error("sample_paths: count must be at least 1");
    if (max_nodes < 2) throw Error("sample_paths: max_nodes must be at least 2");
    VertexMask mask(g.concept_count(), vocabulary == nullptr);
    std::vector<ConceptId> endpoints;
    for (ConceptId c = 0; c < g.concept_count(); ++c) {
        if (vocabulary && vocabulary->count(g.label(c))) mask[c] = true;
        if (mask[c]) endpoints.push_back(c);
    }
    if (endpoints.size() < 2) throw Error("sample_paths: fewer than two vocabulary words in graph");

    Rng rng(seed);
    std::map<std::pair<ConceptId, ConceptId>, std::vector<Path>> cache;
    std::set<std::pair<std::vector<ConceptId>, std::vector<Step>>, std::less<>> taken;
    auto step_key = [](const Path& p) { return std::pair{p.vertices, p.steps}; };
    std::vector<Path> out;
    const std::size_t budget = 100 * count + 10000;
    for (std::size_t attempt = 0; attempt < budget && out.size() < count; ++attempt) {
        auto i = rng.uniform_index(endpoints.size());
        auto j = rng.uniform_index(endpoints.size() - 1);
        if (j >= i) ++j;
        auto a = endpoints[std::min(i, j)];
        auto b = endpoints[std::max(i, j)];
        auto [it, fresh] = cache.try_emplace({a, b});
        if (fresh) it->second = enumerate_paths(g, a, b, max_nodes, &mask);
        const auto& candidates = it->second;
        if (candidates.empty()) continue;
        const auto& chosen = candidates[rng.uniform_index(candidates.size())];
        const bool flip = rng.coin();
        if (!taken.insert(step_key(chosen)).second) continue;
        out.push_back(flip ? reverse_path(g, chosen) : chosen);
    }
    if (out.size() < count) {
        throw Error("sample_paths: insufficient distinct paths, found " + std::to_string(out.size()) + " of " +
                    std::to_string(count));
    }
    return out;
}

}  // namespace pathnat
