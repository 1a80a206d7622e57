#pragma once
// Graph: an immutable ConceptNet-style multigraph plus relational path
// enumeration and seeded sampling.
//
// Concepts are interned in sorted label order and edges are stored sorted by
// (start, end, relation), so a graph built from the same rows in any order is
// identical, and re-serialization is canonical.
//
// Edge dump format (UTF-8 TSV, '#' comments allowed):
//   start  end  relation  weight  source[:weight][,source[:weight]...]
// Relation table format:
//   name  directed|symmetric

#include "pathnat/rng.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace pathnat {

using ConceptId = std::uint32_t;
using EdgeId = std::uint32_t;
using RelationId = std::uint16_t;

class UnknownConcept : public Error {
public:
    explicit UnknownConcept(std::string_view label);
};

/// Lowercases and joins whitespace-separated words with '_'. Idempotent.
std::string normalize_concept(std::string_view raw);

enum class Directionality : std::uint8_t { directed, symmetric };

/// How an edge is traversed along a path. Order matches the direction
/// one-hot feature.
enum class Direction : std::uint8_t { forward = 0, backward = 1, bidirectional = 2 };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);
Direction reversed(Direction d);

/// Edge provenance sources, in feature order.
enum class Source : std::uint8_t { wordnet, dbpedia, verbosity, wiktionary, opencyc, omcs };
inline constexpr std::size_t kSourceCount = 6;
using Provenance = std::array<double, kSourceCount>;

std::string_view to_string(Source s);
std::optional<Source> parse_source(std::string_view s);

/// Typical per-source edge weight, used to split a multi-source weight.
double canonical_source_weight(Source s);

class RelationTable {
public:
    /// The 46 ConceptNet relations. RelatedTo, Synonym, Antonym,
    /// DistinctFrom, SimilarTo and EtymologicallyRelatedTo are symmetric.
    static RelationTable conceptnet();
    static RelationTable load(const std::filesystem::path& file);

    RelationId add(std::string name, Directionality dir);
    void save(std::ostream& out) const;

    std::size_t size() const { return names_.size(); }
    const std::string& name(RelationId id) const { return names_.at(id); }
    Directionality directionality(RelationId id) const { return classes_.at(id); }
    bool symmetric(RelationId id) const { return classes_.at(id) == Directionality::symmetric; }
    std::optional<RelationId> find(std::string_view name) const;
    RelationId at(std::string_view name) const;

    bool operator==(const RelationTable&) const;

private:
    std::vector<std::string> names_;
    std::vector<Directionality> classes_;
    std::unordered_map<std::string, RelationId> index_;
};

struct Edge {
    ConceptId start = 0;
    ConceptId end = 0;
    RelationId relation = 0;
    double weight = 0.0;
    std::uint8_t sources = 0;  // bitmask over Source
    Provenance provenance{};

    bool operator==(const Edge&) const = default;
};

struct Step {
    EdgeId edge = 0;
    Direction direction = Direction::forward;

    auto operator<=>(const Step&) const = default;
};

/// Alternating vertex/edge sequence; steps[i] joins vertices[i] and vertices[i+1].
struct Path {
    std::vector<ConceptId> vertices;
    std::vector<Step> steps;

    std::size_t node_count() const { return vertices.size(); }
    bool operator==(const Path&) const = default;
};

struct PathTypeElement {
    RelationId relation = 0;
    Direction direction = Direction::forward;

    auto operator<=>(const PathTypeElement&) const = default;
};
using PathType = std::vector<PathTypeElement>;

class Graph;

/// Collects raw rows; duplicate (start, end, relation) rows are merged.
class GraphBuilder {
public:
    explicit GraphBuilder(RelationTable relations);

    /// `sources` may not be empty. Symmetric relations are keyed on the
    /// unordered endpoint pair.
    void add(std::string_view start, std::string_view end, std::string_view relation,
             double weight, std::span<const Source> sources);

    Graph build() &&;

private:
    struct Key {
        std::string start, end;
        RelationId relation;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const;
    };
    struct Accum {
        double weight = 0.0;
        std::uint8_t sources = 0;
    };

    RelationTable relations_;
    std::unordered_map<Key, Accum, KeyHash> rows_;
};

class Graph {
public:
    Graph() = default;

    static Graph load(const std::filesystem::path& edge_file, RelationTable relations);
    static Graph parse(std::istream& in, RelationTable relations, const std::string& name = "<stream>");

    /// Canonical dump: rows sorted, weights printed round-trip exact.
    void save(std::ostream& out) const;

    const RelationTable& relations() const { return relations_; }
    std::size_t concept_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    std::optional<ConceptId> find(std::string_view label) const;
    ConceptId id(std::string_view label) const;
    const std::string& label(ConceptId c) const { return labels_.at(c); }

    const Edge& edge(EdgeId e) const { return edges_.at(e); }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const EdgeId> incident(ConceptId c) const;

    /// Incident edge count, both directions.
    std::size_t degree(ConceptId c) const { return incident(c).size(); }
    std::size_t degree(std::string_view label) const { return degree(id(label)); }

    ConceptId other_end(EdgeId e, ConceptId from) const;
    Direction traversal(EdgeId e, ConceptId from) const;
    std::vector<EdgeId> edges_between(ConceptId a, ConceptId b) const;

    bool operator==(const Graph&) const;

private:
    friend class GraphBuilder;

    RelationTable relations_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, ConceptId> index_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> adjacency_offsets_;
    std::vector<EdgeId> adjacency_;
};

/// Optional restriction on which vertices a path may visit (indexed by ConceptId).
using VertexMask = std::vector<bool>;

/// All simple paths from source to target with at most max_nodes vertices,
/// ordered by vertex labels, then relation names, then directions.
std::vector<Path> enumerate_paths(const Graph& g, ConceptId source, ConceptId target,
                                  std::size_t max_nodes, const VertexMask* allowed = nullptr);
std::vector<Path> enumerate_paths(const Graph& g, std::string_view source, std::string_view target,
                                  std::size_t max_nodes);

/// Checks every Path invariant; returns an empty string when valid.
std::string check_path(const Graph& g, const Path& p, std::size_t max_nodes);

Path reverse_path(const Graph& g, const Path& p);
PathType path_type(const Graph& g, const Path& p);

/// Human-readable arrow notation, e.g. "dog -IsA-> animal <-RelatedTo-> pet".
std::string format_path(const Graph& g, const Path& p);

/// Random walk from `center` restricted to allowed words until `count`
/// distinct words are seen. Returned in discovery order.
std::vector<std::string> sample_vocabulary(const Graph& g, std::string_view center,
                                           const std::unordered_set<std::string>& allowed,
                                           std::size_t count, std::uint64_t seed);

/// `count` distinct paths (a path and its reverse count once) among the
/// vocabulary's induced subgraph, or the whole graph when vocabulary is null.
std::vector<Path> sample_paths(const Graph& g, const std::unordered_set<std::string>* vocabulary,
                               std::size_t max_nodes, std::size_t count, std::uint64_t seed);

}  // namespace pathnat
