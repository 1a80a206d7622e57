#pragma once
// Path featurization. A path of n vertices becomes an alternating sequence
// of 2n-1 items; vertex items carry (embedding, frequency, degree, sense
// score) and edge items carry (ends similarity, direction one-hot, relation
// one-hot, provenance, sense score). Feature values are concatenated in that
// order inside each item; FeatureLayout gives the widths.

#include "pathnat/embed.hpp"
#include "pathnat/graph.hpp"
#include "pathnat/sense.hpp"

#include <bitset>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pathnat {

enum class Feature : unsigned char {
    vertex_embedding,
    vertex_frequency,
    vertex_degree,
    vertex_sense,
    edge_similarity,
    edge_direction,
    edge_relation,
    edge_provenance,
    edge_sense,
};
inline constexpr std::size_t kFeatureCount = 9;
inline constexpr std::size_t kVertexFeatureCount = 4;
inline constexpr std::size_t kEdgeFeatureCount = 5;

std::string_view to_string(Feature f);

/// Set of enabled features; disabled ones are emitted as zeros.
class FeatureMask {
public:
    static FeatureMask all();
    static FeatureMask none() { return FeatureMask(); }

    /// Accepts "all", "vertex-only", "edge-only", "no-sense", a comma list of
    /// feature names, or "all,-name,..." to drop features.
    static FeatureMask parse(std::string_view spec);

    FeatureMask with(Feature f) const;
    FeatureMask without(Feature f) const;
    bool has(Feature f) const { return bits_.test(static_cast<std::size_t>(f)); }
    std::string to_string() const;

    bool operator==(const FeatureMask&) const = default;

private:
    std::bitset<kFeatureCount> bits_;
};

struct FeatureLayout {
    std::vector<std::size_t> vertex_dims;  // kVertexFeatureCount entries
    std::vector<std::size_t> edge_dims;    // kEdgeFeatureCount entries

    std::size_t vertex_width() const;
    std::size_t edge_width() const;
    bool operator==(const FeatureLayout&) const = default;
};

struct PathItem {
    bool vertex = true;
    std::vector<double> values;  // concatenated features in layout order
};

struct FeaturizedPath {
    std::vector<PathItem> items;
    bool has_oov = false;

    std::size_t node_count() const { return (items.size() + 1) / 2; }
};

struct FeaturizerOptions {
    FeatureMask mask = FeatureMask::all();
    /// Reduces the vertex embedding feature; similarity still uses raw vectors.
    const PcaProjection* pca = nullptr;
    /// Replaces the embedding feature by a one-hot over this closed vocabulary.
    const std::vector<std::string>* one_hot_vocabulary = nullptr;
};

class Featurizer {
public:
    /// Without an inventory every sense score is 1.
    Featurizer(const Graph& graph, const EmbeddingTable& table, const SenseInventory* inventory,
               FeaturizerOptions options = {});

    const FeatureLayout& layout() const { return layout_; }
    FeaturizedPath featurize(const Path& path) const;

private:
    const Graph& graph_;
    const EmbeddingTable& table_;
    const SenseInventory* inventory_;
    FeaturizerOptions options_;
    FeatureLayout layout_;
    std::unordered_map<std::string, std::size_t> one_hot_index_;
};

/// Versioned line format:
///   pathnat-features 1
///   vertex_dims <d...>
///   edge_dims <d...>
///   path <node count> <oov 0|1>
///   v|e <values...>        (2n-1 lines per path)
void write_featurized(std::ostream& out, const FeatureLayout& layout, std::span<const FeaturizedPath> paths);
std::vector<FeaturizedPath> read_featurized(std::istream& in, FeatureLayout& layout);

}  // namespace pathnat
