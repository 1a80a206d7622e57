#pragma once
// Heuristic path scorers used as comparison points and ranking strategies.

#include "pathnat/embed.hpp"
#include "pathnat/graph.hpp"
#include "pathnat/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

namespace pathnat {

enum class BaselineKind { source_target, pairwise, flow, length };

std::string_view to_string(BaselineKind k);
std::optional<BaselineKind> parse_baseline(std::string_view s);  // "st", "pair", "flow", "length"

/// Cosine of the endpoint embeddings.
double st_score(const Graph& g, const Path& p, const EmbeddingTable& table);

/// Mean cosine over the path's edges.
double pair_score(const Graph& g, const Path& p, const EmbeddingTable& table);

/// Unit resource leaves v1 split over deg(v1) edges; each interior vertex
/// forwards its share over deg(v) - 1 edges (the arrival edge excluded).
double flow_score(const Graph& g, const Path& p);

/// -n plus a jitter in (0, 1) derived from the path content and the seed.
double length_score(const Graph& g, const Path& p, std::uint64_t seed);

/// Dispatch; `table` is required for source_target and pairwise.
double baseline_score(BaselineKind kind, const Graph& g, const Path& p, const EmbeddingTable* table,
                      std::uint64_t seed);

/// Any path ranking function; higher means more natural.
using PathScorer = std::function<double(const Path&)>;

/// The referenced objects must outlive the scorer.
PathScorer model_scorer(const Featurizer& featurizer, const ModelParameters& params);
PathScorer baseline_scorer(BaselineKind kind, const Graph& g, const EmbeddingTable* table, std::uint64_t seed);

}  // namespace pathnat
