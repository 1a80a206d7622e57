#pragma once
// Analogy questions answered by comparing the relations on paths that
// connect each word pair.
//
// File format, one question per line:
//   a:b::A:B|C:D|E:F|G:H<whitespace>answer_index   (0-based)

#include "pathnat/baselines.hpp"
#include "pathnat/graph.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pathnat {

using WordPair = std::pair<std::string, std::string>;

struct AnalogyQuestion {
    WordPair query;
    std::array<WordPair, 4> candidates;
    std::optional<std::size_t> answer;
};

AnalogyQuestion parse_analogy(std::string_view line);
std::vector<AnalogyQuestion> load_analogies(const std::filesystem::path& file);

/// Relation name -> count, direction ignored.
using RelationBag = std::map<std::string, std::size_t>;

/// Multiset Jaccard: sum of minimum counts over sum of maximum counts.
double relation_overlap(const RelationBag& a, const RelationBag& b);

/// Relations on the direct edges between a and b.
RelationBag direct_relations(const Graph& g, std::string_view a, std::string_view b);

/// Relations on the 3-node paths from a to b, restricted to the
/// ceil(top_percent% of n) most natural ones. A null scorer keeps all paths.
RelationBag path_relations(const Graph& g, std::string_view a, std::string_view b, const PathScorer* naturalness,
                           double top_percent);

struct AnalogyResult {
    std::optional<std::size_t> choice;  // empty: abstain
    std::array<double, 4> scores{};
    bool direct = false;  // the query pair had direct edges
};

/// Direct edges are compared when both the query and a candidate have them;
/// otherwise filtered 3-node paths are compared. Ties go to the earlier
/// candidate; abstains when the query pair has no connections or every
/// candidate scores zero.
AnalogyResult analogy_solve(const AnalogyQuestion& q, const Graph& g, const PathScorer* naturalness,
                            double top_percent);

struct AnalogyAccuracy {
    std::size_t questions = 0;
    std::size_t answered = 0;
    std::size_t correct = 0;
    double accuracy() const { return questions ? static_cast<double>(correct) / static_cast<double>(questions) : 0.0; }
};

/// Abstentions count as wrong.
AnalogyAccuracy analogy_accuracy(std::span<const AnalogyQuestion> questions, const Graph& g,
                                 const PathScorer* naturalness, double top_percent);

}  // namespace pathnat
