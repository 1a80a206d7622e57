#pragma once
// Inter-annotator agreement on multi-response questions and the model's
// confidence per opinion split.

#include "pathnat/dataset.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pathnat {

struct OpinionSplit {
    std::size_t majority = 0;
    std::size_t minority = 0;

    std::size_t panel() const { return majority + minority; }
    bool tie() const { return majority == minority; }
    auto operator<=>(const OpinionSplit&) const = default;
};

/// Split for one question plus which side the majority picked (first on ties).
struct QuestionSplit {
    std::string pair_id;
    OpinionSplit split;
    Choice majority_choice = Choice::first;
};

std::vector<QuestionSplit> opinion_splits(const MultiResponseSet& set);

/// Mean of majority / panel over questions; a tie contributes 0.5.
double agreement_upper_bound(std::span<const OpinionSplit> splits);
double agreement_upper_bound(const MultiResponseSet& set);

struct ConfidenceRow {
    OpinionSplit split;
    std::size_t questions = 0;
    std::size_t correct = 0;         // majority path scored strictly higher
    double mean_confidence = 0.0;    // mean P(majority choice)
};

/// Scores (m_first, m_second) for a pair id.
using PairScoreFn = std::function<std::pair<double, double>(const std::string& pair_id)>;

/// One row per distinct split, ordered by majority count; tied splits are
/// skipped because they have no majority.
std::vector<ConfidenceRow> confidence_analysis(std::span<const QuestionSplit> questions, const PairScoreFn& scores);

}  // namespace pathnat
