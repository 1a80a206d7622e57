#include "pathnat/agreement.hpp"

#include <map>

namespace pathnat {

std::vector<QuestionSplit> opinion_splits(const MultiResponseSet& set) {
    std::vector<QuestionSplit> out;
    for (const auto& [id, judgments] : set) {
        if (judgments.empty()) throw Error("question " + id + " has no responses");
        std::size_t first = 0;
        for (const auto& j : judgments) first += j.choice == Choice::first ? 1 : 0;
        const std::size_t second = judgments.size() - first;
        QuestionSplit q;
        q.pair_id = id;
        q.majority_choice = first >= second ? Choice::first : Choice::second;
        q.split = {std::max(first, second), std::min(first, second)};
        out.push_back(std::move(q));
    }
    return out;
}

double agreement_upper_bound(std::span<const OpinionSplit> splits) {
    if (splits.empty()) throw Error("agreement: empty response set");
    double total = 0.0;
    for (const auto& s : splits) {
        if (s.panel() == 0 || s.majority < s.minority) throw Error("agreement: malformed opinion split");
        total += static_cast<double>(s.majority) / static_cast<double>(s.panel());
    }
    return total / static_cast<double>(splits.size());
}

double agreement_upper_bound(const MultiResponseSet& set) {
    std::vector<OpinionSplit> splits;
    for (const auto& q : opinion_splits(set)) splits.push_back(q.split);
    return agreement_upper_bound(splits);
}

std::vector<ConfidenceRow> confidence_analysis(std::span<const QuestionSplit> questions, const PairScoreFn& scores) {
    std::map<OpinionSplit, ConfidenceRow> rows;
    for (const auto& q : questions) {
        if (q.split.tie()) continue;
        auto [m1, m2] = scores(q.pair_id);
        if (q.majority_choice == Choice::second) std::swap(m1, m2);
        auto& row = rows[q.split];
        row.split = q.split;
        ++row.questions;
        if (m1 > m2) ++row.correct;
        row.mean_confidence += predict_pair(m1, m2);
    }
    std::vector<ConfidenceRow> out;
    for (auto& [split, row] : rows) {
        row.mean_confidence /= static_cast<double>(row.questions);
        out.push_back(row);
    }
    return out;
}

}  // namespace pathnat
