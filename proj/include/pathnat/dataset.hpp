#pragma once
// Judgment data: self-contained path records, questionnaires with hidden
// quality-control items, an append-only judgment store and path-disjoint
// train/test splits.
//
// Every record type serializes to one JSON object per line.

#include "pathnat/choice.hpp"
#include "pathnat/graph.hpp"
#include "pathnat/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace pathnat {

inline constexpr std::size_t kGenuineItems = 60;
inline constexpr std::size_t kQcItems = 13;
inline constexpr std::size_t kQuestionnaireItems = kGenuineItems + kQcItems;

struct LabeledStep {
    std::string relation;
    Direction direction = Direction::forward;

    auto operator<=>(const LabeledStep&) const = default;
};

/// A path described by labels only, so datasets do not depend on graph ids.
struct LabeledPath {
    std::vector<std::string> vertices;
    std::vector<LabeledStep> steps;

    auto operator<=>(const LabeledPath&) const = default;
};

LabeledPath label_path(const Graph& g, const Path& p);

/// Maps labels back onto graph edges. Throws when any step is not an edge.
Path resolve(const Graph& g, const LabeledPath& p);
std::optional<Path> try_resolve(const Graph& g, const LabeledPath& p);

/// True when at least one step does not exist in the graph.
bool is_synthetic(const Graph& g, const LabeledPath& p);

std::string format_path(const LabeledPath& p);

struct PathPair {
    std::string id;
    LabeledPath first;
    LabeledPath second;

    bool operator==(const PathPair&) const = default;
};

struct Judgment {
    std::string pair_id;
    Choice choice = Choice::first;
    std::string annotator;
    std::int64_t ts = 0;  // unix seconds

    bool operator==(const Judgment&) const = default;
};

// ---------------------------------------------------------------------------
// Line records

std::string path_to_json(const LabeledPath& p);
LabeledPath path_from_json(std::string_view text);

std::string pair_to_json(const PathPair& p);
PathPair pair_from_json(std::string_view text);

std::string judgment_to_json(const Judgment& j);
Judgment judgment_from_json(std::string_view text);

void write_paths(std::ostream& out, std::span<const LabeledPath> paths);
std::vector<LabeledPath> read_paths(std::istream& in, const std::string& name = "<paths>");

void write_pairs(std::ostream& out, std::span<const PathPair> pairs);
std::vector<PathPair> read_pairs(std::istream& in, const std::string& name = "<pairs>");

void write_judgments(std::ostream& out, std::span<const Judgment> judgments);

/// When known_pairs is given, a judgment naming any other pair id is an error.
std::vector<Judgment> read_judgments(std::istream& in, const std::unordered_set<std::string>* known_pairs = nullptr,
                                     const std::string& name = "<judgments>");

std::vector<LabeledPath> load_paths(const std::filesystem::path& file);
std::vector<PathPair> load_pairs(const std::filesystem::path& file);
std::vector<Judgment> load_judgments(const std::filesystem::path& file,
                                     const std::unordered_set<std::string>* known_pairs = nullptr);

/// pair id -> judgments from distinct annotators, in input order.
using MultiResponseSet = std::map<std::string, std::vector<Judgment>>;

/// Throws when one annotator judged the same pair twice.
MultiResponseSet group_judgments(std::span<const Judgment> judgments);

// ---------------------------------------------------------------------------
// Questionnaires

struct QuestionnaireItem {
    std::string token;    // opaque id shown to the annotator
    std::string pair_id;  // pool pair id, or a generated id for QC items
    LabeledPath first;    // as displayed
    LabeledPath second;
    bool swapped = false;  // displayed order is the reverse of the pool pair
    bool qc = false;
    Choice qc_answer = Choice::first;  // meaningful only for QC items
};

struct Questionnaire {
    std::uint64_t seed = 0;
    std::vector<QuestionnaireItem> items;

    std::size_t qc_count() const;
    const QuestionnaireItem* find(std::string_view token) const;

    /// The pairs behind the items in pool orientation (QC pairs: good first).
    std::vector<PathPair> pairs() const;
};

/// 60 genuine pairs drawn without replacement from the pool plus 13 QC pairs,
/// each a curated good path against a random bad path of the same length.
/// Items are shuffled and each item's display order is a coin flip.
Questionnaire build_questionnaire(std::span<const PathPair> pool, std::span<const LabeledPath> good_paths,
                                  const Graph& g, std::uint64_t seed);

/// Path of the same node count with independently drawn words and
/// relations; redrawn until at least one step is absent from the graph.
LabeledPath random_bad_path(const Graph& g, std::size_t nodes, Rng& rng);

/// Delivery form: one line per item with token and both paths, no QC data.
std::string questionnaire_to_jsonl(const Questionnaire& q);

struct Answer {
    std::string token;
    Choice choice = Choice::first;
};

std::vector<Answer> read_answers(std::istream& in);
std::string answers_to_jsonl(std::span<const Answer> answers);

enum class RejectReason { incomplete, unknown_item, duplicate_item, qc_failed };
std::string_view to_string(RejectReason r);

struct Verdict {
    bool accepted = false;
    std::optional<RejectReason> reason;
    std::size_t qc_correct = 0;
    std::vector<Judgment> judgments;  // one per item on accept, choices in pool orientation
};

Verdict validate_response(const Questionnaire& q, std::span<const Answer> answers, std::string_view annotator,
                          std::int64_t ts);

// ---------------------------------------------------------------------------
// Storage

/// Append-only; appends are serialized and reads return a snapshot.
class JudgmentStore {
public:
    JudgmentStore() = default;
    /// Existing records in `file` are loaded; new ones are appended to it.
    explicit JudgmentStore(std::filesystem::path file);

    void append(std::span<const Judgment> judgments);
    std::vector<Judgment> snapshot() const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::optional<std::filesystem::path> file_;
    std::vector<Judgment> judgments_;
};

// ---------------------------------------------------------------------------
// Training sets

/// Distinct paths and one example per judgment, indexed into `paths`.
struct JudgedData {
    std::vector<LabeledPath> paths;
    std::vector<PairExample> examples;
};

/// Judgments naming unknown pairs are an error.
JudgedData collect_examples(std::span<const PathPair> pairs, std::span<const Judgment> judgments);

struct Split {
    std::vector<std::size_t> train_paths;  // sorted
    std::vector<std::size_t> test_paths;   // sorted
    std::vector<PairExample> train;
    std::vector<PairExample> test;
};

/// Shuffles path indices, gives the first round(ratio * n) to training, and
/// keeps only examples whose two paths fall on the same side.
Split split_train_test(std::size_t path_count, std::span<const PairExample> examples, double train_ratio,
                       std::uint64_t seed);

struct PairIndex {
    std::size_t first = 0;
    std::size_t second = 0;
};

struct CountSplit {
    std::vector<std::size_t> train_paths;
    std::vector<std::size_t> test_paths;
    std::vector<PairIndex> train_pairs;
    std::vector<PairIndex> test_pairs;
};

/// Disjoint path subsets of the given sizes and distinct unordered pairs
/// drawn inside each subset.
CountSplit split_by_counts(std::size_t path_count, std::size_t train_paths, std::size_t test_paths,
                           std::size_t train_pairs, std::size_t test_pairs, std::uint64_t seed);

/// `count` distinct unordered pairs over `members`, random display order.
std::vector<PairIndex> pair_up(std::span<const std::size_t> members, std::size_t count, Rng& rng);

}  // namespace pathnat
