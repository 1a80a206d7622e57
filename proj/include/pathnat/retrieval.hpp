#pragma once
// TF-IDF retrieval, ranking metrics and path-based query expansion.
//
// Corpus: a directory of plain-text files (doc id = file name without
// extension). Queries: "query_id<TAB>terms". Relevance:
// "query_id<TAB>doc_id<TAB>0|1".

#include "pathnat/baselines.hpp"
#include "pathnat/embed.hpp"
#include "pathnat/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace pathnat {

/// Fixed English stop-word list used by the tokenizer.
const std::unordered_set<std::string>& stopwords();

/// Lowercase, split on anything that is not [a-z0-9], drop stop words.
std::vector<std::string> tokenize(std::string_view text);

struct Document {
    std::string id;
    std::string text;
};

struct SearchHit {
    std::string doc;
    double score = 0.0;
};

/// Weights tf * ln(N / df); cosine ranking.
class TfidfIndex {
public:
    explicit TfidfIndex(std::vector<Document> docs);

    std::size_t size() const { return ids_.size(); }
    std::size_t document_frequency(const std::string& term) const;
    double idf(const std::string& term) const;  // 0 for unseen terms

    /// Documents with positive cosine, best first, ties by document id.
    /// k = 0 returns the full ranking.
    std::vector<SearchHit> search(std::span<const std::string> query_terms, std::size_t k = 0) const;

private:
    using Sparse = std::vector<std::pair<std::uint32_t, double>>;  // term id, weight; sorted by term id
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::uint32_t> term_ids_;
    std::vector<std::size_t> df_;
    std::vector<Sparse> vectors_;
    std::vector<double> norms_;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> postings_;  // term -> (doc, weight)
};

using Relevance = std::map<std::string, std::set<std::string>>;  // query id -> relevant doc ids

double precision_at_k(std::span<const SearchHit> ranked, const std::set<std::string>& relevant, std::size_t k);

/// Mean of precision at each relevant hit, divided by |relevant|.
double average_precision(std::span<const SearchHit> ranked, const std::set<std::string>& relevant);
double mean_average_precision(std::span<const double> per_query_ap);

std::vector<Document> load_corpus(const std::filesystem::path& dir);
std::map<std::string, std::string> load_queries(const std::filesystem::path& file);
Relevance load_relevance(const std::filesystem::path& file);

struct RetrievalScores {
    double precision_at_10 = 0.0;
    double map = 0.0;
    std::map<std::string, double> ap;  // per query
    std::map<std::string, double> p10;
};

/// Evaluates every query that has a relevance entry.
RetrievalScores evaluate_queries(const TfidfIndex& index, const std::map<std::string, std::string>& queries,
                                 const Relevance& relevance);

/// Queries whose unexpanded P@10 is zero.
std::vector<std::string> hard_queries(const TfidfIndex& index, const std::map<std::string, std::string>& queries,
                                      const Relevance& relevance);

enum class ExpansionStrategy { naturalness, pairwise, length, random, naturalness_length };
std::string_view to_string(ExpansionStrategy s);
std::optional<ExpansionStrategy> parse_expansion_strategy(std::string_view s);

struct ExpansionInputs {
    const Graph* graph = nullptr;
    const PathScorer* naturalness = nullptr;  // naturalness, naturalness_length
    const EmbeddingTable* table = nullptr;    // pairwise
    std::uint64_t seed = 0;                   // length, random
    std::size_t max_nodes = 4;
};

struct ExpandedQuery {
    std::vector<std::string> original;
    std::vector<std::string> added;  // concept labels in rank order
    bool no_paths = false;           // nothing connects two query terms

    std::vector<std::string> terms() const;
};

/// Ranks every path between two in-graph query terms and appends interior
/// words in rank order, skipping repeats, until `word_budget` are added.
ExpandedQuery expand_query(std::span<const std::string> query, ExpansionStrategy strategy, std::size_t word_budget,
                           const ExpansionInputs& in);

}  // namespace pathnat
