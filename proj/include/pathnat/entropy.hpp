#pragma once
// Coherence of path types: how predictable the direct ("PS") relation between
// a path's endpoints is from the path's relation sequence.

#include "pathnat/graph.hpp"

#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace pathnat {

/// Canonical text for a path type, e.g. "IsA>|RelatedTo=|AtLocation<".
std::string path_type_key(const Graph& g, const Path& p);

/// path type -> (PS relation -> count).
class PsRelationCounter {
public:
    void add(const std::string& type, const std::string& relation, std::size_t count = 1);

    /// -sum_i C_i sum_j p_ij ln p_ij / C
    double average_entropy() const;

    std::size_t total() const { return total_; }
    const std::map<std::string, std::map<std::string, std::size_t>>& counts() const { return counts_; }

private:
    std::map<std::string, std::map<std::string, std::size_t>> counts_;
    std::size_t total_ = 0;
};

double avg_entropy(const PsRelationCounter& counter);

struct PsSample {
    std::string type;
    std::string relation;
};

/// Average entropy over the ceil(top_percent% of n) highest-scored samples;
/// ties keep input order.
double avg_entropy(std::span<const PsSample> samples, std::span<const double> scores, double top_percent);

struct PsPath {
    Path path;
    RelationId relation = 0;  // relation of the direct edge between the endpoints
    EdgeId direct = 0;
};

/// Paths of exactly `nodes` vertices whose endpoints are also joined by an
/// edge; one record per direct edge. count = 0 returns every record, otherwise
/// a seeded sample of `count` records.
std::vector<PsPath> collect_ps_paths(const Graph& g, const std::unordered_set<std::string>* vocabulary,
                                     std::size_t nodes, std::size_t count, std::uint64_t seed);

}  // namespace pathnat
