#pragma once
// Word vectors: loading, cosine similarity, Zipf frequency from file rank,
// and PCA reduction.

#include "pathnat/rng.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pathnat {

/// Cosine similarity; 0 when either vector is all-zero.
double cosine(std::span<const double> u, std::span<const double> v);

/// A concept's vector plus whether it had to fall back to zeros.
struct Embedding {
    std::vector<double> values;
    bool oov = false;
};

class EmbeddingTable {
public:
    /// Text format: `word v1 ... vd` per line, most frequent word first.
    static EmbeddingTable load(const std::filesystem::path& file);
    static EmbeddingTable parse(std::istream& in, const std::string& name = "<stream>");

    void add(std::string word, std::span<const double> values);

    std::size_t dimension() const { return dim_; }
    std::size_t size() const { return words_.size(); }
    const std::string& word(std::size_t i) const { return words_.at(i); }
    std::span<const double> row(std::size_t i) const;

    /// 1-based file rank, if present.
    std::optional<std::size_t> rank(std::string_view word) const;
    std::optional<std::span<const double>> find(std::string_view word) const;

    /// Exact label, else the mean of its '_'-separated words when all are
    /// present, else a flagged zero vector.
    Embedding lookup(std::string_view concept_label) const;

private:
    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> data_;
};

/// 1/rank; out-of-vocabulary words get 1/(V+1).
double zipf_frequency(const EmbeddingTable& table, std::string_view word);

struct PcaProjection {
    Eigen::VectorXd mean;
    Eigen::MatrixXd basis;  // k x d, orthonormal rows
    Eigen::VectorXd explained_variance;

    std::size_t components() const { return static_cast<std::size_t>(basis.rows()); }
    std::vector<double> project(std::span<const double> v) const;
    std::vector<double> reconstruct(std::span<const double> code) const;
};

/// Top-k principal directions of the table's vectors; each row's
/// largest-magnitude entry is made positive.
PcaProjection fit_pca(const EmbeddingTable& table, std::size_t k);
PcaProjection fit_pca(const Eigen::MatrixXd& samples, std::size_t k);

}  // namespace pathnat
