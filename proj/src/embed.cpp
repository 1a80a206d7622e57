#include "pathnat/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pathnat {

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw Error("cosine: dimension mismatch");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    const double c = dot / (std::sqrt(nu) * std::sqrt(nv));
    return std::clamp(c, -1.0, 1.0);
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open vector file: " + file.string());
    return parse(in, file.string());
}

EmbeddingTable EmbeddingTable::parse(std::istream& in, const std::string& name) {
    EmbeddingTable t;
    std::string line;
    std::size_t lineno = 0;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string word, tok;
        fields >> word;
        values.clear();
        while (fields >> tok) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw ParseError(name, lineno, "bad number '" + tok + "'");
            }
            values.push_back(v);
        }
        if (values.empty()) throw ParseError(name, lineno, "line has no vector components");
        if (t.dim_ != 0 && values.size() != t.dim_) {
            throw ParseError(name, lineno, "dimension mismatch: expected " + std::to_string(t.dim_) + ", got " +
                                               std::to_string(values.size()));
        }
        if (t.index_.count(word)) throw ParseError(name, lineno, "duplicate word '" + word + "'");
        t.add(std::move(word), values);
    }
    if (t.size() == 0) throw Error(name + ": empty embedding table");
    return t;
}

void EmbeddingTable::add(std::string word, std::span<const double> values) {
    if (dim_ == 0) dim_ = values.size();
    if (values.size() != dim_ || dim_ == 0) throw Error("embedding dimension mismatch for " + word);
    if (index_.count(word)) throw Error("duplicate word " + word);
    index_.emplace(word, words_.size());
    words_.push_back(std::move(word));
    data_.insert(data_.end(), values.begin(), values.end());
}

std::span<const double> EmbeddingTable::row(std::size_t i) const {
    if (i >= words_.size()) throw Error("embedding row out of range");
    return std::span<const double>(data_).subspan(i * dim_, dim_);
}

std::optional<std::size_t> EmbeddingTable::rank(std::string_view word) const {
    const auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second + 1;
}

std::optional<std::span<const double>> EmbeddingTable::find(std::string_view word) const {
    const auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return row(it->second);
}

Embedding EmbeddingTable::lookup(std::string_view concept_label) const {
    Embedding out;
    if (auto v = find(concept_label)) {
        out.values.assign(v->begin(), v->end());
        return out;
    }
    out.values.assign(dim_, 0.0);
    std::size_t parts = 0;
    std::size_t begin = 0;
    while (begin <= concept_label.size()) {
        auto end = concept_label.find('_', begin);
        if (end == std::string_view::npos) end = concept_label.size();
        const auto part = concept_label.substr(begin, end - begin);
        const auto v = part.empty() ? std::nullopt : find(part);
        if (!v) {
            std::fill(out.values.begin(), out.values.end(), 0.0);
            out.oov = true;
            return out;
        }
        for (std::size_t i = 0; i < dim_; ++i) out.values[i] += (*v)[i];
        ++parts;
        begin = end + 1;
    }
    for (auto& x : out.values) x /= static_cast<double>(parts);
    return out;
}

double zipf_frequency(const EmbeddingTable& table, std::string_view word) {
    if (auto r = table.rank(word)) return 1.0 / static_cast<double>(*r);
    return 1.0 / static_cast<double>(table.size() + 1);
}

std::vector<double> PcaProjection::project(std::span<const double> v) const {
    if (v.size() != static_cast<std::size_t>(mean.size())) throw Error("project: dimension mismatch");
    const Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
    const Eigen::VectorXd code = basis * (x - mean);
    return {code.data(), code.data() + code.size()};
}

std::vector<double> PcaProjection::reconstruct(std::span<const double> code) const {
    if (code.size() != components()) throw Error("reconstruct: code size mismatch");
    const Eigen::Map<const Eigen::VectorXd> c(code.data(), static_cast<Eigen::Index>(code.size()));
    const Eigen::VectorXd x = mean + basis.transpose() * c;
    return {x.data(), x.data() + x.size()};
}

PcaProjection fit_pca(const Eigen::MatrixXd& samples, std::size_t k) {
    const auto n = static_cast<std::size_t>(samples.rows());
    const auto d = static_cast<std::size_t>(samples.cols());
    if (k < 1 || k > d) throw Error("fit_pca: k out of range [1, " + std::to_string(d) + "]");
    if (n < k + 1) throw Error("fit_pca: need at least k+1 vectors");

    PcaProjection p;
    p.mean = samples.colwise().mean().transpose();
    const Eigen::MatrixXd centered = samples.rowwise() - p.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw Error("fit_pca: eigendecomposition failed");

    // Eigenvalues come back ascending.
    const auto kk = static_cast<Eigen::Index>(k);
    p.basis.resize(kk, static_cast<Eigen::Index>(d));
    p.explained_variance.resize(kk);
    for (Eigen::Index i = 0; i < kk; ++i) {
        const Eigen::Index src = static_cast<Eigen::Index>(d) - 1 - i;
        Eigen::VectorXd axis = eig.eigenvectors().col(src);
        Eigen::Index arg = 0;
        axis.cwiseAbs().maxCoeff(&arg);
        if (axis(arg) < 0) axis = -axis;
        p.basis.row(i) = axis.transpose();
        p.explained_variance(i) = std::max(0.0, eig.eigenvalues()(src));
    }
    return p;
}

PcaProjection fit_pca(const EmbeddingTable& table, std::size_t k) {
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(table.size()), static_cast<Eigen::Index>(table.dimension()));
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto r = table.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[j];
        }
    }
    return fit_pca(samples, k);
}

}  // namespace pathnat
