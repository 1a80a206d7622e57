#include "pathnat/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace pathnat {

std::string path_type_key(const Graph& g, const Path& p) {
    std::string out;
    for (const auto& s : p.steps) {
        if (!out.empty()) out += '|';
        out += g.relations().name(g.edge(s.edge).relation);
        switch (s.direction) {
            case Direction::forward: out += '>'; break;
            case Direction::backward: out += '<'; break;
            case Direction::bidirectional: out += '='; break;
        }
    }
    return out;
}

void PsRelationCounter::add(const std::string& type, const std::string& relation, std::size_t count) {
    if (count == 0) return;
    counts_[type][relation] += count;
    total_ += count;
}

double PsRelationCounter::average_entropy() const {
    if (total_ == 0) throw Error("entropy: empty selection");
    double acc = 0.0;
    for (const auto& [type, rels] : counts_) {
        std::size_t ci = 0;
        for (const auto& [r, c] : rels) ci += c;
        double h = 0.0;
        for (const auto& [r, c] : rels) {
            const double p = static_cast<double>(c) / static_cast<double>(ci);
            h -= p * std::log(p);
        }
        acc += static_cast<double>(ci) * h;
    }
    return acc / static_cast<double>(total_);
}

double avg_entropy(const PsRelationCounter& counter) {
    return counter.average_entropy();
}

double avg_entropy(std::span<const PsSample> samples, std::span<const double> scores, double top_percent) {
    if (samples.size() != scores.size()) throw Error("entropy: one score per sample required");
    if (!(top_percent > 0.0 && top_percent <= 100.0)) throw Error("entropy: top_percent must be in (0, 100]");
    const auto n = samples.size();
    const auto keep = std::min(n, static_cast<std::size_t>(std::ceil(top_percent * static_cast<double>(n) / 100.0)));
    if (keep == 0) throw Error("entropy: empty selection");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
    PsRelationCounter c;
    for (std::size_t k = 0; k < keep; ++k) c.add(samples[order[k]].type, samples[order[k]].relation);
    return c.average_entropy();
}

std::vector<PsPath> collect_ps_paths(const Graph& g, const std::unordered_set<std::string>* vocabulary,
                                     std::size_t nodes, std::size_t count, std::uint64_t seed) {
    if (nodes < 3) throw Error("PS paths need at least three nodes");
    VertexMask mask;
    if (vocabulary) {
        mask.assign(g.concept_count(), false);
        for (const auto& w : *vocabulary) {
            if (auto id = g.find(w)) mask[*id] = true;
        }
    }
    auto allowed = [&](ConceptId c) { return !vocabulary || mask[c]; };

    std::set<std::pair<ConceptId, ConceptId>> endpoints;
    for (const auto& e : g.edges()) {
        if (allowed(e.start) && allowed(e.end)) endpoints.emplace(std::min(e.start, e.end), std::max(e.start, e.end));
    }
    std::vector<PsPath> out;
    for (const auto& [a, b] : endpoints) {
        const auto direct = g.edges_between(a, b);
        for (auto& p : enumerate_paths(g, a, b, nodes, vocabulary ? &mask : nullptr)) {
            if (p.vertices.size() != nodes) continue;
            for (auto e : direct) out.push_back({p, g.edge(e).relation, e});
        }
    }
    if (count == 0) return out;
    if (out.size() < count) {
        throw Error("insufficient qualifying paths: " + std::to_string(out.size()) + " < " + std::to_string(count));
    }
    Rng rng(mix64(seed));
    rng.shuffle(std::span<PsPath>(out));
    out.resize(count);
    return out;
}

}  // namespace pathnat
