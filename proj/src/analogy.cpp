#include "pathnat/analogy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace pathnat {

namespace {

WordPair parse_pair(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos || s.find(':', colon + 1) != std::string_view::npos) {
        throw Error("bad word pair '" + std::string(s) + "'");
    }
    auto a = normalize_concept(s.substr(0, colon));
    auto b = normalize_concept(s.substr(colon + 1));
    if (a.empty() || b.empty()) throw Error("bad word pair '" + std::string(s) + "'");
    return {std::move(a), std::move(b)};
}

}  // namespace

AnalogyQuestion parse_analogy(std::string_view line) {
    AnalogyQuestion q;
    auto ws = line.find_first_of(" \t");
    auto body = line.substr(0, ws);
    if (ws != std::string_view::npos) {
        auto rest = line.substr(ws);
        const auto b = rest.find_first_not_of(" \t");
        if (b != std::string_view::npos) {
            rest = rest.substr(b);
            const auto e = rest.find_last_not_of(" \t\r");
            rest = rest.substr(0, e + 1);
            std::size_t idx = 0;
            for (char c : rest) {
                if (c < '0' || c > '9') throw Error("bad answer index '" + std::string(rest) + "'");
                idx = idx * 10 + static_cast<std::size_t>(c - '0');
            }
            if (idx > 3) throw Error("answer index out of range");
            q.answer = idx;
        }
    }
    const auto sep = body.find("::");
    if (sep == std::string_view::npos) throw Error("expected a:b::A:B|C:D|E:F|G:H");
    q.query = parse_pair(body.substr(0, sep));
    auto cands = body.substr(sep + 2);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto bar = cands.find('|');
        if ((k < 3) != (bar != std::string_view::npos)) throw Error("expected four candidate pairs");
        q.candidates[k] = parse_pair(cands.substr(0, bar));
        if (k < 3) cands = cands.substr(bar + 1);
    }
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            if (q.candidates[i] == q.candidates[j]) throw Error("candidates must be distinct");
        }
    }
    return q;
}

std::vector<AnalogyQuestion> load_analogies(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open " + file.string());
    std::vector<AnalogyQuestion> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        try {
            out.push_back(parse_analogy(line));
        } catch (const Error& e) {
            throw ParseError(file.string(), lineno, e.what());
        }
    }
    return out;
}

double relation_overlap(const RelationBag& a, const RelationBag& b) {
    std::size_t lo = 0, hi = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            hi += ia->second;
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            hi += ib->second;
            ++ib;
        } else {
            lo += std::min(ia->second, ib->second);
            hi += std::max(ia->second, ib->second);
            ++ia;
            ++ib;
        }
    }
    return hi == 0 ? 0.0 : static_cast<double>(lo) / static_cast<double>(hi);
}

RelationBag direct_relations(const Graph& g, std::string_view a, std::string_view b) {
    RelationBag bag;
    const auto ia = g.find(a);
    const auto ib = g.find(b);
    if (!ia || !ib || *ia == *ib) return bag;
    for (auto e : g.edges_between(*ia, *ib)) ++bag[g.relations().name(g.edge(e).relation)];
    return bag;
}

RelationBag path_relations(const Graph& g, std::string_view a, std::string_view b, const PathScorer* naturalness,
                           double top_percent) {
    if (!(top_percent > 0.0 && top_percent <= 100.0)) throw Error("top_percent must be in (0, 100]");
    RelationBag bag;
    const auto ia = g.find(a);
    const auto ib = g.find(b);
    if (!ia || !ib || *ia == *ib) return bag;
    std::vector<Path> paths;
    for (auto& p : enumerate_paths(g, *ia, *ib, 3)) {
        if (p.vertices.size() == 3) paths.push_back(std::move(p));
    }
    if (paths.empty()) return bag;
    std::vector<std::size_t> order(paths.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t keep = paths.size();
    if (naturalness) {
        std::vector<double> scores;
        for (const auto& p : paths) scores.push_back((*naturalness)(p));
        std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return scores[x] > scores[y]; });
        keep = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(top_percent * static_cast<double>(paths.size()) / 100.0)));
        keep = std::min(keep, paths.size());
    }
    for (std::size_t k = 0; k < keep; ++k) {
        for (const auto& s : paths[order[k]].steps) ++bag[g.relations().name(g.edge(s.edge).relation)];
    }
    return bag;
}

AnalogyResult analogy_solve(const AnalogyQuestion& q, const Graph& g, const PathScorer* naturalness,
                            double top_percent) {
    AnalogyResult r;
    const auto qd = direct_relations(g, q.query.first, q.query.second);
    const auto qp = path_relations(g, q.query.first, q.query.second, naturalness, top_percent);
    r.direct = !qd.empty();
    if (qd.empty() && qp.empty()) return r;
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& [c, d] = q.candidates[k];
        const auto cd = direct_relations(g, c, d);
        if (!qd.empty() && !cd.empty()) {
            r.scores[k] = relation_overlap(qd, cd);
        } else {
            r.scores[k] = relation_overlap(qp, path_relations(g, c, d, naturalness, top_percent));
        }
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < 4; ++k) {
        if (r.scores[k] > r.scores[best]) best = k;
    }
    if (r.scores[best] > 0.0) r.choice = best;
    return r;
}

AnalogyAccuracy analogy_accuracy(std::span<const AnalogyQuestion> questions, const Graph& g,
                                 const PathScorer* naturalness, double top_percent) {
    AnalogyAccuracy acc;
    for (const auto& q : questions) {
        if (!q.answer) throw Error("analogy question without an answer index");
        ++acc.questions;
        const auto r = analogy_solve(q, g, naturalness, top_percent);
        if (!r.choice) continue;
        ++acc.answered;
        if (*r.choice == *q.answer) ++acc.correct;
    }
    return acc;
}

}  // namespace pathnat
