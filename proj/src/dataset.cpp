#include "pathnat/dataset.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace pathnat {

using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json path_json(const LabeledPath& p) {
    json steps = json::array();
    for (const auto& s : p.steps) steps.push_back({{"relation", s.relation}, {"direction", to_string(s.direction)}});
    return {{"vertices", p.vertices}, {"steps", steps}};
}

LabeledPath path_value(const json& j) {
    LabeledPath p;
    p.vertices = j.at("vertices").get<std::vector<std::string>>();
    for (const auto& s : j.at("steps")) {
        p.steps.push_back({s.at("relation").get<std::string>(), parse_direction(s.at("direction").get<std::string>())});
    }
    if (p.vertices.size() < 2 || p.steps.size() + 1 != p.vertices.size()) {
        throw Error("path record: needs n >= 2 vertices and n - 1 steps");
    }
    return p;
}

template <typename F>
auto read_lines(std::istream& in, const std::string& name, F&& parse_one) {
    std::vector<decltype(parse_one(std::string_view{}))> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            out.push_back(parse_one(line));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(name, lineno, e.what());
        }
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open " + file.string());
    return in;
}

}  // namespace

// ---------------------------------------------------------------------------
// Paths

LabeledPath label_path(const Graph& g, const Path& p) {
    LabeledPath out;
    for (auto v : p.vertices) out.vertices.push_back(g.label(v));
    for (const auto& s : p.steps) out.steps.push_back({g.relations().name(g.edge(s.edge).relation), s.direction});
    return out;
}

std::optional<Path> try_resolve(const Graph& g, const LabeledPath& p) {
    if (p.vertices.size() < 2 || p.steps.size() + 1 != p.vertices.size()) return std::nullopt;
    Path out;
    for (const auto& v : p.vertices) {
        auto id = g.find(v);
        if (!id) return std::nullopt;
        out.vertices.push_back(*id);
    }
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        const auto rel = g.relations().find(p.steps[i].relation);
        if (!rel) return std::nullopt;
        const auto u = out.vertices[i];
        std::optional<EdgeId> hit;
        for (auto e : g.edges_between(u, out.vertices[i + 1])) {
            if (g.edge(e).relation == *rel && g.traversal(e, u) == p.steps[i].direction) {
                hit = e;
                break;
            }
        }
        if (!hit) return std::nullopt;
        out.steps.push_back({*hit, p.steps[i].direction});
    }
    return out;
}

Path resolve(const Graph& g, const LabeledPath& p) {
    auto r = try_resolve(g, p);
    if (!r) throw Error("path not in graph: " + format_path(p));
    return *r;
}

bool is_synthetic(const Graph& g, const LabeledPath& p) {
    return !try_resolve(g, p).has_value();
}

std::string format_path(const LabeledPath& p) {
    std::string out;
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        out += p.vertices[i];
        if (i < p.steps.size()) {
            const auto& rel = p.steps[i].relation;
            switch (p.steps[i].direction) {
                case Direction::forward: out += " -" + rel + "-> "; break;
                case Direction::backward: out += " <-" + rel + "- "; break;
                case Direction::bidirectional: out += " <-" + rel + "-> "; break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Records

std::string path_to_json(const LabeledPath& p) {
    return path_json(p).dump();
}

LabeledPath path_from_json(std::string_view text) {
    return path_value(json::parse(text));
}

std::string pair_to_json(const PathPair& p) {
    return json{{"id", p.id}, {"first", path_json(p.first)}, {"second", path_json(p.second)}}.dump();
}

PathPair pair_from_json(std::string_view text) {
    const auto j = json::parse(text);
    PathPair p{j.at("id").get<std::string>(), path_value(j.at("first")), path_value(j.at("second"))};
    if (p.id.empty()) throw Error("pair record: empty id");
    if (p.first == p.second) throw Error("pair " + p.id + ": both sides are the same path");
    return p;
}

std::string judgment_to_json(const Judgment& j) {
    return json{{"pair_id", j.pair_id}, {"choice", to_string(j.choice)}, {"annotator", j.annotator}, {"ts", j.ts}}
        .dump();
}

Judgment judgment_from_json(std::string_view text) {
    const auto j = json::parse(text);
    return {j.at("pair_id").get<std::string>(), parse_choice(j.at("choice").get<std::string>()),
            j.at("annotator").get<std::string>(), j.at("ts").get<std::int64_t>()};
}

void write_paths(std::ostream& out, std::span<const LabeledPath> paths) {
    for (const auto& p : paths) out << path_to_json(p) << '\n';
}

std::vector<LabeledPath> read_paths(std::istream& in, const std::string& name) {
    return read_lines(in, name, [](std::string_view s) { return path_from_json(s); });
}

void write_pairs(std::ostream& out, std::span<const PathPair> pairs) {
    for (const auto& p : pairs) out << pair_to_json(p) << '\n';
}

std::vector<PathPair> read_pairs(std::istream& in, const std::string& name) {
    auto pairs = read_lines(in, name, [](std::string_view s) { return pair_from_json(s); });
    std::unordered_set<std::string> seen;
    for (const auto& p : pairs) {
        if (!seen.insert(p.id).second) throw Error(name + ": duplicate pair id " + p.id);
    }
    return pairs;
}

void write_judgments(std::ostream& out, std::span<const Judgment> judgments) {
    for (const auto& j : judgments) out << judgment_to_json(j) << '\n';
}

std::vector<Judgment> read_judgments(std::istream& in, const std::unordered_set<std::string>* known_pairs,
                                     const std::string& name) {
    return read_lines(in, name, [known_pairs](std::string_view s) {
        auto j = judgment_from_json(s);
        if (known_pairs && !known_pairs->contains(j.pair_id)) throw Error("unknown pair id " + j.pair_id);
        return j;
    });
}

std::vector<LabeledPath> load_paths(const std::filesystem::path& file) {
    auto in = open_input(file);
    return read_paths(in, file.string());
}

std::vector<PathPair> load_pairs(const std::filesystem::path& file) {
    auto in = open_input(file);
    return read_pairs(in, file.string());
}

std::vector<Judgment> load_judgments(const std::filesystem::path& file,
                                     const std::unordered_set<std::string>* known_pairs) {
    auto in = open_input(file);
    return read_judgments(in, known_pairs, file.string());
}

MultiResponseSet group_judgments(std::span<const Judgment> judgments) {
    MultiResponseSet out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& j : judgments) {
        if (!seen.emplace(j.pair_id, j.annotator).second) {
            throw Error("annotator " + j.annotator + " judged pair " + j.pair_id + " more than once");
        }
        out[j.pair_id].push_back(j);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Questionnaires

std::size_t Questionnaire::qc_count() const {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const auto& i) { return i.qc; }));
}

const QuestionnaireItem* Questionnaire::find(std::string_view token) const {
    for (const auto& i : items) {
        if (i.token == token) return &i;
    }
    return nullptr;
}

std::vector<PathPair> Questionnaire::pairs() const {
    std::vector<PathPair> out;
    for (const auto& i : items) {
        if (i.swapped) {
            out.push_back({i.pair_id, i.second, i.first});
        } else {
            out.push_back({i.pair_id, i.first, i.second});
        }
    }
    return out;
}

LabeledPath random_bad_path(const Graph& g, std::size_t nodes, Rng& rng) {
    if (nodes < 2) throw Error("bad path needs at least two nodes");
    if (g.concept_count() < nodes) throw Error("graph has fewer concepts than the requested path length");
    if (g.relations().size() == 0) throw Error("graph has no relations");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        LabeledPath p;
        std::set<ConceptId> used;
        while (p.vertices.size() < nodes) {
            const auto c = static_cast<ConceptId>(rng.uniform_index(g.concept_count()));
            if (used.insert(c).second) p.vertices.push_back(g.label(c));
        }
        for (std::size_t i = 0; i + 1 < nodes; ++i) {
            const auto rel = static_cast<RelationId>(rng.uniform_index(g.relations().size()));
            Direction d = Direction::bidirectional;
            if (!g.relations().symmetric(rel)) d = rng.coin() ? Direction::forward : Direction::backward;
            p.steps.push_back({g.relations().name(rel), d});
        }
        if (is_synthetic(g, p)) return p;
    }
    throw Error("could not draw a path absent from the graph");
}

Questionnaire build_questionnaire(std::span<const PathPair> pool, std::span<const LabeledPath> good_paths,
                                  const Graph& g, std::uint64_t seed) {
    if (pool.size() < kGenuineItems) {
        throw Error("insufficient pool: need " + std::to_string(kGenuineItems) + " genuine pairs, have " +
                    std::to_string(pool.size()));
    }
    if (good_paths.size() < kQcItems) {
        throw Error("insufficient pool: need " + std::to_string(kQcItems) + " curated good paths, have " +
                    std::to_string(good_paths.size()));
    }
    Rng rng(mix64(seed));
    Questionnaire q;
    q.seed = seed;

    std::vector<std::size_t> pick(pool.size());
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(pick));
    for (std::size_t k = 0; k < kGenuineItems; ++k) {
        const auto& src = pool[pick[k]];
        QuestionnaireItem item;
        item.pair_id = src.id;
        item.first = src.first;
        item.second = src.second;
        q.items.push_back(std::move(item));
    }

    std::vector<std::size_t> good(good_paths.size());
    std::iota(good.begin(), good.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(good));
    for (std::size_t k = 0; k < kQcItems; ++k) {
        const auto& gp = good_paths[good[k]];
        QuestionnaireItem item;
        item.pair_id = "qc-" + hex64(seed) + "-" + std::to_string(k);
        item.first = gp;
        item.second = random_bad_path(g, gp.vertices.size(), rng);
        item.qc = true;
        q.items.push_back(std::move(item));
    }

    rng.shuffle(std::span<QuestionnaireItem>(q.items));
    std::unordered_set<std::string> tokens;
    for (std::size_t k = 0; k < q.items.size(); ++k) {
        auto& item = q.items[k];
        if (rng.coin()) {
            std::swap(item.first, item.second);
            item.swapped = true;
        }
        item.qc_answer = item.swapped ? Choice::second : Choice::first;
        std::uint64_t t = mix64(rng.next());
        while (!tokens.insert(hex64(t)).second) t = mix64(t);
        item.token = hex64(t);
    }
    return q;
}

std::string questionnaire_to_jsonl(const Questionnaire& q) {
    std::string out;
    for (const auto& i : q.items) {
        out += json{{"item", i.token},
                    {"first", path_json(i.first)},
                    {"second", path_json(i.second)},
                    {"first_text", format_path(i.first)},
                    {"second_text", format_path(i.second)}}
                   .dump();
        out += '\n';
    }
    return out;
}

std::vector<Answer> read_answers(std::istream& in) {
    return read_lines(in, "<answers>", [](std::string_view s) {
        const auto j = json::parse(s);
        return Answer{j.at("item").get<std::string>(), parse_choice(j.at("choice").get<std::string>())};
    });
}

std::string answers_to_jsonl(std::span<const Answer> answers) {
    std::string out;
    for (const auto& a : answers) {
        out += json{{"item", a.token}, {"choice", to_string(a.choice)}}.dump();
        out += '\n';
    }
    return out;
}

std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::incomplete: return "incomplete";
        case RejectReason::unknown_item: return "unknown_item";
        case RejectReason::duplicate_item: return "duplicate_item";
        case RejectReason::qc_failed: return "qc_failed";
    }
    return "?";
}

Verdict validate_response(const Questionnaire& q, std::span<const Answer> answers, std::string_view annotator,
                          std::int64_t ts) {
    Verdict v;
    std::map<std::string_view, Choice> given;
    for (const auto& a : answers) {
        if (!q.find(a.token)) {
            v.reason = RejectReason::unknown_item;
            return v;
        }
        if (!given.emplace(a.token, a.choice).second) {
            v.reason = RejectReason::duplicate_item;
            return v;
        }
    }
    if (given.size() != q.items.size()) {
        v.reason = RejectReason::incomplete;
        return v;
    }
    for (const auto& item : q.items) {
        if (item.qc && given.at(item.token) == item.qc_answer) ++v.qc_correct;
    }
    if (v.qc_correct != q.qc_count()) {
        v.reason = RejectReason::qc_failed;
        return v;
    }
    v.accepted = true;
    for (const auto& item : q.items) {
        Choice c = given.at(item.token);
        if (item.swapped) c = c == Choice::first ? Choice::second : Choice::first;
        v.judgments.push_back({item.pair_id, c, std::string(annotator), ts});
    }
    return v;
}

// ---------------------------------------------------------------------------
// Storage

JudgmentStore::JudgmentStore(std::filesystem::path file) : file_(std::move(file)) {
    if (std::filesystem::exists(*file_)) judgments_ = load_judgments(*file_);
}

void JudgmentStore::append(std::span<const Judgment> judgments) {
    std::lock_guard lock(mutex_);
    if (file_) {
        std::ofstream out(*file_, std::ios::app);
        if (!out) throw Error("cannot append to " + file_->string());
        write_judgments(out, judgments);
        out.flush();
        if (!out) throw Error("write failed: " + file_->string());
    }
    judgments_.insert(judgments_.end(), judgments.begin(), judgments.end());
}

std::vector<Judgment> JudgmentStore::snapshot() const {
    std::lock_guard lock(mutex_);
    return judgments_;
}

std::size_t JudgmentStore::size() const {
    std::lock_guard lock(mutex_);
    return judgments_.size();
}

// ---------------------------------------------------------------------------
// Training sets

JudgedData collect_examples(std::span<const PathPair> pairs, std::span<const Judgment> judgments) {
    JudgedData out;
    std::map<LabeledPath, std::size_t> path_index;
    auto intern = [&](const LabeledPath& p) {
        auto [it, fresh] = path_index.emplace(p, out.paths.size());
        if (fresh) out.paths.push_back(p);
        return it->second;
    };
    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> by_id;
    for (const auto& p : pairs) by_id.emplace(p.id, std::pair{intern(p.first), intern(p.second)});
    for (const auto& j : judgments) {
        auto it = by_id.find(j.pair_id);
        if (it == by_id.end()) throw Error("judgment names unknown pair id " + j.pair_id);
        out.examples.push_back({it->second.first, it->second.second, j.choice});
    }
    return out;
}

Split split_train_test(std::size_t path_count, std::span<const PairExample> examples, double train_ratio,
                       std::uint64_t seed) {
    if (path_count < 2) throw Error("split: need at least two paths");
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw Error("split: ratio must be in (0, 1)");
    const auto n_train = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(path_count)));
    if (n_train == 0 || n_train == path_count) throw Error("split: ratio leaves one side empty");
    std::vector<std::size_t> order(path_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix64(seed));
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<char> side(path_count, 0);
    Split s;
    for (std::size_t k = 0; k < path_count; ++k) {
        side[order[k]] = k < n_train ? 1 : 2;
        (k < n_train ? s.train_paths : s.test_paths).push_back(order[k]);
    }
    std::sort(s.train_paths.begin(), s.train_paths.end());
    std::sort(s.test_paths.begin(), s.test_paths.end());
    for (const auto& ex : examples) {
        if (ex.first >= path_count || ex.second >= path_count) throw Error("split: example index out of range");
        if (side[ex.first] != side[ex.second]) continue;
        (side[ex.first] == 1 ? s.train : s.test).push_back(ex);
    }
    return s;
}

std::vector<PairIndex> pair_up(std::span<const std::size_t> members, std::size_t count, Rng& rng) {
    const std::size_t n = members.size();
    const std::size_t max_pairs = n < 2 ? 0 : n * (n - 1) / 2;
    if (count > max_pairs) {
        throw Error("infeasible counts: " + std::to_string(count) + " pairs from " + std::to_string(n) + " paths");
    }
    std::vector<PairIndex> out;
    out.reserve(count);
    if (2 * count > max_pairs) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) out.push_back({members[a], members[b]});
        }
        rng.shuffle(std::span<PairIndex>(out));
        out.resize(count);
    } else {
        std::set<std::pair<std::size_t, std::size_t>> seen;
        while (out.size() < count) {
            auto a = rng.uniform_index(n);
            auto b = rng.uniform_index(n);
            if (a == b) continue;
            if (!seen.emplace(std::min(a, b), std::max(a, b)).second) continue;
            out.push_back({members[a], members[b]});
        }
    }
    for (auto& p : out) {
        if (rng.coin()) std::swap(p.first, p.second);
    }
    return out;
}

CountSplit split_by_counts(std::size_t path_count, std::size_t train_paths, std::size_t test_paths,
                           std::size_t train_pairs, std::size_t test_pairs, std::uint64_t seed) {
    if (train_paths + test_paths > path_count) {
        throw Error("infeasible counts: " + std::to_string(train_paths + test_paths) + " paths requested, " +
                    std::to_string(path_count) + " available");
    }
    std::vector<std::size_t> order(path_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix64(seed));
    rng.shuffle(std::span<std::size_t>(order));
    CountSplit s;
    s.train_paths.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_paths));
    s.test_paths.assign(order.begin() + static_cast<std::ptrdiff_t>(train_paths),
                        order.begin() + static_cast<std::ptrdiff_t>(train_paths + test_paths));
    std::sort(s.train_paths.begin(), s.train_paths.end());
    std::sort(s.test_paths.begin(), s.test_paths.end());
    s.train_pairs = pair_up(s.train_paths, train_pairs, rng);
    s.test_pairs = pair_up(s.test_paths, test_pairs, rng);
    return s;
}

}  // namespace pathnat
