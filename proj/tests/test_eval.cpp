#include "doctest.h"
#include "oracles.hpp"

#include "pathnat/agreement.hpp"
#include "pathnat/analogy.hpp"
#include "pathnat/entropy.hpp"
#include "pathnat/retrieval.hpp"

#include <cmath>

using namespace testkit;

namespace {

MultiResponseSet panel(const std::string& id, std::size_t first, std::size_t second) {
    MultiResponseSet s;
    auto& v = s[id];
    for (std::size_t i = 0; i < first; ++i) v.push_back({id, Choice::first, "a" + std::to_string(i), 0});
    for (std::size_t i = 0; i < second; ++i) v.push_back({id, Choice::second, "b" + std::to_string(i), 0});
    return s;
}

std::vector<SearchHit> hits(const std::vector<std::string>& ids) {
    std::vector<SearchHit> out;
    double s = 1.0;
    for (const auto& id : ids) out.push_back({id, s -= 0.01});
    return out;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("agreement upper bound") {
    const OpinionSplit unanimous[] = {{16, 0}, {16, 0}};
    CHECK(agreement_upper_bound(unanimous) == 1.0);
    const OpinionSplit ties[] = {{8, 8}, {8, 8}, {8, 8}};
    CHECK(agreement_upper_bound(ties) == 0.5);
    CHECK_THROWS_AS(agreement_upper_bound(std::span<const OpinionSplit>{}), Error);

    MultiResponseSet set = panel("p", 3, 1);
    const auto more = panel("q", 1, 1);
    set.insert(more.begin(), more.end());
    const auto splits = opinion_splits(set);
    REQUIRE(splits.size() == 2);
    CHECK(splits[0].split == OpinionSplit{3, 1});
    CHECK(splits[0].majority_choice == Choice::first);
    CHECK(agreement_upper_bound(set) == doctest::Approx((0.75 + 0.5) / 2).epsilon(1e-15));
}

TEST_CASE("opinion histogram bound") {
    const std::pair<OpinionSplit, int> table[] = {{{8, 8}, 7},  {{9, 7}, 11}, {{10, 6}, 6}, {{11, 5}, 8}, {{12, 4}, 11},
                                                  {{13, 3}, 5}, {{14, 2}, 5}, {{15, 1}, 4}, {{16, 0}, 2}};
    std::vector<OpinionSplit> splits;
    double num = 0;
    int count = 0;
    for (const auto& [s, n] : table) {
        for (int i = 0; i < n; ++i) splits.push_back(s);
        num += n * static_cast<double>(s.majority);
        count += n;
    }
    CHECK(count == 59);
    CHECK(std::abs(agreement_upper_bound(splits) - num / (16.0 * count)) < 1e-15);
    CHECK(std::abs(agreement_upper_bound(splits) - 0.701) < 0.001);
}

TEST_CASE("confidence table") {
    std::vector<QuestionSplit> qs{
        {"a", {3, 1}, Choice::first}, {"b", {3, 1}, Choice::second}, {"c", {4, 0}, Choice::first}, {"t", {2, 2}, Choice::first}};
    const std::map<std::string, std::pair<double, double>> scores{
        {"a", {1.0, 0.0}}, {"b", {1.0, 0.0}}, {"c", {0.0, std::log(3.0)}}, {"t", {5.0, 0.0}}};
    const auto rows = confidence_analysis(qs, [&](const std::string& id) { return scores.at(id); });
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].split == OpinionSplit{3, 1});
    CHECK(rows[0].questions == 2);
    CHECK(rows[0].correct == 1);
    const double s1 = 1.0 / (1.0 + std::exp(-1.0));
    CHECK(std::abs(rows[0].mean_confidence - (s1 + (1 - s1)) / 2) < 1e-12);
    CHECK(rows[1].split == OpinionSplit{4, 0});
    CHECK(rows[1].correct == 0);
    CHECK(std::abs(rows[1].mean_confidence - 0.25) < 1e-12);

    const auto flat = confidence_analysis(qs, [](const std::string&) { return std::pair{0.3, 0.3}; });
    for (const auto& r : flat) CHECK(r.mean_confidence == 0.5);
    const auto perfect = confidence_analysis(qs, [&](const std::string& id) {
        const auto& q = *std::find_if(qs.begin(), qs.end(), [&](const auto& x) { return x.pair_id == id; });
        return q.majority_choice == Choice::first ? std::pair{1.0, 0.0} : std::pair{0.0, 1.0};
    });
    for (const auto& r : perfect) CHECK(r.correct == r.questions);
}

TEST_CASE("entropy examples") {
    PsRelationCounter one;
    one.add("A", "r1", 5);
    CHECK(avg_entropy(one) == 0.0);
    PsRelationCounter half;
    half.add("A", "r1");
    half.add("A", "r2");
    CHECK(std::abs(avg_entropy(half) - std::log(2.0)) < 1e-12);
    PsRelationCounter mixed;
    mixed.add("A", "r1", 3);
    mixed.add("A", "r2", 1);
    mixed.add("B", "r1", 2);
    const double h = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
    CHECK(std::abs(avg_entropy(mixed) - 4 * h / 6) < 1e-12);
    CHECK(std::abs(avg_entropy(mixed) - 0.37489010) < 1e-8);
}

TEST_CASE("entropy top fraction") {
    const std::vector<PsSample> s{{"A", "r1"}, {"A", "r2"}, {"A", "r1"}, {"B", "r3"}};
    const std::vector<double> scores{4, 1, 3, 2};
    CHECK(avg_entropy(s, scores, 50) == 0.0);  // top two: A/r1 twice
    PsRelationCounter all;
    for (const auto& x : s) all.add(x.type, x.relation);
    CHECK(avg_entropy(s, scores, 100) == avg_entropy(all));
    CHECK_THROWS_AS(avg_entropy(s, scores, 0), Error);
    CHECK_THROWS_AS(avg_entropy(s, scores, 101), Error);
}

TEST_CASE("entropy is zero iff each type has one relation") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        PsRelationCounter c;
        std::map<std::string, std::set<std::string>> seen;
        const auto n = 1 + rng.uniform_index(20);
        for (std::size_t i = 0; i < n; ++i) {
            const auto t = "t" + std::to_string(rng.uniform_index(4));
            const auto r = "r" + std::to_string(rng.uniform_index(trial % 2 ? 1 : 3));
            c.add(t, r);
            seen[t].insert(r);
        }
        bool single = true;
        for (const auto& [t, rs] : seen) single = single && rs.size() == 1;
        CHECK((avg_entropy(c) == 0.0) == single);
        CHECK(avg_entropy(c) >= 0.0);
    }
}

TEST_CASE("PS paths") {
    const auto tri = triangle_graph();
    const auto recs = collect_ps_paths(tri, nullptr, 3, 0, 0);
    CHECK(recs.size() == 3);
    bool found = false;
    for (const auto& r : recs) {
        const auto& v = r.path.vertices;
        const auto ends = std::set<std::string>{tri.label(v.front()), tri.label(v.back())};
        if (ends == std::set<std::string>{"a", "c"}) {
            found = true;
            CHECK(tri.relations().name(r.relation) == "PartOf");
            CHECK(tri.label(v[1]) == "b");
        }
    }
    CHECK(found);

    const auto chain = make_graph({{"a", "b", "IsA"}, {"b", "c", "IsA"}});
    CHECK(collect_ps_paths(chain, nullptr, 3, 0, 0).empty());
    CHECK_THROWS_AS(collect_ps_paths(chain, nullptr, 3, 5, 0), Error);

    const auto parallel = make_graph({{"a", "b", "IsA"}, {"b", "c", "IsA"}, {"a", "c", "PartOf"}, {"a", "c", "HasA"}});
    std::multiset<std::string> rels;
    for (const auto& r : collect_ps_paths(parallel, nullptr, 3, 0, 0)) {
        if (r.path.vertices[1] == parallel.id("b")) rels.insert(parallel.relations().name(r.relation));
    }
    CHECK(rels == std::multiset<std::string>{"HasA", "PartOf"});
    CHECK(path_type_key(tri, recs.front().path).find('|') != std::string::npos);
}

TEST_CASE("entropy at 100 percent does not depend on the ranking") {
    const auto g = random_graph(40, 160, 12);
    const auto recs = collect_ps_paths(g, nullptr, 4, 500, 3);
    REQUIRE(recs.size() == 500);
    std::vector<PsSample> samples;
    for (const auto& r : recs) samples.push_back({path_type_key(g, r.path), g.relations().name(r.relation)});
    std::vector<double> flow, length, reversed_rank;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        flow.push_back(flow_score(g, recs[i].path));
        length.push_back(length_score(g, recs[i].path, 5));
        reversed_rank.push_back(-static_cast<double>(i));
    }
    const double a = avg_entropy(samples, flow, 100);
    CHECK(a == avg_entropy(samples, length, 100));
    CHECK(a == avg_entropy(samples, reversed_rank, 100));
}

TEST_CASE("tokenizer") {
    CHECK(tokenize("The Cat, the HAT-3!") == std::vector<std::string>{"cat", "hat", "3"});
    CHECK(stopwords().count("the") == 1);
}

TEST_CASE("tf-idf search") {
    const TfidfIndex idx({{"x", "apple banana"}, {"y", "apple cherry cherry"}, {"z", "durian"}});
    CHECK(idx.size() == 3);
    CHECK(idx.document_frequency("apple") == 2);
    CHECK(idx.idf("apple") == doctest::Approx(std::log(1.5)).epsilon(1e-15));
    CHECK(idx.idf("nothing") == 0.0);
    const std::vector<std::string> q{"cherry"};
    const auto r = idx.search(q);
    REQUIRE(r.size() == 1);
    CHECK(r[0].doc == "y");
    // y = (apple: ln1.5, cherry: 2 ln3); cosine with the query vector (cherry).
    const double a = std::log(1.5), c = 2 * std::log(3.0);
    CHECK(std::abs(r[0].score - c / std::sqrt(a * a + c * c)) < 1e-12);
    const std::vector<std::string> both{"apple"};
    const auto tie = idx.search(both);
    REQUIRE(tie.size() == 2);
    CHECK(tie[0].doc == "x");
    CHECK(idx.search(both, 1).size() == 1);
}

TEST_CASE("precision and average precision") {
    const std::set<std::string> rel{"a", "b"};
    CHECK(std::abs(average_precision(hits({"a", "x", "b", "y"}), rel) - (1.0 + 2.0 / 3) / 2) < 1e-12);
    CHECK(std::abs(average_precision(hits({"a", "x", "b", "y"}), rel) - 0.8333) < 1e-4);
    CHECK(average_precision(hits({"x", "y"}), rel) == 0.0);
    std::set<std::string> ten;
    std::vector<std::string> ranking;
    for (int i = 0; i < 12; ++i) {
        ten.insert("d" + std::to_string(i));
        ranking.push_back("d" + std::to_string(i));
    }
    CHECK(precision_at_k(hits(ranking), ten, 10) == 1.0);
    CHECK(precision_at_k(hits({"a", "x"}), rel, 10) == 0.1);
    const double one[] = {0.25};
    CHECK(mean_average_precision(one) == 0.25);
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> ids;
        std::set<std::string> r;
        for (int i = 0; i < 15; ++i) {
            ids.push_back("d" + std::to_string(i));
            if (rng.coin()) r.insert("d" + std::to_string(i));
        }
        rng.shuffle(std::span<std::string>(ids));
        const auto h = hits(ids);
        const double ap = average_precision(h, r);
        CHECK(std::abs(ap - ap_oracle(ids, r)) < 1e-12);
        CHECK(ap >= 0.0);
        CHECK(ap <= 1.0);
        const double p = precision_at_k(h, r, 10);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("hard queries") {
    std::vector<Document> docs;
    for (int i = 0; i < 10; ++i) docs.push_back({"r" + std::to_string(i), "match word"});
    docs.push_back({"n", "other text"});
    const TfidfIndex idx(docs);
    const std::map<std::string, std::string> queries{{"easy", "match"}, {"hard", "unrelated"}};
    Relevance rel;
    for (int i = 0; i < 10; ++i) rel["easy"].insert("r" + std::to_string(i));
    rel["hard"].insert("r0");
    CHECK(hard_queries(idx, queries, rel) == std::vector<std::string>{"hard"});
}

TEST_CASE("query expansion") {
    const auto g = make_graph({{"cat", "pet", "IsA"},
                               {"pet", "dog", "RelatedTo"},
                               {"cat", "fur", "HasA"},
                               {"fur", "coat", "PartOf"},
                               {"coat", "dog", "HasA"},
                               {"x", "y", "IsA"}});
    const PathScorer nat = [&](const Path& p) { return flow_score(g, p); };
    ExpansionInputs in;
    in.graph = &g;
    in.naturalness = &nat;
    const std::vector<std::string> q{"cat", "dog"};
    CHECK(expand_query(q, ExpansionStrategy::naturalness, 0, in).added.empty());

    const auto nl = expand_query(q, ExpansionStrategy::naturalness_length, 10, in);
    CHECK(nl.added == std::vector<std::string>{"pet", "fur", "coat"});
    const auto len = expand_query(q, ExpansionStrategy::length, 1, in);
    CHECK(len.added == std::vector<std::string>{"pet"});

    const auto single = make_graph({{"cat", "pet", "IsA"}, {"pet", "dog", "RelatedTo"}});
    ExpansionInputs sin;
    sin.graph = &single;
    sin.naturalness = &nat;
    CHECK(expand_query(q, ExpansionStrategy::length, 5, sin).added == std::vector<std::string>{"pet"});

    const std::vector<std::string> none{"cat", "x"};
    const auto np = expand_query(none, ExpansionStrategy::length, 5, in);
    CHECK(np.no_paths);
    CHECK(np.terms() == none);

    const std::vector<std::string> rev{"dog", "cat"};
    for (auto s : {ExpansionStrategy::length, ExpansionStrategy::random, ExpansionStrategy::naturalness,
                   ExpansionStrategy::naturalness_length}) {
        CHECK(expand_query(q, s, 3, in).added == expand_query(rev, s, 3, in).added);
    }
}

TEST_CASE("shipped retrieval corpus") {
    const std::filesystem::path root = PATHNAT_DATA_DIR "/ir";
    const TfidfIndex idx(load_corpus(root / "docs"));
    CHECK(idx.size() == 50);
    const auto queries = load_queries(root / "queries.tsv");
    const auto rel = load_relevance(root / "qrels.tsv");
    CHECK(queries.size() == 10);
    const auto base = evaluate_queries(idx, queries, rel);
    CHECK(std::abs(base.precision_at_10 - 0.1) < 1e-12);
    CHECK(std::abs(base.map - 0.2) < 1e-12);
    CHECK(hard_queries(idx, queries, rel).size() == 8);
}

TEST_CASE("analogy parsing and overlap") {
    const auto q = parse_analogy("dog:animal::iron:metal|fish:water|bird:wing|book:paper 0");
    CHECK(q.query == WordPair{"dog", "animal"});
    CHECK(q.candidates[3] == WordPair{"book", "paper"});
    CHECK(q.answer == 0u);
    CHECK_THROWS_AS(parse_analogy("dog:animal::iron:metal|fish:water 0"), Error);
    const RelationBag a{{"IsA", 2}, {"HasA", 1}}, b{{"IsA", 1}, {"PartOf", 1}};
    CHECK(relation_overlap(a, b) == doctest::Approx(1.0 / 4).epsilon(1e-15));
    CHECK(relation_overlap({}, {}) == 0.0);
}

TEST_CASE("analogy by direct relations") {
    const auto g = make_graph({{"dog", "animal", "IsA"},
                               {"iron", "metal", "PartOf"},
                               {"oak", "tree", "IsA"},
                               {"car", "road", "AtLocation"},
                               {"pen", "ink", "HasA"}});
    AnalogyQuestion q{{"dog", "animal"}, {{{"iron", "metal"}, {"oak", "tree"}, {"car", "road"}, {"pen", "ink"}}}, 1};
    const auto r = analogy_solve(q, g, nullptr, 100);
    CHECK(r.direct);
    CHECK(r.choice == 1u);
    AnalogyQuestion disjoint{{"dog", "animal"}, {{{"iron", "metal"}, {"car", "road"}, {"pen", "ink"}, {"ink", "pen"}}}, 0};
    CHECK_FALSE(analogy_solve(disjoint, g, nullptr, 100).choice.has_value());
    AnalogyQuestion unknown{{"zzz", "yyy"}, {{{"iron", "metal"}, {"car", "road"}, {"pen", "ink"}, {"oak", "tree"}}}, 0};
    CHECK_FALSE(analogy_solve(unknown, g, nullptr, 100).choice.has_value());
}

TEST_CASE("filtering to the most natural paths flips an analogy") {
    std::vector<Row> rows;
    // Query: three IsA routes and seven RelatedTo routes.
    for (int i = 0; i < 3; ++i) rows.push_back({"qa", "qi" + std::to_string(i), "IsA"}), rows.push_back({"qi" + std::to_string(i), "qb", "IsA"});
    for (int i = 3; i < 10; ++i) rows.push_back({"qa", "qi" + std::to_string(i), "RelatedTo"}), rows.push_back({"qi" + std::to_string(i), "qb", "RelatedTo"});
    // Candidate 0: ten RelatedTo routes; candidate 1: one IsA route and two HasA routes.
    for (int i = 0; i < 10; ++i) rows.push_back({"c0", "m" + std::to_string(i), "RelatedTo"}), rows.push_back({"m" + std::to_string(i), "d0", "RelatedTo"});
    rows.push_back({"c1", "n0", "IsA"}), rows.push_back({"n0", "d1", "IsA"});
    for (int i = 1; i < 3; ++i) rows.push_back({"c1", "n" + std::to_string(i), "HasA"}), rows.push_back({"n" + std::to_string(i), "d1", "HasA"});
    rows.push_back({"c2", "o", "UsedFor"}), rows.push_back({"o", "d2", "UsedFor"});
    rows.push_back({"c3", "p", "Causes"}), rows.push_back({"p", "d3", "Causes"});
    const auto g = make_graph(rows);
    const PathScorer isa_first = [&](const Path& p) {
        return g.relations().name(g.edge(p.steps[0].edge).relation) == "IsA" ? 1.0 : 0.0;
    };
    const AnalogyQuestion q{{"qa", "qb"}, {{{"c0", "d0"}, {"c1", "d1"}, {"c2", "d2"}, {"c3", "d3"}}}, 1};

    // Brute force: relation bags from the oracle enumerator, ranked with the same scorer.
    auto bag = [&](const std::string& a, const std::string& b, double pct) {
        std::vector<std::pair<double, std::vector<std::string>>> ranked;
        for (const auto& lp : brute_force_paths(g, a, b, 3)) {
            if (std::get<0>(lp).size() != 3) continue;
            ranked.push_back({std::get<1>(lp)[0] == "IsA" ? 1.0 : 0.0, std::get<1>(lp)});
        }
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
        const auto keep = static_cast<std::size_t>(std::ceil(pct * static_cast<double>(ranked.size()) / 100));
        std::map<std::string, double> m;
        for (std::size_t k = 0; k < keep; ++k)
            for (const auto& r : ranked[k].second) m[r] += 1;
        return m;
    };
    auto jaccard = [](const std::map<std::string, double>& x, const std::map<std::string, double>& y) {
        double lo = 0, hi = 0;
        std::set<std::string> keys;
        for (const auto& [k, _] : x) keys.insert(k);
        for (const auto& [k, _] : y) keys.insert(k);
        for (const auto& k : keys) {
            const double a = x.count(k) ? x.at(k) : 0, b = y.count(k) ? y.at(k) : 0;
            lo += std::min(a, b);
            hi += std::max(a, b);
        }
        return hi > 0 ? lo / hi : 0.0;
    };
    for (double pct : {100.0, 30.0}) {
        std::size_t best = 0;
        std::array<double, 4> s{};
        for (std::size_t k = 0; k < 4; ++k) {
            s[k] = jaccard(bag("qa", "qb", pct), bag(q.candidates[k].first, q.candidates[k].second, pct));
            if (s[k] > s[best]) best = k;
        }
        const auto r = analogy_solve(q, g, &isa_first, pct);
        REQUIRE(r.choice.has_value());
        CHECK(*r.choice == best);
        for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(r.scores[k] - s[k]) < 1e-12);
        CHECK(*r.choice == (pct == 100.0 ? 0u : 1u));
    }
}

TEST_CASE("shipped analogy questions") {
    const auto qs = load_analogies(PATHNAT_DATA_DIR "/analogy/questions.txt");
    CHECK(qs.size() == 6);
    const auto g = Graph::load(PATHNAT_DATA_DIR "/toy/edges.tsv", RelationTable::conceptnet());
    const auto acc = analogy_accuracy(qs, g, nullptr, 100);
    CHECK(acc.questions == 6);
    CHECK(acc.correct <= acc.answered);
}

}
