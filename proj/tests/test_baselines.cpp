#include "doctest.h"
#include "oracles.hpp"

#include "pathnat/baselines.hpp"

#include <cmath>

using namespace testkit;

namespace {

Path only_path(const Graph& g, const std::string& a, const std::string& b, std::size_t nodes) {
    for (const auto& p : enumerate_paths(g, a, b, nodes)) {
        if (p.node_count() == nodes) return p;
    }
    throw Error("fixture path missing");
}

std::vector<double> unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("names round trip") {
    for (auto k : {BaselineKind::source_target, BaselineKind::pairwise, BaselineKind::flow, BaselineKind::length}) {
        CHECK(parse_baseline(to_string(k)) == k);
    }
    CHECK_FALSE(parse_baseline("bogus").has_value());
}

TEST_CASE("flow examples") {
    const auto chain = make_graph({{"a", "b", "IsA"}, {"b", "c", "IsA"}});
    CHECK(flow_score(chain, only_path(chain, "a", "c", 3)) == 1.0);
    const auto branch = make_graph({{"a", "b", "IsA"}, {"b", "c", "IsA"}, {"b", "d", "IsA"}});
    CHECK(flow_score(branch, only_path(branch, "a", "c", 3)) == 0.5);
    const auto star = make_graph({{"s", "a", "IsA"}, {"s", "b", "IsA"}, {"s", "c", "IsA"}, {"s", "d", "IsA"}});
    CHECK(flow_score(star, only_path(star, "s", "a", 2)) == 0.25);
}

TEST_CASE("flow range and the unit case") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto g = random_graph(9, 16, seed);
        for (const auto& p : sample_paths(g, nullptr, 4, 10, seed)) {
            const double f = flow_score(g, p);
            CHECK(f > 0.0);
            CHECK(f <= 1.0);
            bool unit_case = g.degree(p.vertices.front()) == 1;
            for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i) unit_case = unit_case && g.degree(p.vertices[i]) <= 2;
            CHECK((f == 1.0) == unit_case);
            std::vector<std::string> labels;
            for (auto v : p.vertices) labels.push_back(g.label(v));
            CHECK(std::abs(f - flow_oracle(g, labels)) < 1e-12);
        }
    }
}

TEST_CASE("source/target and pairwise similarity") {
    const auto g = make_graph({{"x", "y", "IsA"}, {"y", "z", "IsA"}, {"x", "w", "IsA"}});
    EmbeddingTable t;
    t.add("x", unit(0.0));
    t.add("y", unit(std::acos(0.8)));
    t.add("z", unit(std::acos(0.8) + std::acos(0.2)));
    t.add("w", unit(0.0));
    const auto two = only_path(g, "x", "w", 2);
    CHECK(st_score(g, two, t) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pair_score(g, two, t) == st_score(g, two, t));
    const auto three = only_path(g, "x", "z", 3);
    CHECK(std::abs(pair_score(g, three, t) - 0.5) < 1e-12);

    EmbeddingTable fixture;
    fixture.add("x", std::vector<double>{1, 0});
    fixture.add("y", std::vector<double>{1, 1});
    fixture.add("z", std::vector<double>{0, 1});
    fixture.add("w", std::vector<double>{1, 0});
    CHECK(std::abs(st_score(g, only_path(g, "x", "y", 2), fixture) - 0.7071067811865476) < 1e-12);
    CHECK(st_score(g, three, fixture) == 0.0);
    CHECK(std::abs(pair_score(g, three, fixture) - 0.7071067811865476) < 1e-12);
    EmbeddingTable same;
    for (const char* w : {"x", "y", "z", "w"}) same.add(w, std::vector<double>{2, 3});
    CHECK(pair_score(g, three, same) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pairwise similarity is invariant under reversal") {
    const auto g = random_graph(10, 20, 3);
    EmbeddingTable t;
    Rng rng(1);
    for (ConceptId c = 0; c < g.concept_count(); ++c) {
        t.add(g.label(c), std::vector<double>{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    }
    for (const auto& p : sample_paths(g, nullptr, 4, 15, 2)) {
        CHECK(pair_score(g, p, t) == doctest::Approx(pair_score(g, reverse_path(g, p), t)).epsilon(1e-14));
    }
}

TEST_CASE("length") {
    const auto g = six_vertex_graph();
    const auto short_path = only_path(g, "a", "b", 2);
    const auto long_path = only_path(g, "a", "e", 4);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const double s = length_score(g, short_path, seed);
        const double l = length_score(g, long_path, seed);
        CHECK(s > l);
        CHECK(s > -2.0);
        CHECK(s < -1.0);
        CHECK(l > -4.0);
        CHECK(l < -3.0);
    }
    // Equal lengths: reproducible per seed, each wins about half the time.
    const auto p1 = only_path(g, "b", "e", 3);
    const auto p2 = only_path(g, "a", "c", 3);
    CHECK(length_score(g, p1, 7) == length_score(g, p1, 7));
    int wins = 0;
    const int trials = 4000;
    for (int seed = 0; seed < trials; ++seed) wins += length_score(g, p1, seed) > length_score(g, p2, seed);
    CHECK(std::abs(wins / static_cast<double>(trials) - 0.5) < 0.03);
}

TEST_CASE("scorers dispatch") {
    const auto g = six_vertex_graph();
    const auto p = only_path(g, "a", "e", 4);
    CHECK(baseline_scorer(BaselineKind::flow, g, nullptr, 0)(p) == flow_score(g, p));
    CHECK(baseline_scorer(BaselineKind::length, g, nullptr, 3)(p) == length_score(g, p, 3));
    CHECK_THROWS_AS(baseline_scorer(BaselineKind::source_target, g, nullptr, 0), Error);
}

}
