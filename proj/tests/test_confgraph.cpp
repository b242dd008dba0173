#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "deployopt/confgraph.hpp"

using namespace deployopt;

namespace {

// oracle: a vertex set is a maximal clique iff pairwise adjacent and no
// outside vertex extends it
std::vector<std::vector<std::size_t>> cliques_by_enumeration(const ConflictGraph& g) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint32_t mask = 1; mask < (1u << g.n); ++mask) {
        std::vector<std::size_t> set;
        for (std::size_t v = 0; v < g.n; ++v)
            if (mask & (1u << v)) set.push_back(v);
        if (set.size() < 2) continue;
        bool clique = true;
        for (std::size_t a = 0; a < set.size() && clique; ++a)
            for (std::size_t b = a + 1; b < set.size(); ++b)
                if (!g.edge(set[a], set[b])) {
                    clique = false;
                    break;
                }
        if (!clique) continue;
        bool maximal = true;
        for (std::size_t v = 0; v < g.n && maximal; ++v) {
            if (mask & (1u << v)) continue;
            bool extends = true;
            for (std::size_t u : set)
                if (!g.edge(v, u)) extends = false;
            if (extends) maximal = false;
        }
        if (maximal) out.push_back(set);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("triangle plus pendant edge") {
    ConflictGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    g.add_edge(2, 3);
    auto cliques = enumerate_maximal_cliques(g);
    REQUIRE(cliques.size() == 2);
    CHECK(cliques[0] == std::vector<std::size_t>({0, 1, 2}));
    CHECK(cliques[1] == std::vector<std::size_t>({2, 3}));
}

TEST_CASE("edgeless graph has no cliques worth reporting") {
    ConflictGraph g(3);
    CHECK(enumerate_maximal_cliques(g).empty());
}

TEST_CASE("complete graph is one clique") {
    ConflictGraph g(5);
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = a + 1; b < 5; ++b) g.add_edge(a, b);
    auto cliques = enumerate_maximal_cliques(g);
    REQUIRE(cliques.size() == 1);
    CHECK(cliques[0].size() == 5);
}

TEST_CASE("randomized graphs match the subset-enumeration oracle") {
    std::mt19937 rng(7);
    for (int round = 0; round < 300; ++round) {
        std::size_t n = 2 + rng() % 9;
        ConflictGraph g(n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (rng() % 3 == 0) g.add_edge(a, b);
        CHECK(enumerate_maximal_cliques(g) == cliques_by_enumeration(g));
    }
}

TEST_CASE("clique selection maximizes total instances, lex tie-break") {
    std::vector<std::vector<std::size_t>> cliques = {{0, 1}, {1, 2}, {2, 3}};
    CHECK(select_clique(cliques, {1, 1, 2, 1}) == std::vector<std::size_t>({1, 2}));
    // tie between {1,2} and {2,3}
    CHECK(select_clique(cliques, {1, 1, 1, 1}) == std::vector<std::size_t>({0, 1}));
    CHECK(select_clique({}, {1, 1}).empty());
}

TEST_CASE("fix_assignments pins members on disjoint machine runs") {
    ConflictGraph g(3);
    g.add_edge(0, 1);
    auto fc = fix_assignments({0, 1}, {2, 1}, 5, FvMode::Full, g);
    CHECK(fc.machines_used == 3);
    CHECK(fc.ones == decltype(fc.ones)({{0, 0}, {0, 1}, {1, 2}}));
    // every non-owner clique cell inside the block is zeroed
    CHECK(fc.value_at(1, 0) == 0);
    CHECK(fc.value_at(1, 1) == 0);
    CHECK(fc.value_at(0, 2) == 0);
    CHECK(fc.value_at(2, 0) == -1);  // no conflict with either member
    CHECK(fc.fixed_count() == 6);
}

TEST_CASE("conservative mode pins one instance per member") {
    ConflictGraph g(2);
    g.add_edge(0, 1);
    auto fc = fix_assignments({0, 1}, {4, 4}, 3, FvMode::Conservative, g);
    CHECK(fc.machines_used == 2);
    CHECK(fc.ones.size() == 2);
    CHECK(fc.fixed_count() == 4);
}

TEST_CASE("zeros propagate to conflicting outsiders") {
    ConflictGraph g(3);
    g.add_edge(0, 1);
    g.add_edge(0, 2);  // vertex 2 conflicts with member 0 only
    auto fc = fix_assignments({0, 1}, {1, 1}, 4, FvMode::Full, g);
    CHECK(fc.value_at(2, 0) == 0);
    CHECK(fc.value_at(2, 1) == -1);
    CHECK(fc.fixed_count() == 5);
}

TEST_CASE("block larger than machine count is rejected") {
    ConflictGraph g(2);
    g.add_edge(0, 1);
    CHECK_THROWS_AS(fix_assignments({0, 1}, {3, 3}, 4, FvMode::Full, g), CliqueError);
}

TEST_CASE("graph from spec constraints") {
    ApplicationSpec spec;
    spec.name = "g";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {1}}, {2, "b", {1}}, {3, "c", {1}}};
    spec.constraints = {Conflict{1, 3}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {8}, 1000}};
    auto vspec = validate_spec(spec, cat);
    auto g = ConflictGraph::from_spec(vspec);
    CHECK(g.edge(0, 2));
    CHECK_FALSE(g.edge(0, 1));
    CHECK(g.degree(0) == 1);
}

TEST_CASE("mode selection turns conservative under instance bounds") {
    ApplicationSpec spec;
    spec.name = "m";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {1}}, {2, "b", {1}}, {3, "c", {1}}};
    spec.constraints = {Conflict{1, 2}, BoundInstances{{3}, BoundOp::Le, 2}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {8}, 1000}};
    auto vspec = validate_spec(spec, cat);
    CHECK(choose_fv_mode(vspec, {0, 1}) == FvMode::Full);
    spec.constraints.push_back(BoundInstances{{2}, BoundOp::Eq, 1});
    auto vspec2 = validate_spec(spec, cat);
    CHECK(choose_fv_mode(vspec2, {0, 1}) == FvMode::Conservative);
}
