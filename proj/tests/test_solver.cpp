#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "deployopt/ir.hpp"
#include "deployopt/model.hpp"
#include "deployopt/solver.hpp"
#include "support/gen.hpp"

using namespace deployopt;

namespace {

ValidatedSpec validated(const testgen::Instance& inst) {
    return validate_spec(inst.spec, inst.catalog);
}

}  // namespace

TEST_CASE("single component takes the cheapest fitting offer") {
    ApplicationSpec spec;
    spec.name = "one";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {2}}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {1}, 5}, {2, {4}, 30}, {3, {2}, 12}};
    auto vspec = validate_spec(spec, cat);
    auto ir = build_ir(vspec, cat, 1);
    auto res = solve(ir);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.objective == 12);
    CHECK(res.plan.types == std::vector<int>({3}));
    CHECK(check_plan(vspec, cat, res.plan).passed);
}

TEST_CASE("two conflicting components need two machines") {
    ApplicationSpec spec;
    spec.name = "pair";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {1}}, {2, "b", {1}}};
    spec.constraints = {Conflict{1, 2}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {4}, 10}, {2, {4}, 7}};
    auto vspec = validate_spec(spec, cat);
    auto ir = build_ir(vspec, cat, 2);
    auto res = solve(ir);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.objective == 14);
    CHECK(check_plan(vspec, cat, res.plan).passed);
}

TEST_CASE("infeasible when machines are too few") {
    ApplicationSpec spec;
    spec.name = "tight";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {3}}, {2, "b", {3}}};
    spec.constraints = {Conflict{1, 2}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {4}, 10}};
    auto vspec = validate_spec(spec, cat);
    auto ir = build_ir(vspec, cat, 1);
    CHECK(solve(ir).status == SolveStatus::Infeasible);
    CHECK(brute_force(ir).status == SolveStatus::Infeasible);
}

TEST_CASE("co-hosting beats separate machines when cheaper") {
    ApplicationSpec spec;
    spec.name = "share";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {2}}, {2, "b", {2}}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {2}, 10}, {2, {4}, 15}};
    auto vspec = validate_spec(spec, cat);
    auto ir = build_ir(vspec, cat, 2);
    auto res = solve(ir);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.objective == 15);
}

TEST_CASE("lower bound is trivial on easy states") {
    ApplicationSpec spec;
    spec.name = "lb";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {2}}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {2}, 12}, {2, {4}, 30}};
    auto vspec = validate_spec(spec, cat);
    auto ir = build_ir(vspec, cat, 1);
    CHECK(lower_bound(ir, {1}, 1) == 12);
    CHECK(lower_bound(ir, {0}, 1) == 0);
    CHECK(lower_bound(ir, {1}, 0) == std::numeric_limits<std::int64_t>::max());
}

TEST_CASE("timeout returns without a proof") {
    std::mt19937 rng(99);
    auto inst = testgen::random_instance(rng);
    auto vspec = validated(inst);
    auto ir = build_ir(vspec, inst.catalog, 3);
    auto res = solve(ir, 0);
    CHECK(res.status == SolveStatus::Timeout);
}

TEST_CASE("randomized agreement between solve and the exhaustive oracle") {
    std::mt19937 rng(20240818);
    int solved = 0, infeasible = 0;
    for (int round = 0; round < 500; ++round) {
        auto inst = testgen::random_instance(rng);
        ValidatedSpec vspec;
        try {
            vspec = validated(inst);
        } catch (const ValidationError&) {
            continue;  // generator occasionally trips a validation rule
        }
        std::size_t m = 1 + rng() % 4;
        auto ir = build_ir(vspec, inst.catalog, m);
        auto oracle = brute_force(ir);
        auto fast = solve(ir);
        REQUIRE(fast.status == oracle.status);
        if (oracle.status == SolveStatus::Optimal) {
            ++solved;
            CHECK(fast.objective == oracle.objective);
            CHECK(fast.plan.total_price == fast.objective);
            auto report = check_plan(vspec, inst.catalog, fast.plan);
            CHECK(report.passed);
            // admissibility of the completion bound from the root
            std::vector<std::uint8_t> unsat(ir.N, 1);
            for (std::size_t i : ir.meta.optional_components) unsat[i] = 0;
            CHECK(lower_bound(ir, unsat, m) <= oracle.objective);
        } else {
            ++infeasible;
        }
    }
    // the suite must exercise both outcomes
    CHECK(solved > 100);
    CHECK(infeasible > 10);
}

TEST_CASE("parallel solve matches single-threaded objective") {
    std::mt19937 rng(4242);
    for (int round = 0; round < 40; ++round) {
        auto inst = testgen::random_instance(rng);
        ValidatedSpec vspec;
        try {
            vspec = validated(inst);
        } catch (const ValidationError&) {
            continue;
        }
        auto ir = build_ir(vspec, inst.catalog, 3);
        auto seq = solve(ir);
        auto par = solve(ir, 2'400'000, 4);
        REQUIRE(par.status == seq.status);
        if (seq.status == SolveStatus::Optimal) CHECK(par.objective == seq.objective);
    }
}

TEST_CASE("deterministic across repeated runs") {
    std::mt19937 rng(777);
    auto inst = testgen::random_instance(rng);
    auto vspec = validated(inst);
    auto ir = build_ir(vspec, inst.catalog, 3);
    auto a = solve(ir);
    auto b = solve(ir);
    CHECK(a.status == b.status);
    CHECK(a.stats.nodes_explored == b.stats.nodes_explored);
    if (a.has_plan) {
        CHECK(a.plan.types == b.plan.types);
        CHECK(a.plan.assignment == b.plan.assignment);
    }
}
