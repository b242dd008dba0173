#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "deployopt/ir.hpp"
#include "deployopt/model.hpp"
#include "deployopt/solver.hpp"
#include "support/gen.hpp"

using namespace deployopt;

namespace {

OfferCatalog catalog2() {
    OfferCatalog cat;
    cat.dimensions = {"cpu", "memory"};
    cat.offers = {{1, {2, 4000}, 100}, {2, {4, 8000}, 180}};
    return cat;
}

ValidatedSpec simple_spec() {
    ApplicationSpec spec;
    spec.name = "s";
    spec.dimensions = {"cpu", "memory"};
    spec.components = {{1, "a", {1, 2000}}, {2, "b", {2, 4000}}};
    return validate_spec(spec, catalog2());
}

}  // namespace

TEST_CASE("constraint-count formulas: link = M*O, capacity = H*M") {
    auto vspec = simple_spec();
    auto ir = build_ir(vspec, catalog2(), 3);
    auto counts = ir.family_counts();
    CHECK(counts[Family::Link] == 3 * 2);
    CHECK(counts[Family::Capacity] == 2 * 3);
    CHECK(counts[Family::BasicAllocation] == 2);
    CHECK(counts[Family::Occupancy] == 2 * 3);
}

TEST_CASE("variable layout and bounds") {
    auto vspec = simple_spec();
    auto ir = build_ir(vspec, catalog2(), 2);
    CHECK(ir.vars.size() == 2 * 2 + 2 + 2 + 2 + 2 * 2);
    CHECK(ir.vars[ir.a_var(1, 0)].name == "a_2_1");
    CHECK(ir.vars[ir.t_var(1)].ub == 2);   // O offers
    CHECK(ir.vars[ir.p_var(0)].ub == 180); // max price
    CHECK(ir.vars[ir.r_var(0, 1)].ub == 8000);
    CHECK(ir.objective == std::vector<int>({ir.p_var(0), ir.p_var(1)}));
}

TEST_CASE("empty catalog rejected") {
    auto vspec = simple_spec();
    OfferCatalog empty;
    empty.dimensions = {"cpu", "memory"};
    CHECK_THROWS_AS(build_ir(vspec, empty, 2), IrError);
}

TEST_CASE("1x1x1 instance has a unique feasible point") {
    ApplicationSpec spec;
    spec.name = "unit";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {1}}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {2}, 42}};
    auto vspec = validate_spec(spec, cat);
    auto ir = build_ir(vspec, cat, 1);
    auto res = brute_force(ir);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.plan.assignment == decltype(res.plan.assignment){{1}});
    CHECK(res.plan.types == std::vector<int>({1}));
    CHECK(res.objective == 42);
}

TEST_CASE("lowering step terms preserves the optimum") {
    ApplicationSpec spec;
    spec.name = "exc";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {1}}, {2, "b", {2}}};
    spec.constraints = {ExclusiveDeploy{{1, 2}}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {1}, 10}, {2, {2}, 25}};
    auto vspec = validate_spec(spec, cat);
    auto ir = build_ir(vspec, cat, 2);
    auto base = brute_force(ir);
    auto lowered = ir;
    lower_h_terms(lowered);
    CHECK(lowered.lowered);
    auto after = brute_force(lowered);
    REQUIRE(base.status == SolveStatus::Optimal);
    REQUIRE(after.status == SolveStatus::Optimal);
    CHECK(base.objective == 10);  // deploy only the cheap component
    CHECK(after.objective == 10);
    // lowering twice is a no-op
    auto again = lowered;
    lower_h_terms(again);
    CHECK(again.rows.size() == lowered.rows.size());
}

TEST_CASE("step semantics against a truth table") {
    // single indicator over two cells: aux must equal step(sum)
    ApplicationSpec spec;
    spec.name = "h";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {1}}, {2, "b", {1}}};
    spec.constraints = {ExclusiveDeploy{{1, 2}}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {2}, 10}};
    auto vspec = validate_spec(spec, cat);
    auto ir = build_ir(vspec, cat, 2);
    REQUIRE(ir.indicators.size() == 2);
    const auto& ind = ir.indicators[0];
    std::vector<std::int64_t> vals(ir.vars.size(), 0);
    for (int b0 : {0, 1})
        for (int b1 : {0, 1}) {
            vals[ind.vars[0]] = b0;
            vals[ind.vars[1]] = b1;
            for (int aux : {0, 1}) {
                vals[ind.aux] = aux;
                bool ok = true;
                for (const auto& i2 : ir.indicators) {
                    std::int64_t s = 0;
                    for (int v : i2.vars) s += vals[v];
                    if (vals[i2.aux] != (s > 0 ? 1 : 0)) ok = false;
                }
                CHECK(ok == (aux == ((b0 + b1) > 0 ? 1 : 0)));
            }
        }
}

TEST_CASE("full deployment without conflicts needs no step terms") {
    ApplicationSpec spec;
    spec.name = "fd";
    spec.dimensions = {"cpu"};
    spec.components = {{1, "a", {1}}, {2, "b", {1}}};
    spec.constraints = {FullDeploy{1}};
    OfferCatalog cat;
    cat.dimensions = {"cpu"};
    cat.offers = {{1, {4}, 10}};
    auto vspec = validate_spec(spec, cat);
    auto ir = build_ir(vspec, cat, 2);
    CHECK(ir.indicators.empty());
}

TEST_CASE("fixed cells tighten variable bounds and add rows") {
    auto vspec = simple_spec();
    FixedCells fc;
    fc.ones = {{1, 0}};
    fc.zeros = {{0, 0}};
    fc.machines_used = 1;
    auto ir = build_ir(vspec, catalog2(), 2, &fc);
    CHECK(ir.vars[ir.a_var(1, 0)].lb == 1);
    CHECK(ir.vars[ir.a_var(0, 0)].ub == 0);
    CHECK(ir.family_counts()[Family::FixedCell] == 2);
    CHECK_FALSE(ir.meta.columns_symmetric);
    auto res = brute_force(ir);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.plan.assignment[1][0] == 1);
    CHECK(res.plan.assignment[0][0] == 0);
}

TEST_CASE("pretty printer is deterministic") {
    auto vspec = simple_spec();
    auto a = ir_to_text(build_ir(vspec, catalog2(), 2));
    auto b = ir_to_text(build_ir(vspec, catalog2(), 2));
    CHECK(a == b);
    CHECK(a.find("minimize p_1 p_2") != std::string::npos);
    CHECK(a.find("Capacity") != std::string::npos);
}

TEST_CASE("IR optimum always maps to a checkable plan") {
    std::mt19937 rng(515);
    int checked = 0;
    for (int round = 0; round < 120; ++round) {
        auto inst = testgen::random_instance(rng);
        ValidatedSpec vspec;
        try {
            vspec = validate_spec(inst.spec, inst.catalog);
        } catch (const ValidationError&) {
            continue;
        }
        auto ir = build_ir(vspec, inst.catalog, 1 + rng() % 3);
        auto res = brute_force(ir);
        if (res.status != SolveStatus::Optimal) continue;
        CHECK(check_plan(vspec, inst.catalog, res.plan).passed);
        ++checked;
    }
    CHECK(checked > 30);
}
