// Frozen facts about the four shipped case-study fixtures: estimates, clique
// structure, value-fixing accounting, encoding-size formulas, and optimal
// objectives on the 20-offer catalog. Any change to the fixtures or to the
// reduction machinery that shifts these numbers must be reviewed here.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <set>
#include <string>

#include "deployopt/json_io.hpp"
#include "deployopt/pipeline.hpp"

using namespace deployopt;

namespace {

const std::string kDir = FIXTURE_DIR;

ApplicationSpec spec_of(const std::string& name) {
    return load_spec(kDir + "/" + name + ".json");
}

OfferCatalog offers20() { return load_offers(kDir + "/offers-20.json"); }

Analysis analyze(const std::string& name, Strategy strategy) {
    auto cat = offers20();
    auto vspec = validate_spec(spec_of(name), cat);
    PipelineOptions po;
    po.strategy = strategy;
    return analyze_problem(vspec, cat, po);
}

std::int64_t solve_objective(const std::string& name, Strategy strategy) {
    PipelineOptions po;
    po.strategy = strategy;
    po.timeout_ms = 240'000;
    auto res = run_pipeline(spec_of(name), offers20(), po);
    REQUIRE(res.status == SolveStatus::Optimal);
    REQUIRE(res.report.passed);
    return res.objective;
}

}  // namespace

TEST_CASE("estimator reproduces the published machine bounds") {
    auto t0 = std::chrono::steady_clock::now();
    CHECK(analyze("secure-web", Strategy::None).estimate.m_upper == 6);
    CHECK(analyze("secure-billing", Strategy::None).estimate.m_upper == 5);
    CHECK(analyze("oryx2", Strategy::None).estimate.m_upper == 11);
    CHECK(analyze("wordpress", Strategy::None).estimate.m_upper == 9);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    CHECK(ms < 1000);  // all four together, well under the per-spec budget
}

TEST_CASE("per-component estimates") {
    CHECK(analyze("secure-web", Strategy::None).estimate.nu ==
          std::vector<std::int64_t>{1, 1, 2, 1, 1});
    CHECK(analyze("secure-billing", Strategy::None).estimate.nu ==
          std::vector<std::int64_t>{1, 1, 1, 1, 1});
    // the exclusive branch with the DNS balancer wins; the HTTP balancer and
    // the cache stay undeployed in the estimate
    CHECK(analyze("wordpress", Strategy::None).estimate.nu ==
          std::vector<std::int64_t>{3, 5, 1, 0, 0});
    CHECK(analyze("oryx2", Strategy::None).estimate.nu ==
          std::vector<std::int64_t>{1, 2, 1, 1, 1, 1, 1, 1, 1, 1});
}

TEST_CASE("co-location merging collapses oryx2 to ten hyper-components") {
    Analysis an = analyze("oryx2", Strategy::None);
    CHECK(an.merge.merged.spec.components.size() == 10);
    REQUIRE(an.merge.groups.size() == 1);
    CHECK(an.merge.groups[0].first == 5);
    CHECK(an.merge.groups[0].second == std::vector<int>{5, 8, 9});
    // the other three fixtures have no co-location constraints
    CHECK(analyze("secure-web", Strategy::None).merge.groups.empty());
    CHECK(analyze("secure-billing", Strategy::None).merge.groups.empty());
    CHECK(analyze("wordpress", Strategy::None).merge.groups.empty());
}

TEST_CASE("conflict cliques and selection") {
    using C = std::vector<std::size_t>;
    Analysis web = analyze("secure-web", Strategy::None);
    CHECK(web.cliques == std::vector<C>{{0, 1, 2, 3}, {0, 3, 4}});
    CHECK(web.selected_clique == C{0, 1, 2, 3});

    Analysis bill = analyze("secure-billing", Strategy::None);
    CHECK(bill.cliques == std::vector<C>{{0, 1}, {0, 2, 4}, {0, 3, 4}});
    CHECK(bill.selected_clique == C{0, 2, 4});

    Analysis wp = analyze("wordpress", Strategy::None);
    CHECK(wp.cliques == std::vector<C>{{0, 2, 3, 4}, {1, 2, 3, 4}});
    CHECK(wp.selected_clique == C{1, 2, 3, 4});

    Analysis oryx = analyze("oryx2", Strategy::None);
    CHECK(oryx.cliques == std::vector<C>{{0, 1}, {2, 3, 5}, {5, 6}});
    CHECK(oryx.selected_clique == C{0, 1});
}

TEST_CASE("value-fixing accounting on the shipped fixtures") {
    Analysis web = analyze("secure-web", Strategy::FV);
    CHECK(web.fv_mode == FvMode::Conservative);
    CHECK(web.breakers.fixed.fixed_count() == 18);
    CHECK(web.total_cells == 30);

    Analysis bill = analyze("secure-billing", Strategy::FV);
    CHECK(bill.fv_mode == FvMode::Conservative);
    CHECK(bill.breakers.fixed.fixed_count() == 12);
    CHECK(bill.total_cells == 25);

    Analysis oryx = analyze("oryx2", Strategy::FV);
    CHECK(oryx.fv_mode == FvMode::Full);
    CHECK(oryx.breakers.fixed.fixed_count() == 6);
    CHECK(oryx.total_cells == 110);

    // the wordpress clique is dominated by components whose deployment is
    // optional (exclusive sets); only the database and the DNS balancer's
    // block neighbours can be pinned soundly
    Analysis wp = analyze("wordpress", Strategy::FV);
    CHECK(wp.fv_mode == FvMode::Conservative);
    CHECK(wp.breakers.fixed.fixed_count() == 4);
    CHECK(wp.total_cells == 45);
}

TEST_CASE("encoding-size formulas hold for every fixture") {
    for (const char* name : {"secure-web", "secure-billing", "wordpress", "oryx2"}) {
        CAPTURE(name);
        auto cat = offers20();
        Analysis an = analyze(name, Strategy::None);
        ConstraintIR ir = build_pipeline_ir(an, cat);
        auto counts = ir.family_counts();
        CHECK(counts[Family::Link] == ir.M * ir.O);
        CHECK(counts[Family::Capacity] == ir.H * ir.M);
        CHECK(ir.O == 20);
        CHECK(ir.H == 3);
    }
}

TEST_CASE("optimal objectives on the 20-offer catalog are stable") {
    CHECK(solve_objective("secure-web", Strategy::None) == 969'000);
    CHECK(solve_objective("secure-billing", Strategy::None) == 672'000);
    CHECK(solve_objective("wordpress", Strategy::None) == 594'000);
    CHECK(solve_objective("oryx2", Strategy::FV) == 2'648'000);
}

TEST_CASE("reduction strategies agree with the plain model") {
    // the full 28-cell matrix runs in the acceptance gate; here the quick
    // cells guard against regressions in each breaker family
    for (Strategy s : {Strategy::PR, Strategy::LX, Strategy::PRLX, Strategy::FV,
                       Strategy::FVPR, Strategy::FVLX}) {
        CAPTURE(strategy_name(s));
        CHECK(solve_objective("secure-billing", s) == 672'000);
    }
    CHECK(solve_objective("secure-web", Strategy::FVPR) == 969'000);
    CHECK(solve_objective("wordpress", Strategy::FV) == 594'000);
    CHECK(solve_objective("oryx2", Strategy::FVLX) == 2'648'000);
}

TEST_CASE("offer catalogs form a containment hierarchy") {
    OfferCatalog prev;
    for (int n : {20, 40, 250, 500}) {
        OfferCatalog cur = load_offers(kDir + "/offers-" + std::to_string(n) + ".json");
        CHECK(cur.offers.size() == std::size_t(n));
        std::set<int> ids;
        for (const auto& o : cur.offers) ids.insert(o.offer_id);
        CHECK(ids.size() == cur.offers.size());
        for (const auto& o : prev.offers) {
            const VMOffer& same = cur.by_id(o.offer_id);
            CHECK(same.capacity == o.capacity);
            CHECK(same.price == o.price);
        }
        prev = cur;
    }
}

TEST_CASE("duplicate offer rows survive catalog parsing") {
    // duplicated capacity+price rows are exactly the symmetry the breakers
    // target, so ingestion must not deduplicate them
    OfferCatalog cat = offers20();
    std::set<std::pair<std::string, Money>> shapes;
    for (const auto& o : cat.offers) {
        std::string key;
        for (auto c : o.capacity) key += std::to_string(c) + ",";
        shapes.emplace(key, o.price);
    }
    CHECK(shapes.size() < cat.offers.size());
}
