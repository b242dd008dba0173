#ifndef DEPLOYOPT_TESTS_GEN_HPP
#define DEPLOYOPT_TESTS_GEN_HPP

#include <random>
#include <vector>

#include "deployopt/model.hpp"

namespace testgen {

struct Instance {
    deployopt::ApplicationSpec spec;
    deployopt::OfferCatalog catalog;
};

// Small random instances sized for the exhaustive oracle. Every component
// fits the largest offer, conflict/colocate pairs never clash, and instance
// bounds stay satisfiable.
inline Instance random_instance(std::mt19937& rng) {
    using namespace deployopt;
    auto pick = [&](int lo, int hi) { return lo + int(rng() % unsigned(hi - lo + 1)); };

    Instance inst;
    int n = pick(1, 4);
    int o = pick(1, 3);
    int h = pick(1, 2);

    inst.spec.name = "rnd";
    for (int d = 0; d < h; ++d)
        inst.spec.dimensions.push_back(d == 0 ? "cpu" : "memory");
    inst.catalog.dimensions = inst.spec.dimensions;

    for (int i = 1; i <= n; ++i) {
        Component c;
        c.id = i;
        c.name = "C" + std::to_string(i);
        for (int d = 0; d < h; ++d) c.requirements.push_back(pick(1, 4));
        inst.spec.components.push_back(std::move(c));
    }
    for (int k = 1; k <= o; ++k) {
        VMOffer off;
        off.offer_id = k;
        for (int d = 0; d < h; ++d) off.capacity.push_back(pick(2, 6));
        off.price = 10 * pick(1, 9);
        inst.catalog.offers.push_back(std::move(off));
    }
    // one offer that definitely fits every component alone
    {
        VMOffer big;
        big.offer_id = o + 1;
        for (int d = 0; d < h; ++d) big.capacity.push_back(8);
        big.price = 100;
        inst.catalog.offers.push_back(std::move(big));
    }

    std::vector<std::pair<int, int>> conflicted, colocated;
    auto seen = [](const std::vector<std::pair<int, int>>& v, int i, int j) {
        for (auto [a, b] : v)
            if (a == i && b == j) return true;
        return false;
    };
    int ncons = pick(0, 3);
    for (int c = 0; c < ncons && n >= 2; ++c) {
        int i = pick(1, n), j = pick(1, n);
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        switch (rng() % 7) {
            case 0:
                if (!seen(colocated, i, j)) {
                    inst.spec.constraints.push_back(Conflict{i, j});
                    conflicted.emplace_back(i, j);
                }
                break;
            case 1:
                inst.spec.constraints.push_back(RequireProvide{i, j, pick(1, 2), pick(1, 2)});
                break;
            case 2:
                inst.spec.constraints.push_back(ExactRatio{i, j, pick(1, 2)});
                break;
            case 3:
                inst.spec.constraints.push_back(
                    BoundInstances{{i}, rng() % 2 ? BoundOp::Le : BoundOp::Ge, pick(1, 2)});
                break;
            case 4:
                inst.spec.constraints.push_back(
                    ConditionalBound{i, {j}, BoundOp::Ge, pick(1, 2)});
                break;
            case 5:
                if (n >= 3 && rng() % 2) inst.spec.constraints.push_back(ExclusiveDeploy{{i, j}});
                break;
            default:
                if (!seen(conflicted, i, j)) {
                    inst.spec.constraints.push_back(Colocate{i, j});
                    colocated.emplace_back(i, j);
                }
                break;
        }
    }
    if (n >= 2 && rng() % 4 == 0) {
        // a full-deploy component with no conflicts keeps validation happy
        inst.spec.constraints.push_back(FullDeploy{1});
    }
    return inst;
}

}  // namespace testgen

#endif
