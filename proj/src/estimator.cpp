#include "deployopt/estimator.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace deployopt {

namespace {

constexpr std::int64_t kDefaultCap = 64;

struct Box {
    std::vector<std::int64_t> lo, hi;
};

// True if some completion of the partial vector (components < assigned fixed,
// the rest anywhere in [lo, hi]) can still satisfy every surrogate constraint.
// Sound, not complete: may return true for dead branches, never false for
// live ones.
bool partial_feasible(const ValidatedSpec& vspec, const std::vector<std::int64_t>& nu,
                      std::size_t assigned, const Box& box) {
    auto lo = [&](std::size_t i) { return i < assigned ? nu[i] : box.lo[i]; };
    auto hi = [&](std::size_t i) { return i < assigned ? nu[i] : box.hi[i]; };
    auto idx = [&](int id) { return vspec.index_of(id); };

    for (const auto& sc : vspec.spec.constraints) {
        if (const auto* c = std::get_if<RequireProvide>(&sc)) {
            if (c->n * lo(idx(c->i)) > c->m * hi(idx(c->j))) return false;
        } else if (const auto* c = std::get_if<ExactRatio>(&sc)) {
            std::size_t a = idx(c->i), b = idx(c->j);
            if (c->n * hi(b) - lo(a) < 0) return false;
            if (c->n * lo(b) - hi(a) > c->n - 1) return false;
        } else if (const auto* c = std::get_if<BoundInstances>(&sc)) {
            std::int64_t smin = 0, smax = 0;
            for (int id : c->components) {
                smin += lo(idx(id));
                smax += hi(idx(id));
            }
            if (c->op == BoundOp::Eq && (smin > c->n || smax < c->n)) return false;
            if (c->op == BoundOp::Le && smin > c->n) return false;
            if (c->op == BoundOp::Ge && smax < c->n) return false;
        } else if (const auto* c = std::get_if<ConditionalBound>(&sc)) {
            if (lo(idx(c->guard)) < 1) continue;  // guard not yet certain
            std::int64_t smin = 0, smax = 0;
            for (int id : c->components) {
                smin += lo(idx(id));
                smax += hi(idx(id));
            }
            if (c->op == BoundOp::Eq && (smin > c->n || smax < c->n)) return false;
            if (c->op == BoundOp::Le && smin > c->n) return false;
            if (c->op == BoundOp::Ge && smax < c->n) return false;
        }
    }
    return true;
}

bool check_bound(BoundOp op, std::int64_t sum, std::int64_t n) {
    switch (op) {
        case BoundOp::Eq: return sum == n;
        case BoundOp::Le: return sum <= n;
        default: return sum >= n;
    }
}

struct Search {
    const ValidatedSpec& vspec;
    Box box;
    std::vector<std::int64_t> suffix_lo;  // sum of lo over components >= i
    std::vector<std::int64_t> nu;
    std::vector<std::int64_t> best;
    std::int64_t best_total = std::numeric_limits<std::int64_t>::max();

    explicit Search(const ValidatedSpec& s, Box b) : vspec(s), box(std::move(b)) {
        const std::size_t n = box.lo.size();
        nu.assign(n, 0);
        suffix_lo.assign(n + 1, 0);
        for (std::size_t i = n; i-- > 0;) suffix_lo[i] = suffix_lo[i + 1] + box.lo[i];
    }

    void dfs(std::size_t depth, std::int64_t partial) {
        if (partial + suffix_lo[depth] >= best_total &&
            best_total != std::numeric_limits<std::int64_t>::max())
            return;
        if (depth == nu.size()) {
            if (!surrogate_feasible(vspec, nu)) return;
            if (partial < best_total) {
                best_total = partial;
                best = nu;
            }
            return;
        }
        for (std::int64_t v = box.lo[depth]; v <= box.hi[depth]; ++v) {
            nu[depth] = v;
            if (!partial_feasible(vspec, nu, depth + 1, box)) continue;
            dfs(depth + 1, partial + v);
        }
        nu[depth] = 0;
    }
};

// One deployment choice per exclusive set; overlapping sets must agree.
// Returns false if the combination is contradictory.
bool apply_branch(const ValidatedSpec& vspec,
                  const std::vector<const ExclusiveDeploy*>& sets,
                  const std::vector<std::size_t>& choice, Box& box) {
    for (std::size_t s = 0; s < sets.size(); ++s) {
        for (std::size_t m = 0; m < sets[s]->components.size(); ++m) {
            std::size_t i = vspec.index_of(sets[s]->components[m]);
            if (m == choice[s]) {
                box.lo[i] = std::max<std::int64_t>(box.lo[i], 1);
            } else {
                box.hi[i] = 0;
            }
            if (box.lo[i] > box.hi[i]) return false;
        }
    }
    return true;
}

Box base_box(const ValidatedSpec& vspec) {
    const std::size_t n = vspec.spec.components.size();
    Box box;
    box.lo.assign(n, 1);
    box.hi.assign(n, kDefaultCap);
    for (std::size_t i = 0; i < n; ++i)
        if (vspec.in_exclusive_set(vspec.spec.components[i].id)) box.lo[i] = 0;
    // tighten from explicit instance bounds
    for (const auto& sc : vspec.spec.constraints) {
        if (const auto* c = std::get_if<BoundInstances>(&sc)) {
            if (c->op == BoundOp::Ge) continue;
            for (int id : c->components) {
                std::size_t i = vspec.index_of(id);
                box.hi[i] = std::min(box.hi[i], c->n);
            }
            if (c->op == BoundOp::Eq && c->components.size() == 1) {
                std::size_t i = vspec.index_of(c->components.front());
                box.lo[i] = std::max(box.lo[i], c->n);
            }
        }
    }
    return box;
}

}  // namespace

bool surrogate_feasible(const ValidatedSpec& vspec, const std::vector<std::int64_t>& nu) {
    auto idx = [&](int id) { return vspec.index_of(id); };
    for (std::size_t i = 0; i < nu.size(); ++i) {
        if (nu[i] < 0) return false;
        if (nu[i] == 0 && !vspec.in_exclusive_set(vspec.spec.components[i].id)) return false;
    }
    for (const auto& sc : vspec.spec.constraints) {
        if (const auto* c = std::get_if<RequireProvide>(&sc)) {
            if (c->n * nu[idx(c->i)] > c->m * nu[idx(c->j)]) return false;
        } else if (const auto* c = std::get_if<ExactRatio>(&sc)) {
            std::int64_t d = c->n * nu[idx(c->j)] - nu[idx(c->i)];
            if (d < 0 || d >= c->n) return false;
        } else if (const auto* c = std::get_if<BoundInstances>(&sc)) {
            std::int64_t s = 0;
            for (int id : c->components) s += nu[idx(id)];
            if (!check_bound(c->op, s, c->n)) return false;
        } else if (const auto* c = std::get_if<ConditionalBound>(&sc)) {
            if (nu[idx(c->guard)] < 1) continue;
            std::int64_t s = 0;
            for (int id : c->components) s += nu[idx(id)];
            if (!check_bound(c->op, s, c->n)) return false;
        } else if (const auto* c = std::get_if<ExclusiveDeploy>(&sc)) {
            int deployed = 0;
            for (int id : c->components) deployed += nu[idx(id)] > 0 ? 1 : 0;
            if (deployed != 1) return false;
        }
    }
    return true;
}

InstanceEstimate estimate_instances(const ValidatedSpec& vspec) {
    std::vector<const ExclusiveDeploy*> sets;
    for (const auto& sc : vspec.spec.constraints)
        if (const auto* c = std::get_if<ExclusiveDeploy>(&sc)) sets.push_back(c);

    std::vector<std::int64_t> best;
    std::int64_t best_total = std::numeric_limits<std::int64_t>::max();

    std::vector<std::size_t> choice(sets.size(), 0);
    const Box base = base_box(vspec);
    while (true) {
        Box box = base;
        if (apply_branch(vspec, sets, choice, box)) {
            bool sane = true;
            for (std::size_t i = 0; i < box.lo.size(); ++i)
                if (box.lo[i] > box.hi[i]) sane = false;
            if (sane) {
                // each branch searched independently so equal-total optima in
                // later branches still reach the lexicographic tie-break
                Search search(vspec, box);
                search.dfs(0, 0);
                if (!search.best.empty() &&
                    (search.best_total < best_total ||
                     (search.best_total == best_total && search.best < best))) {
                    best_total = search.best_total;
                    best = search.best;
                }
            }
        }
        // next branch combination
        std::size_t s = 0;
        while (s < sets.size()) {
            if (++choice[s] < sets[s]->components.size()) break;
            choice[s++] = 0;
        }
        if (s == sets.size()) break;
    }

    if (best.empty())
        throw EstimatorError("InfeasibleInstanceCounts",
                             "instance-count constraints are contradictory for spec '" +
                                 vspec.spec.name + "'");
    return {best, std::accumulate(best.begin(), best.end(), std::int64_t(0))};
}

InstanceEstimate solve_surrogate_bruteforce(const ValidatedSpec& vspec, std::int64_t bound) {
    if (bound < 1) throw EstimatorError("BadBound", "bound must be >= 1");
    const std::size_t n = vspec.spec.components.size();
    double space = 1;
    for (std::size_t i = 0; i < n; ++i) space *= double(bound + 1);
    if (space > 1e8)
        throw EstimatorError("SpaceTooLarge", "enumeration space exceeds 1e8 points");

    std::vector<std::int64_t> nu(n, 0), best;
    std::int64_t best_total = std::numeric_limits<std::int64_t>::max();
    while (true) {
        if (surrogate_feasible(vspec, nu)) {
            std::int64_t total = std::accumulate(nu.begin(), nu.end(), std::int64_t(0));
            if (total < best_total) {  // odometer runs in lex order
                best_total = total;
                best = nu;
            }
        }
        std::size_t i = n;
        while (i-- > 0) {
            if (++nu[i] <= bound) break;
            nu[i] = 0;
            if (i == 0) {
                if (best.empty())
                    throw EstimatorError("NoFeasiblePointWithinBound",
                                         "no feasible instance vector within bound " +
                                             std::to_string(bound));
                return {best, best_total};
            }
        }
        if (std::all_of(nu.begin(), nu.end(), [](std::int64_t v) { return v == 0; })) break;
    }
    if (best.empty())
        throw EstimatorError("NoFeasiblePointWithinBound",
                             "no feasible instance vector within bound " +
                                 std::to_string(bound));
    return {best, best_total};
}

}  // namespace deployopt
