#include "deployopt/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace deployopt {

const VMOffer& OfferCatalog::by_id(int offer_id) const {
    for (const auto& o : offers)
        if (o.offer_id == offer_id) return o;
    throw std::out_of_range("unknown offer id " + std::to_string(offer_id));
}

const Component& ApplicationSpec::by_id(int id) const {
    for (const auto& c : components)
        if (c.id == id) return c;
    throw std::out_of_range("unknown component id " + std::to_string(id));
}

std::optional<std::size_t> ApplicationSpec::index_of(int id) const {
    for (std::size_t i = 0; i < components.size(); ++i)
        if (components[i].id == id) return i;
    return std::nullopt;
}

std::int64_t DeploymentPlan::instances_deployed() const {
    std::int64_t n = 0;
    for (const auto& row : assignment)
        for (auto cell : row) n += cell;
    return n;
}

std::int64_t DeploymentPlan::machines_occupied() const {
    std::int64_t n = 0;
    for (auto v : occupancy) n += v;
    return n;
}

bool ValidatedSpec::in_exclusive_set(int id) const {
    for (const auto& c : spec.constraints) {
        if (const auto* ex = std::get_if<ExclusiveDeploy>(&c)) {
            if (std::find(ex->components.begin(), ex->components.end(), id) !=
                ex->components.end())
                return true;
        }
    }
    return false;
}

namespace {

struct Pair {
    int a, b;
    bool operator<(const Pair& o) const {
        return std::tie(a, b) < std::tie(o.a, o.b);
    }
};

Pair norm_pair(int i, int j) { return i < j ? Pair{i, j} : Pair{j, i}; }

std::string fmt_ids(const std::vector<int>& ids) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
    os << "}";
    return os.str();
}

}  // namespace

std::vector<Violation> collect_violations(const ApplicationSpec& spec,
                                          const OfferCatalog& catalog) {
    std::vector<Violation> out;
    auto add = [&](std::string code, std::string msg) {
        out.push_back({std::move(code), std::move(msg)});
    };

    const std::size_t H = spec.dimensions.size();
    if (spec.components.empty()) add("EmptySpec", "spec has no components");
    if (H == 0) add("NoDimensions", "spec declares no hardware dimensions");
    if (catalog.dimensions != spec.dimensions)
        add("DimensionMismatch", "catalog dimension list differs from spec");

    std::set<int> ids;
    for (const auto& c : spec.components) {
        if (c.id <= 0) add("BadComponentId", "component id must be positive: " + c.name);
        if (!ids.insert(c.id).second)
            add("DuplicateComponentId", "duplicate component id " + std::to_string(c.id));
        if (c.requirements.size() != H)
            add("DimensionMismatch",
                "component " + c.name + " has " + std::to_string(c.requirements.size()) +
                    " requirement entries, expected " + std::to_string(H));
        bool any_pos = false;
        for (std::size_t h = 0; h < c.requirements.size(); ++h) {
            if (c.requirements[h] < 0)
                add("NegativeRequirement", "component " + c.name + " dimension " +
                                               spec.dimensions[h] + " is negative");
            if (c.requirements[h] > 0) any_pos = true;
        }
        if (!any_pos && !c.requirements.empty())
            add("EmptyRequirement", "component " + c.name + " requires no resources");
    }

    std::set<int> offer_ids;
    for (const auto& o : catalog.offers) {
        if (o.offer_id <= 0)
            add("BadOfferId", "offer id must be positive (0 means unused)");
        if (!offer_ids.insert(o.offer_id).second)
            add("DuplicateOfferId", "duplicate offer id " + std::to_string(o.offer_id));
        if (o.capacity.size() != H)
            add("DimensionMismatch", "offer " + std::to_string(o.offer_id) +
                                         " capacity entry count mismatch");
        for (std::size_t h = 0; h < o.capacity.size(); ++h)
            if (o.capacity[h] <= 0)
                add("NonPositiveCapacity", "offer " + std::to_string(o.offer_id) +
                                               " has non-positive " + spec.dimensions[h]);
        if (o.price <= 0)
            add("NonPositivePrice", "offer " + std::to_string(o.offer_id) + " price <= 0");
    }
    if (catalog.offers.empty()) add("EmptyCatalog", "catalog has no offers");

    auto known = [&](int id) { return ids.count(id) != 0; };
    auto require_known = [&](int id, const char* where) {
        if (!known(id))
            add("DanglingComponentRef", std::string(where) + " references unknown component " +
                                            std::to_string(id));
    };

    std::set<Pair> conflict_pairs, colocate_pairs;
    std::set<int> full_deploy;
    for (const auto& sc : spec.constraints) {
        if (const auto* c = std::get_if<Conflict>(&sc)) {
            require_known(c->i, "Conflict");
            require_known(c->j, "Conflict");
            if (c->i == c->j) add("SelfConflict", "component conflicts with itself");
            else conflict_pairs.insert(norm_pair(c->i, c->j));
        } else if (const auto* c = std::get_if<Colocate>(&sc)) {
            require_known(c->i, "Colocate");
            require_known(c->j, "Colocate");
            if (c->i == c->j) add("SelfColocate", "component co-located with itself");
            else colocate_pairs.insert(norm_pair(c->i, c->j));
        } else if (const auto* c = std::get_if<ExclusiveDeploy>(&sc)) {
            if (c->components.size() < 2)
                add("DegenerateExclusive", "exclusive set needs at least 2 members");
            for (int id : c->components) require_known(id, "ExclusiveDeploy");
        } else if (const auto* c = std::get_if<RequireProvide>(&sc)) {
            require_known(c->i, "RequireProvide");
            require_known(c->j, "RequireProvide");
            if (c->i == c->j) add("SelfRequire", "require-provide on a single component");
            if (c->n < 1 || c->m < 1)
                add("BadRatio", "require-provide coefficients must be >= 1");
        } else if (const auto* c = std::get_if<ExactRatio>(&sc)) {
            require_known(c->i, "ExactRatio");
            require_known(c->j, "ExactRatio");
            if (c->i == c->j) add("SelfRequire", "exact ratio on a single component");
            if (c->n < 1) add("BadRatio", "exact ratio n must be >= 1");
        } else if (const auto* c = std::get_if<FullDeploy>(&sc)) {
            require_known(c->i, "FullDeploy");
            full_deploy.insert(c->i);
        } else if (const auto* c = std::get_if<BoundInstances>(&sc)) {
            if (c->components.empty())
                add("EmptyBoundSet", "bounded-instances constraint over empty set");
            for (int id : c->components) require_known(id, "BoundInstances");
            if (c->n < 0) add("BadBound", "instance bound must be >= 0");
        } else if (const auto* c = std::get_if<ConditionalBound>(&sc)) {
            require_known(c->guard, "ConditionalBound");
            for (int id : c->components) require_known(id, "ConditionalBound");
            if (c->n < 0) add("BadBound", "instance bound must be >= 0");
        }
    }

    for (const auto& p : conflict_pairs)
        if (colocate_pairs.count(p))
            add("ConflictColocateClash", "components " + std::to_string(p.a) + " and " +
                                             std::to_string(p.b) +
                                             " are both in conflict and co-located");

    // full deployment of two conflicting components is disallowed
    for (int i : full_deploy)
        for (int j : full_deploy)
            if (i < j && conflict_pairs.count({i, j}))
                add("ConflictingFullDeploy",
                    "components " + std::to_string(i) + " and " + std::to_string(j) +
                        " are both full-deployment but in conflict");

    // every component must fit alone into at least one offer
    for (const auto& c : spec.components) {
        if (c.requirements.size() != H) continue;
        bool fits_somewhere = false;
        std::size_t worst_dim = 0;
        for (const auto& o : catalog.offers) {
            if (o.capacity.size() != H) continue;
            bool fits = true;
            for (std::size_t h = 0; h < H; ++h) {
                if (c.requirements[h] > o.capacity[h]) {
                    fits = false;
                    worst_dim = h;
                }
            }
            if (fits) {
                fits_somewhere = true;
                break;
            }
        }
        if (!fits_somewhere && !catalog.offers.empty() && H > 0)
            add("UnsatisfiableComponent",
                "component " + c.name + " exceeds every offer (e.g. dimension " +
                    spec.dimensions[worst_dim] + ")");
    }

    return out;
}

ValidatedSpec validate_spec(const ApplicationSpec& spec, const OfferCatalog& catalog) {
    auto violations = collect_violations(spec, catalog);
    if (!violations.empty())
        throw ValidationError(violations.front().code, violations.front().message);
    ValidatedSpec v{spec, {}};
    std::sort(v.spec.components.begin(), v.spec.components.end(),
              [](const Component& a, const Component& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < v.spec.components.size(); ++i)
        v.id_to_index[v.spec.components[i].id] = i;
    return v;
}

const FamilyReport* ValidationReport::find(const std::string& family) const {
    for (const auto& f : families)
        if (f.family == family) return &f;
    return nullptr;
}

namespace {

// H(u) from the exclusive/full-deployment constraints: 1 iff u > 0.
inline std::int64_t step(std::int64_t u) { return u > 0 ? 1 : 0; }

}  // namespace

ValidationReport check_plan(const ValidatedSpec& vspec, const OfferCatalog& catalog,
                            const DeploymentPlan& plan) {
    const ApplicationSpec& spec = vspec.spec;
    const std::size_t N = spec.components.size();
    const std::size_t M = plan.types.size();
    const std::size_t H = spec.dimensions.size();

    if (plan.assignment.size() != N || plan.occupancy.size() != M)
        throw ValidationError("DimensionMismatch", "plan dimensions do not match spec");
    for (const auto& row : plan.assignment)
        if (row.size() != M)
            throw ValidationError("DimensionMismatch", "assignment row length != M");

    ValidationReport report;
    report.families.reserve(16);  // family() hands out references into this vector
    auto family = [&](const std::string& name) -> FamilyReport& {
        report.families.push_back({name, true, {}});
        return report.families.back();
    };
    auto fail = [&](FamilyReport& f, std::string what) {
        f.passed = false;
        report.passed = false;
        f.offenses.push_back(std::move(what));
    };

    auto row_sum = [&](std::size_t i) {
        std::int64_t s = 0;
        for (std::size_t k = 0; k < M; ++k) s += plan.assignment[i][k];
        return s;
    };
    auto col_sum = [&](std::size_t k) {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < N; ++i) s += plan.assignment[i][k];
        return s;
    };
    auto idx = [&](int id) { return vspec.index_of(id); };

    {
        auto& f = family("BasicAllocation");
        for (std::size_t i = 0; i < N; ++i) {
            int id = spec.components[i].id;
            if (!vspec.in_exclusive_set(id) && row_sum(i) < 1)
                fail(f, "component " + spec.components[i].name + " is never deployed");
        }
    }
    {
        auto& f = family("Occupancy");
        for (std::size_t k = 0; k < M; ++k) {
            bool used = col_sum(k) >= 1;
            if (used && !plan.occupancy[k])
                fail(f, "machine " + std::to_string(k + 1) + " hosts components but v=0");
            if (!used && plan.occupancy[k])
                fail(f, "machine " + std::to_string(k + 1) + " is empty but v=1");
        }
    }
    {
        auto& f = family("Link");
        for (std::size_t k = 0; k < M; ++k) {
            if ((plan.types[k] == 0) != (plan.occupancy[k] == 0))
                fail(f, "machine " + std::to_string(k + 1) + " type/occupancy disagree");
            if (plan.types[k] != 0) {
                bool known = false;
                for (const auto& o : catalog.offers)
                    if (o.offer_id == plan.types[k]) known = true;
                if (!known)
                    fail(f, "machine " + std::to_string(k + 1) + " uses unknown offer " +
                                std::to_string(plan.types[k]));
            }
        }
    }
    {
        auto& f = family("Capacity");
        for (std::size_t k = 0; k < M; ++k) {
            if (plan.types[k] == 0) continue;
            const VMOffer* offer = nullptr;
            for (const auto& o : catalog.offers)
                if (o.offer_id == plan.types[k]) offer = &o;
            if (!offer) continue;  // already reported under Link
            for (std::size_t h = 0; h < H; ++h) {
                std::int64_t load = 0;
                for (std::size_t i = 0; i < N; ++i)
                    if (plan.assignment[i][k]) load += spec.components[i].requirements[h];
                if (load > offer->capacity[h])
                    fail(f, "machine " + std::to_string(k + 1) + " over capacity on " +
                                spec.dimensions[h]);
            }
        }
    }

    auto& conflict_f = family("Conflict");
    auto& colocate_f = family("Colocation");
    auto& exclusive_f = family("ExclusiveDeployment");
    auto& reqprov_f = family("RequireProvide");
    auto& ratio_f = family("ExactRatio");
    auto& fulldep_f = family("FullDeployment");
    auto& bound_f = family("BoundInstances");
    auto& cond_f = family("ConditionalBound");

    // conflict adjacency, reused by the full-deployment check
    std::vector<std::vector<std::uint8_t>> conflicts(N, std::vector<std::uint8_t>(N, 0));
    for (const auto& sc : spec.constraints)
        if (const auto* c = std::get_if<Conflict>(&sc)) {
            std::size_t a = idx(c->i), b = idx(c->j);
            conflicts[a][b] = conflicts[b][a] = 1;
        }

    std::int64_t total_v = 0;
    for (std::size_t k = 0; k < M; ++k) total_v += plan.occupancy[k];

    for (const auto& sc : spec.constraints) {
        if (const auto* c = std::get_if<Conflict>(&sc)) {
            std::size_t a = idx(c->i), b = idx(c->j);
            for (std::size_t k = 0; k < M; ++k)
                if (plan.assignment[a][k] + plan.assignment[b][k] > 1)
                    fail(conflict_f, "components " + std::to_string(c->i) + "," +
                                         std::to_string(c->j) + " share machine " +
                                         std::to_string(k + 1));
        } else if (const auto* c = std::get_if<Colocate>(&sc)) {
            std::size_t a = idx(c->i), b = idx(c->j);
            for (std::size_t k = 0; k < M; ++k)
                if (plan.assignment[a][k] != plan.assignment[b][k])
                    fail(colocate_f, "components " + std::to_string(c->i) + "," +
                                         std::to_string(c->j) + " differ on machine " +
                                         std::to_string(k + 1));
        } else if (const auto* c = std::get_if<ExclusiveDeploy>(&sc)) {
            std::int64_t deployed = 0;
            for (int id : c->components) deployed += step(row_sum(idx(id)));
            if (deployed != 1)
                fail(exclusive_f, "exclusive set " + fmt_ids(c->components) + " has " +
                                      std::to_string(deployed) + " deployed members");
        } else if (const auto* c = std::get_if<RequireProvide>(&sc)) {
            if (c->n * row_sum(idx(c->i)) > c->m * row_sum(idx(c->j)))
                fail(reqprov_f, "require-provide " + std::to_string(c->i) + "->" +
                                    std::to_string(c->j) + " violated");
        } else if (const auto* c = std::get_if<ExactRatio>(&sc)) {
            std::int64_t d = c->n * row_sum(idx(c->j)) - row_sum(idx(c->i));
            if (d < 0 || d >= c->n)
                fail(ratio_f, "exact ratio " + std::to_string(c->i) + ":" +
                                  std::to_string(c->j) + " violated");
        } else if (const auto* c = std::get_if<FullDeploy>(&sc)) {
            std::size_t a = idx(c->i);
            std::int64_t lhs = 0;
            for (std::size_t k = 0; k < M; ++k) {
                std::int64_t conflict_load = 0;
                for (std::size_t j = 0; j < N; ++j)
                    if (conflicts[a][j]) conflict_load += plan.assignment[j][k];
                lhs += plan.assignment[a][k] + step(conflict_load);
            }
            if (lhs != total_v)
                fail(fulldep_f,
                     "component " + std::to_string(c->i) + " not on every eligible machine");
        } else if (const auto* c = std::get_if<BoundInstances>(&sc)) {
            std::int64_t s = 0;
            for (int id : c->components) s += row_sum(idx(id));
            bool ok = c->op == BoundOp::Eq   ? s == c->n
                      : c->op == BoundOp::Le ? s <= c->n
                                             : s >= c->n;
            if (!ok)
                fail(bound_f, "instance bound on " + fmt_ids(c->components) +
                                  " violated (sum=" + std::to_string(s) + ")");
        } else if (const auto* c = std::get_if<ConditionalBound>(&sc)) {
            if (row_sum(idx(c->guard)) < 1) continue;
            std::int64_t s = 0;
            for (int id : c->components) s += row_sum(idx(id));
            bool ok = c->op == BoundOp::Eq   ? s == c->n
                      : c->op == BoundOp::Le ? s <= c->n
                                             : s >= c->n;
            if (!ok)
                fail(cond_f, "conditional bound guarded by " + std::to_string(c->guard) +
                                 " violated (sum=" + std::to_string(s) + ")");
        }
    }

    {
        auto& f = family("Price");
        Money price = 0;
        for (std::size_t k = 0; k < M; ++k) {
            if (plan.types[k] == 0) continue;
            for (const auto& o : catalog.offers)
                if (o.offer_id == plan.types[k]) price += o.price;
        }
        report.recomputed_price = price;
        if (price != plan.total_price)
            fail(f, "stated price " + std::to_string(plan.total_price) +
                        " != recomputed " + std::to_string(price));
    }

    return report;
}

}  // namespace deployopt
