#include "deployopt/preprocess.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace deployopt {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

MergeResult merge_colocated(const ValidatedSpec& vspec, const OfferCatalog& catalog) {
    const ApplicationSpec& spec = vspec.spec;
    const std::size_t n = spec.components.size();

    UnionFind uf(n);
    for (const auto& sc : spec.constraints)
        if (const auto* c = std::get_if<Colocate>(&sc))
            uf.unite(vspec.index_of(c->i), vspec.index_of(c->j));

    // group members by root, representative id = smallest member id
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);

    MergeResult out;
    for (auto& [root, members] : by_root) {
        std::sort(members.begin(), members.end());
        int rep = spec.components[members.front()].id;
        std::vector<int> ids;
        for (std::size_t m : members) {
            out.id_map[spec.components[m].id] = rep;
            ids.push_back(spec.components[m].id);
        }
        if (members.size() > 1) out.groups.emplace_back(rep, ids);
    }

    auto rep_of = [&](int id) { return out.id_map.at(id); };

    ApplicationSpec merged;
    merged.name = spec.name;
    merged.dimensions = spec.dimensions;
    for (const auto& [root, members] : by_root) {
        Component hyper;
        hyper.id = rep_of(spec.components[members.front()].id);
        hyper.requirements.assign(spec.dimensions.size(), 0);
        for (std::size_t m : members) {
            const Component& c = spec.components[m];
            if (!hyper.name.empty()) hyper.name += "+";
            hyper.name += c.name;
            for (std::size_t h = 0; h < c.requirements.size(); ++h)
                hyper.requirements[h] += c.requirements[h];
        }
        merged.components.push_back(std::move(hyper));
    }

    std::set<std::pair<int, int>> conflict_seen;
    std::set<int> full_deploy_seen;
    for (const auto& sc : spec.constraints) {
        if (const auto* c = std::get_if<Colocate>(&sc)) {
            (void)c;  // absorbed into the hyper-component
        } else if (const auto* c = std::get_if<Conflict>(&sc)) {
            int a = rep_of(c->i), b = rep_of(c->j);
            if (a == b)
                throw PreprocessError(
                    "ColocatedConflict",
                    "components " + std::to_string(c->i) + " and " + std::to_string(c->j) +
                        " are co-located but also in conflict");
            auto key = std::minmax(a, b);
            if (conflict_seen.insert(key).second)
                merged.constraints.push_back(Conflict{key.first, key.second});
        } else if (const auto* c = std::get_if<ExclusiveDeploy>(&sc)) {
            std::vector<int> mapped;
            for (int id : c->components) {
                int r = rep_of(id);
                if (std::find(mapped.begin(), mapped.end(), r) == mapped.end())
                    mapped.push_back(r);
            }
            // a set that collapses to one member just says "deploy it", which
            // basic allocation enforces anyway
            if (mapped.size() >= 2) merged.constraints.push_back(ExclusiveDeploy{mapped});
        } else if (const auto* c = std::get_if<RequireProvide>(&sc)) {
            int a = rep_of(c->i), b = rep_of(c->j);
            if (a == b) {
                if (c->n > c->m)
                    throw PreprocessError("ColocatedConflict",
                                          "co-location makes require-provide between " +
                                              std::to_string(c->i) + " and " +
                                              std::to_string(c->j) + " unsatisfiable");
                continue;  // n*x <= m*x holds for every count
            }
            merged.constraints.push_back(RequireProvide{a, b, c->n, c->m});
        } else if (const auto* c = std::get_if<ExactRatio>(&sc)) {
            int a = rep_of(c->i), b = rep_of(c->j);
            if (a == b) {
                // 0 <= n*x - x < n needs x = 0 unless n = 1... keep it literal:
                // with n = 1 the constraint is x = x, otherwise only x = 0
                // satisfies it and basic allocation forbids that
                if (c->n > 1)
                    throw PreprocessError("ColocatedConflict",
                                          "co-location makes the exact ratio between " +
                                              std::to_string(c->i) + " and " +
                                              std::to_string(c->j) + " unsatisfiable");
                continue;
            }
            merged.constraints.push_back(ExactRatio{a, b, c->n});
        } else if (const auto* c = std::get_if<FullDeploy>(&sc)) {
            int r = rep_of(c->i);
            if (full_deploy_seen.insert(r).second)
                merged.constraints.push_back(FullDeploy{r});
        } else if (const auto* c = std::get_if<BoundInstances>(&sc)) {
            BoundInstances mapped = *c;
            for (int& id : mapped.components) id = rep_of(id);
            merged.constraints.push_back(std::move(mapped));
        } else if (const auto* c = std::get_if<ConditionalBound>(&sc)) {
            ConditionalBound mapped = *c;
            mapped.guard = rep_of(mapped.guard);
            for (int& id : mapped.components) id = rep_of(id);
            merged.constraints.push_back(std::move(mapped));
        }
    }

    out.merged = validate_spec(merged, catalog);
    return out;
}

DeploymentPlan expand_plan(const MergeResult& merge, const ValidatedSpec& original,
                           const DeploymentPlan& merged_plan) {
    DeploymentPlan out;
    out.types = merged_plan.types;
    out.occupancy = merged_plan.occupancy;
    out.total_price = merged_plan.total_price;
    out.assignment.reserve(original.spec.components.size());
    for (const auto& c : original.spec.components) {
        int rep = merge.id_map.at(c.id);
        out.assignment.push_back(merged_plan.assignment[merge.merged.index_of(rep)]);
    }
    return out;
}

}  // namespace deployopt
