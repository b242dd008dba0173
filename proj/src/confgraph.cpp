#include "deployopt/confgraph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace deployopt {

ConflictGraph ConflictGraph::from_spec(const ValidatedSpec& vspec) {
    ConflictGraph g(vspec.spec.components.size());
    for (const auto& sc : vspec.spec.constraints)
        if (const auto* c = std::get_if<Conflict>(&sc))
            g.add_edge(vspec.index_of(c->i), vspec.index_of(c->j));
    return g;
}

std::size_t ConflictGraph::degree(std::size_t v) const {
    return std::size_t(std::accumulate(adj[v].begin(), adj[v].end(), 0));
}

namespace {

using Clique = std::vector<std::size_t>;

void bron_kerbosch(const ConflictGraph& g, Clique& r, std::vector<std::size_t> p,
                   std::vector<std::size_t> x, std::vector<Clique>& out) {
    if (p.empty() && x.empty()) {
        if (r.size() >= 2) out.push_back(r);
        return;
    }
    // pivot with the most neighbours in p
    std::size_t pivot = 0, best = 0;
    bool have_pivot = false;
    for (std::size_t u : p) {
        std::size_t cnt = 0;
        for (std::size_t w : p) cnt += g.edge(u, w);
        if (!have_pivot || cnt > best) pivot = u, best = cnt, have_pivot = true;
    }
    for (std::size_t u : x) {
        std::size_t cnt = 0;
        for (std::size_t w : p) cnt += g.edge(u, w);
        if (!have_pivot || cnt > best) pivot = u, best = cnt, have_pivot = true;
    }

    std::vector<std::size_t> candidates;
    for (std::size_t v : p)
        if (!g.edge(pivot, v)) candidates.push_back(v);

    for (std::size_t v : candidates) {
        Clique r2 = r;
        r2.push_back(v);
        std::vector<std::size_t> p2, x2;
        for (std::size_t w : p)
            if (g.edge(v, w)) p2.push_back(w);
        for (std::size_t w : x)
            if (g.edge(v, w)) x2.push_back(w);
        bron_kerbosch(g, r2, std::move(p2), std::move(x2), out);
        p.erase(std::find(p.begin(), p.end(), v));
        x.push_back(v);
    }
}

}  // namespace

std::vector<Clique> enumerate_maximal_cliques(const ConflictGraph& g) {
    std::vector<Clique> out;
    Clique r;
    std::vector<std::size_t> p(g.n), x;
    std::iota(p.begin(), p.end(), 0);
    bron_kerbosch(g, r, std::move(p), std::move(x), out);
    for (auto& c : out) std::sort(c.begin(), c.end());
    std::sort(out.begin(), out.end());
    return out;
}

Clique select_clique(const std::vector<Clique>& cliques,
                     const std::vector<std::int64_t>& nu) {
    if (cliques.empty()) return {};
    const Clique* best = nullptr;
    std::int64_t best_size = -1;
    for (const auto& c : cliques) {
        std::int64_t size = 0;
        for (std::size_t v : c) size += nu[v];
        if (size > best_size || (size == best_size && c < *best)) {
            best = &c;
            best_size = size;
        }
    }
    return *best;
}

FvMode choose_fv_mode(const ValidatedSpec& vspec, const Clique& clique) {
    auto in_clique = [&](int id) {
        std::size_t i = vspec.index_of(id);
        return std::find(clique.begin(), clique.end(), i) != clique.end();
    };
    for (const auto& sc : vspec.spec.constraints) {
        if (const auto* c = std::get_if<BoundInstances>(&sc)) {
            for (int id : c->components)
                if (in_clique(id)) return FvMode::Conservative;
        } else if (const auto* c = std::get_if<ConditionalBound>(&sc)) {
            for (int id : c->components)
                if (in_clique(id)) return FvMode::Conservative;
        }
    }
    return FvMode::Full;
}

int FixedCells::value_at(std::size_t i, std::size_t k) const {
    for (const auto& [a, b] : ones)
        if (a == i && b == k) return 1;
    for (const auto& [a, b] : zeros)
        if (a == i && b == k) return 0;
    return -1;
}

FixedCells fix_assignments(const Clique& clique, const std::vector<std::int64_t>& nu,
                           std::size_t machine_count, FvMode mode,
                           const ConflictGraph& g) {
    FixedCells fc;
    if (clique.empty()) return fc;

    std::vector<std::size_t> width(clique.size());
    std::size_t total = 0;
    for (std::size_t q = 0; q < clique.size(); ++q) {
        // a zero estimate means deployment is not certain, so nothing is
        // pinned for that member in either mode
        std::int64_t v = nu[clique[q]];
        width[q] = v <= 0 ? 0 : mode == FvMode::Conservative ? 1 : std::size_t(v);
        total += width[q];
    }
    if (total > machine_count)
        throw CliqueError("InsufficientMachines",
                          "pinned block needs " + std::to_string(total) +
                              " machines but only " + std::to_string(machine_count) +
                              " are available");
    fc.machines_used = total;

    std::set<std::pair<std::size_t, std::size_t>> zero_set;
    std::size_t offset = 0;
    for (std::size_t q = 0; q < clique.size(); ++q) {
        for (std::size_t k = offset; k < offset + width[q]; ++k) {
            fc.ones.emplace_back(clique[q], k);
            // zero the other clique members here (they conflict with q)
            for (std::size_t r = 0; r < clique.size(); ++r)
                if (r != q) zero_set.emplace(clique[r], k);
            // and every conflicting component outside the clique
            for (std::size_t j = 0; j < g.n; ++j)
                if (g.edge(clique[q], j) &&
                    std::find(clique.begin(), clique.end(), j) == clique.end())
                    zero_set.emplace(j, k);
        }
        offset += width[q];
    }
    fc.zeros.assign(zero_set.begin(), zero_set.end());
    return fc;
}

}  // namespace deployopt
