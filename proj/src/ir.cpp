#include "deployopt/ir.hpp"

#include <algorithm>
#include <sstream>

namespace deployopt {

const char* family_name(Family f) {
    switch (f) {
        case Family::BasicAllocation: return "BasicAllocation";
        case Family::Occupancy: return "Occupancy";
        case Family::Capacity: return "Capacity";
        case Family::Link: return "Link";
        case Family::UnusedMachine: return "UnusedMachine";
        case Family::Conflict: return "Conflict";
        case Family::Colocation: return "Colocation";
        case Family::ExclusiveDeployment: return "ExclusiveDeployment";
        case Family::RequireProvide: return "RequireProvide";
        case Family::ExactRatio: return "ExactRatio";
        case Family::FullDeployment: return "FullDeployment";
        case Family::BoundInstances: return "BoundInstances";
        case Family::ConditionalBound: return "ConditionalBound";
        case Family::FixedCell: return "FixedCell";
        case Family::SymmetryBreaking: return "SymmetryBreaking";
        default: return "IndicatorLink";
    }
}

namespace {

RowOp to_rowop(BoundOp op) {
    switch (op) {
        case BoundOp::Eq: return RowOp::Eq;
        case BoundOp::Le: return RowOp::Le;
        default: return RowOp::Ge;
    }
}

}  // namespace

std::map<Family, std::size_t> ConstraintIR::family_counts() const {
    std::map<Family, std::size_t> out;
    for (const auto& r : rows) out[r.family]++;
    for (const auto& im : implications) out[im.family]++;
    if (!lowered)
        for (const auto& ind : indicators) out[ind.family]++;
    return out;
}

ConstraintIR build_ir(const ValidatedSpec& vspec, const OfferCatalog& catalog,
                      std::size_t machine_count, const FixedCells* fixed) {
    const ApplicationSpec& spec = vspec.spec;
    if (catalog.offers.empty())
        throw IrError("EmptyCatalog", "offer catalog is empty");

    ConstraintIR ir;
    ir.N = spec.components.size();
    ir.M = machine_count;
    ir.O = catalog.offers.size();
    ir.H = spec.dimensions.size();
    const std::size_t N = ir.N, M = ir.M, O = ir.O, H = ir.H;

    std::int64_t p_max = 0;
    ResourceVector f_max(H, 0);
    for (const auto& o : catalog.offers) {
        p_max = std::max(p_max, o.price);
        for (std::size_t h = 0; h < H; ++h) f_max[h] = std::max(f_max[h], o.capacity[h]);
    }

    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < M; ++k)
            ir.vars.push_back({"a_" + std::to_string(i + 1) + "_" + std::to_string(k + 1),
                               0, 1});
    for (std::size_t k = 0; k < M; ++k)
        ir.vars.push_back({"t_" + std::to_string(k + 1), 0, std::int64_t(O)});
    for (std::size_t k = 0; k < M; ++k)
        ir.vars.push_back({"v_" + std::to_string(k + 1), 0, 1});
    for (std::size_t k = 0; k < M; ++k)
        ir.vars.push_back({"p_" + std::to_string(k + 1), 0, p_max});
    for (std::size_t k = 0; k < M; ++k)
        for (std::size_t h = 0; h < H; ++h)
            ir.vars.push_back({"r_" + std::to_string(k + 1) + "_" + std::to_string(h + 1),
                               0, f_max[h]});

    auto new_aux = [&](const std::string& name) {
        ir.vars.push_back({name, 0, 1});
        return int(ir.vars.size() - 1);
    };
    auto row_sum_terms = [&](std::size_t i) {
        std::vector<Term> ts;
        for (std::size_t k = 0; k < M; ++k) ts.push_back({ir.a_var(i, k), 1});
        return ts;
    };

    ir.meta.components = spec.components;
    ir.meta.offers = catalog.offers;

    for (std::size_t k = 0; k < M; ++k) ir.objective.push_back(ir.p_var(k));

    // every component runs somewhere, unless an exclusive set may drop it
    for (std::size_t i = 0; i < N; ++i) {
        if (vspec.in_exclusive_set(spec.components[i].id)) {
            ir.meta.optional_components.push_back(i);
            continue;
        }
        ir.rows.push_back({row_sum_terms(i), RowOp::Ge, 1, Family::BasicAllocation});
    }

    for (std::size_t k = 0; k < M; ++k) {
        LinRow lo, hi;
        for (std::size_t i = 0; i < N; ++i) {
            lo.terms.push_back({ir.a_var(i, k), 1});
            hi.terms.push_back({ir.a_var(i, k), 1});
        }
        lo.terms.push_back({ir.v_var(k), -1});
        lo.op = RowOp::Ge;
        lo.family = Family::Occupancy;
        hi.terms.push_back({ir.v_var(k), -std::int64_t(N)});
        hi.op = RowOp::Le;
        hi.family = Family::Occupancy;
        ir.rows.push_back(std::move(lo));
        ir.rows.push_back(std::move(hi));
    }

    for (std::size_t k = 0; k < M; ++k)
        for (std::size_t h = 0; h < H; ++h) {
            LinRow row;
            for (std::size_t i = 0; i < N; ++i)
                if (spec.components[i].requirements[h] != 0)
                    row.terms.push_back({ir.a_var(i, k), spec.components[i].requirements[h]});
            row.terms.push_back({ir.r_var(k, h), -1});
            row.op = RowOp::Le;
            row.family = Family::Capacity;
            ir.rows.push_back(std::move(row));
        }

    // choosing offer o for machine k pins its price and capacity
    for (std::size_t k = 0; k < M; ++k)
        for (std::size_t o = 0; o < O; ++o) {
            Implication imp;
            imp.guard = {{{ir.t_var(k), 1}}, RowOp::Eq, std::int64_t(o + 1), Family::Link};
            imp.family = Family::Link;
            imp.then.push_back(
                {{{ir.p_var(k), 1}}, RowOp::Eq, catalog.offers[o].price, Family::Link});
            for (std::size_t h = 0; h < H; ++h)
                imp.then.push_back({{{ir.r_var(k, h), 1}},
                                    RowOp::Eq,
                                    catalog.offers[o].capacity[h],
                                    Family::Link});
            ir.implications.push_back(std::move(imp));
        }

    // unused machines carry no type, price, or capacity
    for (std::size_t k = 0; k < M; ++k) {
        ir.rows.push_back({{{ir.t_var(k), 1}, {ir.v_var(k), -std::int64_t(O)}},
                           RowOp::Le, 0, Family::UnusedMachine});
        ir.rows.push_back({{{ir.t_var(k), 1}, {ir.v_var(k), -1}},
                           RowOp::Ge, 0, Family::UnusedMachine});
        ir.rows.push_back({{{ir.p_var(k), 1}, {ir.v_var(k), -p_max}},
                           RowOp::Le, 0, Family::UnusedMachine});
        for (std::size_t h = 0; h < H; ++h)
            ir.rows.push_back({{{ir.r_var(k, h), 1}, {ir.v_var(k), -f_max[h]}},
                               RowOp::Le, 0, Family::UnusedMachine});
    }

    ConflictGraph graph = ConflictGraph::from_spec(vspec);
    auto idx = [&](int id) { return vspec.index_of(id); };

    for (const auto& sc : spec.constraints)
        if (std::holds_alternative<RequireProvide>(sc) ||
            std::holds_alternative<ExactRatio>(sc) ||
            std::holds_alternative<BoundInstances>(sc) ||
            std::holds_alternative<ConditionalBound>(sc))
            ir.meta.counts.push_back(sc);

    for (const auto& sc : spec.constraints) {
        if (const auto* c = std::get_if<Conflict>(&sc)) {
            std::size_t a = idx(c->i), b = idx(c->j);
            ir.meta.conflicts.emplace_back(a, b);
            for (std::size_t k = 0; k < M; ++k)
                ir.rows.push_back({{{ir.a_var(a, k), 1}, {ir.a_var(b, k), 1}},
                                   RowOp::Le, 1, Family::Conflict});
        } else if (const auto* c = std::get_if<Colocate>(&sc)) {
            std::size_t a = idx(c->i), b = idx(c->j);
            ir.meta.colocates.emplace_back(a, b);
            for (std::size_t k = 0; k < M; ++k)
                ir.rows.push_back({{{ir.a_var(a, k), 1}, {ir.a_var(b, k), -1}},
                                   RowOp::Eq, 0, Family::Colocation});
        } else if (const auto* c = std::get_if<ExclusiveDeploy>(&sc)) {
            LinRow pick;
            for (int id : c->components) {
                std::size_t i = idx(id);
                int aux = new_aux("dep_" + std::to_string(id));
                Indicator ind;
                ind.aux = aux;
                for (std::size_t k = 0; k < M; ++k) ind.vars.push_back(ir.a_var(i, k));
                ind.upper = std::int64_t(M);
                ind.family = Family::ExclusiveDeployment;
                ir.indicators.push_back(std::move(ind));
                pick.terms.push_back({aux, 1});
            }
            pick.op = RowOp::Eq;
            pick.rhs = 1;
            pick.family = Family::ExclusiveDeployment;
            ir.rows.push_back(std::move(pick));
        } else if (const auto* c = std::get_if<RequireProvide>(&sc)) {
            LinRow row;
            for (std::size_t k = 0; k < M; ++k) {
                row.terms.push_back({ir.a_var(idx(c->i), k), c->n});
                row.terms.push_back({ir.a_var(idx(c->j), k), -c->m});
            }
            row.op = RowOp::Le;
            row.family = Family::RequireProvide;
            ir.rows.push_back(std::move(row));
        } else if (const auto* c = std::get_if<ExactRatio>(&sc)) {
            LinRow lo, hi;
            for (std::size_t k = 0; k < M; ++k) {
                lo.terms.push_back({ir.a_var(idx(c->j), k), c->n});
                lo.terms.push_back({ir.a_var(idx(c->i), k), -1});
                hi.terms.push_back({ir.a_var(idx(c->j), k), c->n});
                hi.terms.push_back({ir.a_var(idx(c->i), k), -1});
            }
            lo.op = RowOp::Ge;
            lo.rhs = 0;
            lo.family = Family::ExactRatio;
            hi.op = RowOp::Le;
            hi.rhs = c->n - 1;
            hi.family = Family::ExactRatio;
            ir.rows.push_back(std::move(lo));
            ir.rows.push_back(std::move(hi));
        } else if (const auto* c = std::get_if<FullDeploy>(&sc)) {
            std::size_t a = idx(c->i);
            ir.meta.full_deploy.push_back(a);
            LinRow row;
            for (std::size_t k = 0; k < M; ++k) row.terms.push_back({ir.a_var(a, k), 1});
            for (std::size_t k = 0; k < M; ++k) {
                std::vector<int> rivals;
                for (std::size_t j = 0; j < N; ++j)
                    if (graph.edge(a, j)) rivals.push_back(ir.a_var(j, k));
                if (rivals.empty()) continue;
                int aux = new_aux("blk_" + std::to_string(c->i) + "_" + std::to_string(k + 1));
                ir.indicators.push_back({aux, std::move(rivals),
                                         std::int64_t(graph.degree(a)),
                                         Family::FullDeployment});
                row.terms.push_back({aux, 1});
            }
            for (std::size_t k = 0; k < M; ++k) row.terms.push_back({ir.v_var(k), -1});
            row.op = RowOp::Eq;
            row.rhs = 0;
            row.family = Family::FullDeployment;
            ir.rows.push_back(std::move(row));
        } else if (const auto* c = std::get_if<BoundInstances>(&sc)) {
            LinRow row;
            for (int id : c->components)
                for (std::size_t k = 0; k < M; ++k)
                    row.terms.push_back({ir.a_var(idx(id), k), 1});
            row.op = to_rowop(c->op);
            row.rhs = c->n;
            row.family = Family::BoundInstances;
            ir.rows.push_back(std::move(row));
        } else if (const auto* c = std::get_if<ConditionalBound>(&sc)) {
            int aux = new_aux("grd_" + std::to_string(c->guard));
            Indicator ind;
            ind.aux = aux;
            for (std::size_t k = 0; k < M; ++k)
                ind.vars.push_back(ir.a_var(idx(c->guard), k));
            ind.upper = std::int64_t(M);
            ind.family = Family::ConditionalBound;
            ir.indicators.push_back(std::move(ind));

            Implication imp;
            imp.guard = {{{aux, 1}}, RowOp::Eq, 1, Family::ConditionalBound};
            imp.family = Family::ConditionalBound;
            LinRow row;
            for (int id : c->components)
                for (std::size_t k = 0; k < M; ++k)
                    row.terms.push_back({ir.a_var(idx(id), k), 1});
            row.op = to_rowop(c->op);
            row.rhs = c->n;
            row.family = Family::ConditionalBound;
            imp.then.push_back(std::move(row));
            ir.implications.push_back(std::move(imp));
        }
    }

    if (fixed) {
        for (const auto& [i, k] : fixed->ones) {
            ir.rows.push_back({{{ir.a_var(i, k), 1}}, RowOp::Eq, 1, Family::FixedCell});
            ir.meta.fixed_cells.emplace_back(i, k, 1);
            ir.vars[ir.a_var(i, k)].lb = 1;
        }
        for (const auto& [i, k] : fixed->zeros) {
            ir.rows.push_back({{{ir.a_var(i, k), 1}}, RowOp::Eq, 0, Family::FixedCell});
            ir.meta.fixed_cells.emplace_back(i, k, 0);
            ir.vars[ir.a_var(i, k)].ub = 0;
        }
        if (fixed->fixed_count() > 0) ir.meta.columns_symmetric = false;
    }

    return ir;
}

void lower_h_terms(ConstraintIR& ir) {
    if (ir.lowered) return;
    for (const auto& ind : ir.indicators) {
        LinRow ge, le;
        for (int v : ind.vars) {
            ge.terms.push_back({v, 1});
            le.terms.push_back({v, 1});
        }
        ge.terms.push_back({ind.aux, -1});
        ge.op = RowOp::Ge;
        ge.rhs = 0;
        ge.family = Family::IndicatorLink;
        le.terms.push_back({ind.aux, -ind.upper});
        le.op = RowOp::Le;
        le.rhs = 0;
        le.family = Family::IndicatorLink;
        ir.rows.push_back(std::move(ge));
        ir.rows.push_back(std::move(le));
    }
    ir.lowered = true;
}

namespace {

void print_row(std::ostringstream& os, const ConstraintIR& ir, const LinRow& row) {
    bool first = true;
    for (const auto& t : row.terms) {
        if (t.coef >= 0 && !first) os << " + ";
        if (t.coef < 0) os << (first ? "-" : " - ");
        std::int64_t mag = t.coef < 0 ? -t.coef : t.coef;
        if (mag != 1) os << mag << "*";
        os << ir.vars[t.var].name;
        first = false;
    }
    os << (row.op == RowOp::Le ? " <= " : row.op == RowOp::Ge ? " >= " : " = ");
    os << row.rhs;
}

}  // namespace

std::string ir_to_text(const ConstraintIR& ir) {
    std::ostringstream os;
    os << "vars " << ir.vars.size() << " rows " << ir.rows.size() << " implications "
       << ir.implications.size() << " indicators " << ir.indicators.size() << "\n";
    for (const auto& v : ir.vars)
        os << "var " << v.name << " in [" << v.lb << "," << v.ub << "]\n";
    for (const auto& r : ir.rows) {
        os << family_name(r.family) << ": ";
        print_row(os, ir, r);
        os << "\n";
    }
    for (const auto& im : ir.implications) {
        for (const auto& r : im.then) {
            os << family_name(im.family) << ": [";
            print_row(os, ir, im.guard);
            os << "] -> ";
            print_row(os, ir, r);
            os << "\n";
        }
    }
    for (const auto& ind : ir.indicators) {
        os << family_name(ind.family) << ": " << ir.vars[ind.aux].name << " = step(";
        for (std::size_t i = 0; i < ind.vars.size(); ++i)
            os << (i ? " + " : "") << ir.vars[ind.vars[i]].name;
        os << ")\n";
    }
    os << "minimize";
    for (int v : ir.objective) os << " " << ir.vars[v].name;
    os << "\n";
    return os.str();
}

}  // namespace deployopt
