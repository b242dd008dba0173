#include "deployopt/symbreak.hpp"

#include <algorithm>
#include <stdexcept>

namespace deployopt {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::None: return "none";
        case Strategy::PR: return "pr";
        case Strategy::LX: return "lx";
        case Strategy::PRLX: return "prlx";
        case Strategy::FV: return "fv";
        case Strategy::FVPR: return "fvpr";
        case Strategy::FVLX: return "fvlx";
        case Strategy::TPR: return "tpr";
        default: return "tlx";
    }
}

Strategy strategy_from_name(const std::string& name) {
    for (Strategy s : {Strategy::None, Strategy::PR, Strategy::LX, Strategy::PRLX,
                       Strategy::FV, Strategy::FVPR, Strategy::FVLX, Strategy::TPR,
                       Strategy::TLX})
        if (name == strategy_name(s)) return s;
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

namespace {

std::vector<std::size_t> all_machines(std::size_t m) {
    std::vector<std::size_t> ms(m);
    for (std::size_t k = 0; k < m; ++k) ms[k] = k;
    return ms;
}

BreakerSet single_chain(Chain::Kind kind, std::size_t m) {
    BreakerSet bs;
    if (m >= 2) bs.chains.push_back({kind, all_machines(m)});
    return bs;
}

// clique machine runs per fv1-fv2, then the leftover machines
std::vector<std::vector<std::size_t>> sublists_for(const FixedCells& fc,
                                                   const std::vector<std::size_t>& widths,
                                                   std::size_t m) {
    std::vector<std::vector<std::size_t>> lists;
    std::size_t offset = 0;
    for (std::size_t w : widths) {
        std::vector<std::size_t> run;
        for (std::size_t k = offset; k < offset + w; ++k) run.push_back(k);
        lists.push_back(std::move(run));
        offset += w;
    }
    std::vector<std::size_t> rest;
    for (std::size_t k = fc.machines_used; k < m; ++k) rest.push_back(k);
    lists.push_back(std::move(rest));
    return lists;
}

struct FvParts {
    BreakerSet bs;
    std::vector<std::size_t> widths;  // machine-run length per clique member
    bool have_clique = false;
};

FvParts fv_parts(const ValidatedSpec& vspec, const std::vector<std::int64_t>& nu,
                 std::size_t m, FvMode mode) {
    FvParts out;
    ConflictGraph g = ConflictGraph::from_spec(vspec);
    auto cliques = enumerate_maximal_cliques(g);
    if (cliques.empty()) return out;
    auto clique = select_clique(cliques, nu);
    // members whose deployment is optional (exclusive sets) or whose
    // estimated count is zero must not be pinned: a pin would force them in
    std::vector<std::int64_t> eff = nu;
    for (std::size_t i = 0; i < eff.size(); ++i)
        if (vspec.in_exclusive_set(vspec.spec.components[i].id)) eff[i] = 0;
    out.bs.fixed = fix_assignments(clique, eff, m, mode, g);
    for (std::size_t v : clique)
        out.widths.push_back(eff[v] <= 0 ? 0
                             : mode == FvMode::Conservative ? 1
                                                            : std::size_t(eff[v]));
    out.have_clique = true;
    return out;
}

}  // namespace

BreakerSet gen_pr(std::size_t m) { return single_chain(Chain::Kind::Price, m); }
BreakerSet gen_lx(std::size_t m) { return single_chain(Chain::Kind::Lex, m); }

BreakerSet gen_prlx(std::size_t m) {
    BreakerSet bs;
    if (m >= 2) {
        bs.chains.push_back({Chain::Kind::Price, all_machines(m)});
        bs.chains.push_back({Chain::Kind::LexIfPriceEqual, all_machines(m)});
    }
    return bs;
}

BreakerSet gen_tpr(std::size_t m) { return single_chain(Chain::Kind::LoadIfTypeEqual, m); }
BreakerSet gen_tlx(std::size_t m) { return single_chain(Chain::Kind::LexIfTypeEqual, m); }

BreakerSet gen_fv(const ValidatedSpec& vspec, const std::vector<std::int64_t>& nu,
                  std::size_t m, FvMode mode) {
    return fv_parts(vspec, nu, m, mode).bs;
}

BreakerSet gen_fvpr(const ValidatedSpec& vspec, const std::vector<std::int64_t>& nu,
                    std::size_t m, FvMode mode) {
    FvParts parts = fv_parts(vspec, nu, m, mode);
    if (!parts.have_clique) return gen_pr(m);  // remainder is every machine
    parts.bs.vm_sublists = sublists_for(parts.bs.fixed, parts.widths, m);
    for (const auto& run : parts.bs.vm_sublists)
        if (run.size() >= 2) parts.bs.chains.push_back({Chain::Kind::Price, run});
    return parts.bs;
}

BreakerSet gen_fvlx(const ValidatedSpec& vspec, const std::vector<std::int64_t>& nu,
                    std::size_t m, FvMode mode) {
    FvParts parts = fv_parts(vspec, nu, m, mode);
    if (!parts.have_clique) return gen_lx(m);
    parts.bs.vm_sublists = sublists_for(parts.bs.fixed, parts.widths, m);
    for (const auto& run : parts.bs.vm_sublists)
        if (run.size() >= 2) parts.bs.chains.push_back({Chain::Kind::Lex, run});
    return parts.bs;
}

BreakerSet make_breakers(Strategy strategy, const ValidatedSpec& vspec,
                         const std::vector<std::int64_t>& nu, std::size_t m,
                         FvMode mode) {
    switch (strategy) {
        case Strategy::None: return {};
        case Strategy::PR: return gen_pr(m);
        case Strategy::LX: return gen_lx(m);
        case Strategy::PRLX: return gen_prlx(m);
        case Strategy::FV: return gen_fv(vspec, nu, m, mode);
        case Strategy::FVPR: return gen_fvpr(vspec, nu, m, mode);
        case Strategy::FVLX: return gen_fvlx(vspec, nu, m, mode);
        case Strategy::TPR: return gen_tpr(m);
        default: return gen_tlx(m);
    }
}

namespace {

// column-lex order between machines ka >= kb, one row per component:
// sum_{l<=i} 2^(i-l) * (a_l_ka - a_l_kb) >= 0. A violated prefix makes an
// earlier row fail first, so together the rows mean non-strict lex order.
void lex_rows(ConstraintIR& ir, std::size_t ka, std::size_t kb,
              std::vector<LinRow>& out, std::int64_t guard_coef, int guard_a,
              int guard_b) {
    const std::size_t n = ir.N;
    if (n > 48) throw IrError("IncompatibleBreakers", "too many components for lex weights");
    for (std::size_t i = 0; i < n; ++i) {
        LinRow row;
        for (std::size_t l = 0; l <= i; ++l) {
            std::int64_t w = std::int64_t(1) << (i - l);
            row.terms.push_back({ir.a_var(l, ka), w});
            row.terms.push_back({ir.a_var(l, kb), -w});
        }
        if (guard_coef > 0) {
            // slack large enough to absorb the worst lex deficit whenever the
            // guard values differ by at least one
            std::int64_t w = std::int64_t(1) << (i + 1);
            row.terms.push_back({guard_a, w * guard_coef});
            row.terms.push_back({guard_b, -w * guard_coef});
        }
        row.op = RowOp::Ge;
        row.rhs = 0;
        row.family = Family::SymmetryBreaking;
        out.push_back(std::move(row));
    }
}

}  // namespace

void apply_breakers(ConstraintIR& ir, const BreakerSet& bs) {
    auto check_machine = [&](std::size_t k) {
        if (k >= ir.M)
            throw IrError("IncompatibleBreakers",
                          "machine index " + std::to_string(k + 1) + " exceeds M = " +
                              std::to_string(ir.M));
    };

    for (const auto& chain : bs.chains) {
        for (std::size_t k : chain.machines) check_machine(k);
        for (std::size_t q = 0; q + 1 < chain.machines.size(); ++q) {
            std::size_t ka = chain.machines[q], kb = chain.machines[q + 1];
            switch (chain.kind) {
                case Chain::Kind::Price:
                    ir.rows.push_back({{{ir.p_var(ka), 1}, {ir.p_var(kb), -1}},
                                       RowOp::Ge, 0, Family::SymmetryBreaking});
                    break;
                case Chain::Kind::Lex:
                    lex_rows(ir, ka, kb, ir.rows, 0, 0, 0);
                    break;
                case Chain::Kind::LexIfPriceEqual:
                    // sound only next to a price chain (p_ka >= p_kb)
                    lex_rows(ir, ka, kb, ir.rows, 1, ir.p_var(ka), ir.p_var(kb));
                    break;
                case Chain::Kind::LoadIfTypeEqual: {
                    Implication imp;
                    imp.guard = {{{ir.t_var(ka), 1}, {ir.t_var(kb), -1}},
                                 RowOp::Eq, 0, Family::SymmetryBreaking};
                    LinRow body;
                    for (std::size_t i = 0; i < ir.N; ++i) {
                        body.terms.push_back({ir.a_var(i, ka), 1});
                        body.terms.push_back({ir.a_var(i, kb), -1});
                    }
                    body.op = RowOp::Ge;
                    body.rhs = 0;
                    body.family = Family::SymmetryBreaking;
                    imp.then.push_back(std::move(body));
                    imp.family = Family::SymmetryBreaking;
                    ir.implications.push_back(std::move(imp));
                    break;
                }
                case Chain::Kind::LexIfTypeEqual: {
                    Implication imp;
                    imp.guard = {{{ir.t_var(ka), 1}, {ir.t_var(kb), -1}},
                                 RowOp::Eq, 0, Family::SymmetryBreaking};
                    lex_rows(ir, ka, kb, imp.then, 0, 0, 0);
                    imp.family = Family::SymmetryBreaking;
                    ir.implications.push_back(std::move(imp));
                    break;
                }
            }
        }
    }

    for (const auto& [i, k] : bs.fixed.ones) {
        if (i >= ir.N) throw IrError("IncompatibleBreakers", "fixed cell row out of range");
        check_machine(k);
        ir.rows.push_back({{{ir.a_var(i, k), 1}}, RowOp::Eq, 1, Family::FixedCell});
        ir.meta.fixed_cells.emplace_back(i, k, 1);
        ir.vars[ir.a_var(i, k)].lb = 1;
    }
    for (const auto& [i, k] : bs.fixed.zeros) {
        if (i >= ir.N) throw IrError("IncompatibleBreakers", "fixed cell row out of range");
        check_machine(k);
        ir.rows.push_back({{{ir.a_var(i, k), 1}}, RowOp::Eq, 0, Family::FixedCell});
        ir.meta.fixed_cells.emplace_back(i, k, 0);
        ir.vars[ir.a_var(i, k)].ub = 0;
    }

    ir.meta.chains.insert(ir.meta.chains.end(), bs.chains.begin(), bs.chains.end());
    if (!bs.empty()) ir.meta.columns_symmetric = false;
}

}  // namespace deployopt
