#include "deployopt/solver.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

namespace deployopt {

const char* solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        default: return "timeout";
    }
}

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

std::int64_t eval_row(const LinRow& row, const std::vector<std::int64_t>& vals) {
    std::int64_t s = 0;
    for (const auto& t : row.terms) s += t.coef * vals[t.var];
    return s;
}

bool row_holds(const LinRow& row, const std::vector<std::int64_t>& vals) {
    std::int64_t s = eval_row(row, vals);
    switch (row.op) {
        case RowOp::Le: return s <= row.rhs;
        case RowOp::Ge: return s >= row.rhs;
        default: return s == row.rhs;
    }
}

bool native_family(Family f) {
    switch (f) {
        case Family::Occupancy:
        case Family::UnusedMachine:
        case Family::Link:
        case Family::Capacity:
        case Family::Conflict:
        case Family::Colocation:
        case Family::FixedCell:
        case Family::SymmetryBreaking:   // chains are enforced at assignment time
        case Family::FullDeployment:     // enforced when columns are generated
        case Family::RequireProvide:     // covered by the count-interval checks
        case Family::ExactRatio:
        case Family::BoundInstances:
        case Family::ConditionalBound:
            return true;
        default:
            return false;
    }
}

// shared search context, immutable during the search
struct Ctx {
    const ConstraintIR& ir;
    std::size_t N, M, O, H;

    std::vector<std::vector<std::uint8_t>> conflict;    // N x N
    std::vector<std::vector<std::size_t>> colocated;    // partners with lower index
    std::vector<int> cell_fixed;                        // N*M: -1 free, else value
    std::vector<std::uint8_t> mandatory;                // per component
    std::vector<std::size_t> offer_order;               // ascending price
    std::vector<std::int64_t> minfit;                   // per component
    // cheapest offer able to host component i together with the conflict-free
    // full-deployment components (which every occupied machine must carry)
    std::vector<std::int64_t> minfit_base;
    std::int64_t pmin_base = 0;         // cheapest offer fitting that baseline
    std::vector<std::int64_t> req_lo;   // static minimum instance count per component
    std::int64_t pmin = 0;
    std::size_t kmax = 1;  // most components any offer can co-host (upper estimate)

    std::vector<const LinRow*> generic_rows;
    std::vector<const Implication*> generic_imps;

    // native views of the count constraints, full-deployment components, and
    // machine-ordering chains recorded in the IR meta block
    struct ReqProvIdx {
        std::size_t i, j;
        std::int64_t n, m;
    };
    struct RatioIdx {
        std::size_t i, j;
        std::int64_t n;
    };
    struct BoundIdx {
        std::vector<std::size_t> set;
        RowOp op;
        std::int64_t n;
        bool has_guard = false;
        std::size_t guard = 0;
    };
    std::vector<ReqProvIdx> reqprovs;
    std::vector<RatioIdx> ratios;
    std::vector<BoundIdx> bounds;
    std::vector<std::size_t> full_deploy;
    struct ChainEdge {
        Chain::Kind kind;
        std::size_t prev;
    };
    std::vector<std::vector<ChainEdge>> chain_at;  // per machine
    // free_suffix[i][k]: cells of component i on machines >= k not pinned to 0
    std::vector<std::vector<std::int64_t>> free_suffix;
    // canon_prev[k]: machine k is interchangeable with machine k-1 (identical
    // pin columns, no ordering chain separates them), so the search may demand
    // a non-increasing column signature between them
    std::vector<std::uint8_t> canon_prev;
    std::vector<std::uint8_t> price_chained;  // machine sits in a price chain

    // Chain handling has two modes. When every chain runs over a contiguous,
    // pairwise-disjoint machine range whose members carry identical pinned
    // cells (true for everything the breaker generator emits), the chains are
    // pure machine-permutation constraints: any solution can be sorted into a
    // chain-feasible one of equal cost. In that case the search ignores the
    // chain rows, keeps the strong canonical column filter, and sorts each
    // run's columns into chain order at the leaves before verification
    // ("reorder mode"). Otherwise the chains are enforced natively edge by
    // edge during assignment.
    struct Run {
        std::vector<std::size_t> machines;
        bool has_price = false, has_lex = false, has_type = false, has_load = false;
    };
    bool reorder = false;
    std::vector<Run> reorder_runs;

    explicit Ctx(const ConstraintIR& ir_) : ir(ir_) {
        N = ir.N, M = ir.M, O = ir.O, H = ir.H;
        if (N == 0 || M == 0 || O == 0)
            throw SolverError("MalformedIR", "empty dimension in IR");
        if (N > 62) throw SolverError("MalformedIR", "too many components for the builtin solver");

        conflict.assign(N, std::vector<std::uint8_t>(N, 0));
        for (auto [a, b] : ir.meta.conflicts) conflict[a][b] = conflict[b][a] = 1;
        colocated.assign(N, {});
        for (auto [a, b] : ir.meta.colocates) {
            auto [lo, hi] = std::minmax(a, b);
            colocated[hi].push_back(lo);
        }
        cell_fixed.assign(N * M, -1);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < M; ++k) {
                const VarInfo& v = ir.vars[ir.a_var(i, k)];
                if (v.lb == v.ub) cell_fixed[i * M + k] = int(v.lb);
            }
        mandatory.assign(N, 1);
        for (std::size_t i : ir.meta.optional_components) mandatory[i] = 0;

        offer_order.resize(O);
        std::iota(offer_order.begin(), offer_order.end(), std::size_t(0));
        std::stable_sort(offer_order.begin(), offer_order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return ir.meta.offers[a].price < ir.meta.offers[b].price;
                         });

        pmin = kInf;
        for (const auto& o : ir.meta.offers) pmin = std::min(pmin, o.price);

        minfit.assign(N, kInf);
        for (std::size_t i = 0; i < N; ++i) {
            const auto& req = ir.meta.components[i].requirements;
            for (const auto& o : ir.meta.offers) {
                bool fits = true;
                for (std::size_t h = 0; h < H; ++h)
                    if (req[h] > o.capacity[h]) fits = false;
                if (fits) minfit[i] = std::min(minfit[i], o.price);
            }
        }

        // smallest positive requirement per dimension bounds co-hosting
        ResourceVector minreq(H, kInf);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t h = 0; h < H; ++h) {
                std::int64_t r = ir.meta.components[i].requirements[h];
                if (r > 0) minreq[h] = std::min(minreq[h], r);
            }
        std::size_t k_best = 1;
        for (const auto& o : ir.meta.offers) {
            std::size_t cap = N;
            for (std::size_t h = 0; h < H; ++h)
                if (minreq[h] != kInf)
                    cap = std::min(cap, std::size_t(o.capacity[h] / minreq[h]));
            k_best = std::max(k_best, cap);
        }
        kmax = std::max<std::size_t>(1, k_best);

        for (const auto& r : ir.rows)
            if (!native_family(r.family)) generic_rows.push_back(&r);
        for (const auto& im : ir.implications)
            if (im.family != Family::Link && im.family != Family::SymmetryBreaking)
                generic_imps.push_back(&im);

        std::map<int, std::size_t> index_of;
        for (std::size_t i = 0; i < N; ++i) index_of[ir.meta.components[i].id] = i;
        auto rowop = [](BoundOp op) {
            return op == BoundOp::Eq ? RowOp::Eq : op == BoundOp::Le ? RowOp::Le : RowOp::Ge;
        };
        for (const auto& sc : ir.meta.counts) {
            if (const auto* c = std::get_if<RequireProvide>(&sc)) {
                reqprovs.push_back({index_of.at(c->i), index_of.at(c->j), c->n, c->m});
            } else if (const auto* c = std::get_if<ExactRatio>(&sc)) {
                ratios.push_back({index_of.at(c->i), index_of.at(c->j), c->n});
            } else if (const auto* c = std::get_if<BoundInstances>(&sc)) {
                BoundIdx b;
                for (int id : c->components) b.set.push_back(index_of.at(id));
                b.op = rowop(c->op);
                b.n = c->n;
                bounds.push_back(std::move(b));
            } else if (const auto* c = std::get_if<ConditionalBound>(&sc)) {
                BoundIdx b;
                for (int id : c->components) b.set.push_back(index_of.at(id));
                b.op = rowop(c->op);
                b.n = c->n;
                b.has_guard = true;
                b.guard = index_of.at(c->guard);
                bounds.push_back(std::move(b));
            }
        }
        full_deploy = ir.meta.full_deploy;

        free_suffix.assign(N, std::vector<std::int64_t>(M + 1, 0));
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = M; k-- > 0;)
                free_suffix[i][k] =
                    free_suffix[i][k + 1] + (cell_fixed[i * M + k] != 0 ? 1 : 0);

        if (!ir.meta.chains.empty()) {
            std::map<std::vector<std::size_t>, Run> by_list;
            bool ok = true;
            for (const auto& chain : ir.meta.chains) {
                for (std::size_t q = 0; q + 1 < chain.machines.size(); ++q)
                    if (chain.machines[q] + 1 != chain.machines[q + 1]) ok = false;
                Run& r = by_list[chain.machines];
                r.machines = chain.machines;
                switch (chain.kind) {
                    case Chain::Kind::Price: r.has_price = true; break;
                    case Chain::Kind::Lex: r.has_lex = true; break;
                    case Chain::Kind::LexIfPriceEqual: r.has_lex = true; break;
                    case Chain::Kind::LoadIfTypeEqual:
                        r.has_type = r.has_load = true;
                        break;
                    case Chain::Kind::LexIfTypeEqual:
                        r.has_type = r.has_lex = true;
                        break;
                }
            }
            std::vector<std::uint8_t> owned(M, 0);
            for (const auto& [list, run] : by_list) {
                for (std::size_t k : list) {
                    if (owned[k]) ok = false;  // partially overlapping runs
                    owned[k] = 1;
                }
                for (std::size_t k : list)
                    for (std::size_t i = 0; i < N; ++i)
                        if (cell_fixed[i * M + k] != cell_fixed[i * M + list[0]])
                            ok = false;  // pins distinguish the run's machines
            }
            if (ok) {
                reorder = true;
                for (auto& [list, run] : by_list)
                    reorder_runs.push_back(std::move(run));
            }
        }

        chain_at.assign(M, {});
        if (!reorder)
            for (const auto& chain : ir.meta.chains)
                for (std::size_t q = 0; q + 1 < chain.machines.size(); ++q)
                    chain_at[chain.machines[q + 1]].push_back(
                        {chain.kind, chain.machines[q]});

        canon_prev.assign(M, 0);
        if (ir.meta.columns_symmetric) {
            for (std::size_t k = 1; k < M; ++k) canon_prev[k] = 1;
        } else if (ir.meta.chains.empty()) {
            std::size_t canon_from = 0;  // first machine past every pinned cell
            for (std::size_t k = 0; k < M; ++k)
                for (std::size_t i = 0; i < N; ++i)
                    if (cell_fixed[i * M + k] != -1) canon_from = std::max(canon_from, k + 1);
            for (std::size_t k = canon_from + 1; k < M; ++k) canon_prev[k] = 1;
        } else if (reorder) {
            for (const auto& run : reorder_runs)
                for (std::size_t q = 1; q < run.machines.size(); ++q)
                    canon_prev[run.machines[q]] = 1;
        }  // native chains: the chain checks impose the order themselves
        price_chained.assign(M, 0);
        for (const auto& chain : ir.meta.chains)
            if (chain.kind == Chain::Kind::Price)
                for (std::size_t k : chain.machines) price_chained[k] = 1;

        // baseline load of every occupied machine: full-deployment components
        // without conflict edges can never be excused from a machine
        ResourceVector base(H, 0);
        for (std::size_t fd : full_deploy) {
            bool conflict_free = true;
            for (std::size_t j = 0; j < N; ++j)
                if (conflict[fd][j]) conflict_free = false;
            if (!conflict_free) continue;
            for (std::size_t h = 0; h < H; ++h)
                base[h] += ir.meta.components[fd].requirements[h];
        }
        auto cheapest_fitting = [&](const ResourceVector& need) {
            std::int64_t best = kInf;
            for (const auto& o : ir.meta.offers) {
                bool fits = true;
                for (std::size_t h = 0; h < H; ++h)
                    if (need[h] > o.capacity[h]) fits = false;
                if (fits) best = std::min(best, o.price);
            }
            return best;
        };
        pmin_base = cheapest_fitting(base);
        minfit_base.assign(N, kInf);
        for (std::size_t i = 0; i < N; ++i) {
            ResourceVector need = base;
            bool in_base = false;
            for (std::size_t fd : full_deploy)
                if (fd == i) in_base = true;
            if (!in_base)
                for (std::size_t h = 0; h < H; ++h)
                    need[h] += ir.meta.components[i].requirements[h];
            minfit_base[i] = cheapest_fitting(need);
        }

        req_lo.assign(N, 0);
        for (std::size_t i = 0; i < N; ++i) req_lo[i] = mandatory[i] ? 1 : 0;
        for (const auto& b : bounds) {
            if (b.has_guard || b.set.size() != 1 || b.op == RowOp::Le) continue;
            std::size_t i = b.set[0];
            req_lo[i] = std::max(req_lo[i], b.n);
        }
    }
};

struct Incumbent {
    std::mutex mu;
    std::atomic<std::int64_t> bound{kInf};
    std::vector<std::int64_t> vals;
    std::int64_t updates = 0;

    bool offer(const std::vector<std::int64_t>& candidate, std::int64_t obj) {
        std::lock_guard<std::mutex> lock(mu);
        if (obj >= bound.load(std::memory_order_relaxed)) return false;
        bound.store(obj, std::memory_order_relaxed);
        vals = candidate;
        ++updates;
        return true;
    }
};

class Worker {
  public:
    Worker(const Ctx& ctx, Incumbent& inc,
           std::chrono::steady_clock::time_point deadline)
        : ctx_(ctx), inc_(inc), deadline_(deadline) {
        const auto& ir = ctx.ir;
        vals_.assign(ir.vars.size(), 0);
        known_.assign(ir.vars.size(), 0);
        assigned_.assign(ctx.N, 0);
        col_sig_.assign(ctx.M, {0, 0});
        cap_scratch_.assign(ctx.M, 0);
    }

    std::int64_t nodes() const { return nodes_; }
    bool timed_out() const { return timed_out_; }

    // explores the subtree below machine `from`, with machines < from already
    // applied by the caller
    void run(std::size_t from) { dfs(from); }

    // applies one machine decision; public so the parallel driver can seed
    // workers with a first-level branch
    void apply_machine(std::size_t k, std::size_t offer_plus_1, std::uint64_t mask) {
        const auto& ir = ctx_.ir;
        for (std::size_t i = 0; i < ctx_.N; ++i) {
            int bit = (mask >> i) & 1 ? 1 : 0;
            set_var(ir.a_var(i, k), bit);
            assigned_[i] += bit;
        }
        set_var(ir.t_var(k), std::int64_t(offer_plus_1));
        bool used = offer_plus_1 != 0;
        set_var(ir.v_var(k), used ? 1 : 0);
        const VMOffer* off = used ? &ir.meta.offers[offer_plus_1 - 1] : nullptr;
        set_var(ir.p_var(k), used ? off->price : 0);
        for (std::size_t h = 0; h < ctx_.H; ++h)
            set_var(ir.r_var(k, h), used ? off->capacity[h] : 0);
        committed_ += used ? off->price : 0;
        col_sig_[k] = {offer_plus_1, mask};
        derive_indicators();
    }

    // candidate columns for machine k under one offer (or the empty column)
    std::vector<std::uint64_t> columns_for(std::size_t k, const VMOffer* offer) const {
        std::vector<std::uint64_t> out;
        if (!offer) {
            for (std::size_t i = 0; i < ctx_.N; ++i)
                if (ctx_.cell_fixed[i * ctx_.M + k] == 1) return out;
            out.push_back(0);
            return out;
        }
        ResourceVector load(ctx_.H, 0);
        std::uint64_t mask = 0;
        gen_columns(k, offer, 0, load, mask, out);
        return out;
    }

  private:
    void set_var(int v, std::int64_t value) {
        vals_[v] = value;
        known_[v] = 1;
        trail_.push_back(v);
    }

    void derive_indicators() {
        for (const auto& ind : ctx_.ir.indicators) {
            if (known_[ind.aux]) continue;
            std::int64_t sum = 0;
            bool all = true;
            for (int v : ind.vars) {
                if (!known_[v]) {
                    all = false;
                    break;
                }
                sum += vals_[v];
            }
            if (all) set_var(ind.aux, sum > 0 ? 1 : 0);
        }
    }

    void undo_to(std::size_t trail_mark, std::size_t k, std::uint64_t mask,
                 std::int64_t price) {
        while (trail_.size() > trail_mark) {
            known_[trail_.back()] = 0;
            trail_.pop_back();
        }
        for (std::size_t i = 0; i < ctx_.N; ++i)
            if ((mask >> i) & 1) --assigned_[i];
        committed_ -= price;
        col_sig_[k] = {0, 0};
    }

    void gen_columns(std::size_t k, const VMOffer* offer, std::size_t i,
                     ResourceVector& load, std::uint64_t& mask,
                     std::vector<std::uint64_t>& out) const {
        if (i == ctx_.N) {
            if (mask == 0) return;
            // an occupied machine must host every full-deployment component
            // unless something on board conflicts with it
            for (std::size_t fd : ctx_.full_deploy) {
                if ((mask >> fd) & 1) continue;
                bool blocked = false;
                for (std::size_t j = 0; j < ctx_.N && !blocked; ++j)
                    if (((mask >> j) & 1) && ctx_.conflict[fd][j]) blocked = true;
                if (!blocked) return;
            }
            out.push_back(mask);
            return;
        }
        int fixed = ctx_.cell_fixed[i * ctx_.M + k];
        int forced = -1;
        for (std::size_t j : ctx_.colocated[i]) {
            int partner = (mask >> j) & 1 ? 1 : 0;
            if (forced != -1 && forced != partner) return;  // unreachable by construction
            forced = partner;
        }
        for (int bit : {1, 0}) {
            if (fixed != -1 && bit != fixed) continue;
            if (forced != -1 && bit != forced) continue;
            if (bit == 1) {
                bool clash = false;
                for (std::size_t j = 0; j < i && !clash; ++j)
                    if (((mask >> j) & 1) && ctx_.conflict[i][j]) clash = true;
                if (clash) continue;
                const auto& req = ctx_.ir.meta.components[i].requirements;
                bool over = false;
                for (std::size_t h = 0; h < ctx_.H; ++h)
                    if (load[h] + req[h] > offer->capacity[h]) over = true;
                if (over) continue;
                for (std::size_t h = 0; h < ctx_.H; ++h) load[h] += req[h];
                mask |= std::uint64_t(1) << i;
                gen_columns(k, offer, i + 1, load, mask, out);
                mask &= ~(std::uint64_t(1) << i);
                for (std::size_t h = 0; h < ctx_.H; ++h) load[h] -= req[h];
            } else {
                gen_columns(k, offer, i + 1, load, mask, out);
            }
        }
    }

    // interval reasoning over the generic rows; false means no completion of
    // the current partial state can satisfy them
    bool intervals_ok() {
        const auto& ir = ctx_.ir;
        lo_.assign(ir.vars.size(), 0);
        hi_.assign(ir.vars.size(), 0);
        for (std::size_t v = 0; v < ir.vars.size(); ++v) {
            if (known_[v]) {
                lo_[v] = hi_[v] = vals_[v];
            } else {
                lo_[v] = ir.vars[v].lb;
                hi_[v] = ir.vars[v].ub;
            }
        }
        for (const auto& ind : ir.indicators) {
            if (known_[ind.aux]) continue;
            bool some_pos = false, all_zero = true;
            for (int v : ind.vars) {
                if (lo_[v] > 0) some_pos = true;
                if (hi_[v] > 0) all_zero = false;
            }
            if (some_pos) lo_[ind.aux] = std::max<std::int64_t>(lo_[ind.aux], 1);
            if (all_zero) hi_[ind.aux] = 0;
            if (lo_[ind.aux] > hi_[ind.aux]) return false;
        }
        auto range = [&](const LinRow& row) {
            std::int64_t mn = 0, mx = 0;
            for (const auto& t : row.terms) {
                if (t.coef >= 0) {
                    mn += t.coef * lo_[t.var];
                    mx += t.coef * hi_[t.var];
                } else {
                    mn += t.coef * hi_[t.var];
                    mx += t.coef * lo_[t.var];
                }
            }
            return std::pair<std::int64_t, std::int64_t>{mn, mx};
        };
        auto possible = [&](const LinRow& row) {
            auto [mn, mx] = range(row);
            switch (row.op) {
                case RowOp::Le: return mn <= row.rhs;
                case RowOp::Ge: return mx >= row.rhs;
                default: return mn <= row.rhs && mx >= row.rhs;
            }
        };
        auto certain = [&](const LinRow& row) {
            auto [mn, mx] = range(row);
            switch (row.op) {
                case RowOp::Le: return mx <= row.rhs;
                case RowOp::Ge: return mn >= row.rhs;
                default: return mn == row.rhs && mx == row.rhs;
            }
        };
        for (const LinRow* row : ctx_.generic_rows)
            if (!possible(*row)) return false;
        for (const Implication* im : ctx_.generic_imps) {
            if (!certain(im->guard)) continue;  // guard still escapable
            for (const auto& row : im->then)
                if (!possible(row)) return false;
        }
        return true;
    }

    // necessary-condition pruning on the count constraints: each component's
    // final instance count lies in [assigned so far, assigned + free cells on
    // the remaining machines]
    bool counts_ok(std::size_t next_machine) const {
        auto lo = [&](std::size_t i) { return assigned_[i]; };
        auto hi = [&](std::size_t i) {
            return assigned_[i] + ctx_.free_suffix[i][next_machine];
        };
        for (const auto& rp : ctx_.reqprovs)
            if (rp.n * lo(rp.i) > rp.m * hi(rp.j)) return false;
        for (const auto& rt : ctx_.ratios) {
            if (rt.n * hi(rt.j) - lo(rt.i) < 0) return false;
            if (rt.n * lo(rt.j) - hi(rt.i) > rt.n - 1) return false;
        }
        for (const auto& b : ctx_.bounds) {
            if (b.has_guard && !ctx_.mandatory[b.guard] && assigned_[b.guard] == 0)
                continue;  // guard component may stay undeployed
            std::int64_t slo = 0, shi = 0;
            for (std::size_t i : b.set) {
                slo += lo(i);
                shi += hi(i);
            }
            if (b.op != RowOp::Ge && slo > b.n) return false;
            if (b.op != RowOp::Le && shi < b.n) return false;
        }
        return true;
    }

    bool structural_ok(std::size_t next_machine) {
        if (!counts_ok(next_machine)) return false;
        // admissible cost bound over the still-missing instances: every future
        // machine pays at least the baseline-fitting price, a machine hosts at
        // most kmax components, and no machine hosts a component twice
        std::int64_t left = std::int64_t(ctx_.M - next_machine);
        std::int64_t need = 0, max_deficit = 0, sum_minfit = 0, max_minfit = 0;
        for (std::size_t i = 0; i < ctx_.N; ++i) {
            std::int64_t d = ctx_.req_lo[i] - assigned_[i];
            if (d <= 0) continue;
            if (d > ctx_.free_suffix[i][next_machine]) return false;
            if (ctx_.minfit_base[i] == kInf) return false;
            need += d;
            max_deficit = std::max(max_deficit, d);
            sum_minfit += d * ctx_.minfit_base[i];
            max_minfit = std::max(max_minfit, ctx_.minfit_base[i]);
        }
        std::int64_t best = inc_.bound.load(std::memory_order_relaxed);
        if (need == 0) return best == kInf || committed_ < best;
        // price chains cap what any later machine may cost: each unassigned
        // chained machine can spend at most the price of its nearest assigned
        // chain ancestor. If the dearest cap cannot pay for some still-needed
        // component, nothing ahead can host it.
        if (!ctx_.reorder && !ctx_.ir.meta.chains.empty()) {
            std::int64_t global_cap = 0;
            bool any_uncapped = false;
            for (std::size_t m = next_machine; m < ctx_.M && !any_uncapped; ++m) {
                std::int64_t cap = kInf;
                bool capped = false;
                for (const auto& ce : ctx_.chain_at[m]) {
                    if (ce.kind != Chain::Kind::Price) continue;
                    capped = true;
                    if (ce.prev < next_machine) {
                        auto pt = col_sig_[ce.prev].first;
                        cap = std::min(cap,
                                       pt ? ctx_.ir.meta.offers[pt - 1].price : 0);
                    } else {
                        cap = std::min(cap, cap_scratch_[ce.prev]);
                    }
                }
                if (!capped) {
                    any_uncapped = true;
                } else {
                    cap_scratch_[m] = cap;
                    global_cap = std::max(global_cap, cap);
                }
            }
            if (!any_uncapped) {
                for (std::size_t i = 0; i < ctx_.N; ++i)
                    if (ctx_.req_lo[i] - assigned_[i] > 0 &&
                        ctx_.minfit_base[i] > global_cap)
                        return false;
            }
        }
        std::int64_t kmax = std::int64_t(ctx_.kmax);
        if (need > left * kmax) return false;
        std::int64_t machines_needed = std::max((need + kmax - 1) / kmax, max_deficit);
        if (machines_needed > left) return false;
        std::int64_t per_machine = ctx_.pmin_base == kInf ? ctx_.pmin : ctx_.pmin_base;
        std::int64_t lb = std::max({max_minfit, machines_needed * per_machine,
                                    sum_minfit / kmax});
        return best == kInf || committed_ + lb < best;
    }

    void leaf() {
        const std::vector<std::int64_t>* candidate = &vals_;
        if (ctx_.reorder) {
            reorder_columns();
            candidate = &sorted_vals_;
        }
        if (!point_feasible(ctx_.ir, *candidate)) return;
        std::int64_t obj = 0;
        for (int v : ctx_.ir.objective) obj += (*candidate)[v];
        inc_.offer(*candidate, obj);
    }

    // sorts each chain run's columns into the order its rows demand; all other
    // constraints are machine-permutation invariant, so the permuted point is
    // feasible exactly when the searched one satisfies the chain-free model
    void reorder_columns() {
        const auto& ir = ctx_.ir;
        sorted_vals_ = vals_;
        auto lex_gt = [&](std::uint64_t a, std::uint64_t b) {
            for (std::size_t i = 0; i < ctx_.N; ++i) {
                int ba = int((a >> i) & 1), bb = int((b >> i) & 1);
                if (ba != bb) return ba > bb;  // component 0 most significant
            }
            return false;
        };
        for (const auto& run : ctx_.reorder_runs) {
            order_scratch_ = run.machines;
            std::stable_sort(
                order_scratch_.begin(), order_scratch_.end(),
                [&](std::size_t ka, std::size_t kb) {
                    auto [ta, ma] = col_sig_[ka];
                    auto [tb, mb] = col_sig_[kb];
                    std::int64_t pa = ta ? ir.meta.offers[ta - 1].price : 0;
                    std::int64_t pb = tb ? ir.meta.offers[tb - 1].price : 0;
                    if (run.has_price && pa != pb) return pa > pb;
                    if (run.has_type && ta != tb) return ta > tb;
                    if (run.has_load && std::popcount(ma) != std::popcount(mb))
                        return std::popcount(ma) > std::popcount(mb);
                    if (run.has_lex && ma != mb) return lex_gt(ma, mb);
                    return false;
                });
            for (std::size_t q = 0; q < order_scratch_.size(); ++q) {
                std::size_t dst = run.machines[q], src = order_scratch_[q];
                if (dst == src) continue;
                for (std::size_t i = 0; i < ctx_.N; ++i)
                    sorted_vals_[ir.a_var(i, dst)] = vals_[ir.a_var(i, src)];
                sorted_vals_[ir.t_var(dst)] = vals_[ir.t_var(src)];
                sorted_vals_[ir.v_var(dst)] = vals_[ir.v_var(src)];
                sorted_vals_[ir.p_var(dst)] = vals_[ir.p_var(src)];
                for (std::size_t h = 0; h < ctx_.H; ++h)
                    sorted_vals_[ir.r_var(dst, h)] = vals_[ir.r_var(src, h)];
            }
        }
        for (const auto& ind : ir.indicators) {
            std::int64_t sum = 0;
            for (int v : ind.vars) sum += sorted_vals_[v];
            sorted_vals_[ind.aux] = sum > 0 ? 1 : 0;
        }
    }

    void dfs(std::size_t k) {
        if (timed_out_) return;
        if ((++nodes_ & 0xFFF) == 1 &&
            std::chrono::steady_clock::now() >= deadline_) {
            timed_out_ = true;
            return;
        }
        if (k == ctx_.M) {
            leaf();
            return;
        }
        if (!structural_ok(k) || !intervals_ok()) return;

        auto lex_le_prev = [&](std::uint64_t prev_mask, std::uint64_t mask) {
            // component 0 is the most significant position
            for (std::size_t i = 0; i < ctx_.N; ++i) {
                int pa = int((prev_mask >> i) & 1), pb = int((mask >> i) & 1);
                if (pa != pb) return pa > pb;
            }
            return true;
        };
        auto try_choice = [&](std::size_t offer_plus_1, std::uint64_t mask) {
            if (k > 0 && ctx_.canon_prev[k]) {
                auto prev = col_sig_[k - 1];
                if (std::pair<std::size_t, std::uint64_t>{offer_plus_1, mask} > prev)
                    return;  // canonical column order
            }
            std::int64_t price =
                offer_plus_1 ? ctx_.ir.meta.offers[offer_plus_1 - 1].price : 0;
            for (const auto& ce : ctx_.chain_at[k]) {
                auto [pt, pmask] = col_sig_[ce.prev];
                std::int64_t pprice = pt ? ctx_.ir.meta.offers[pt - 1].price : 0;
                // beyond the chain's own ordering key, adjacent machines with
                // an equal key can be swapped freely; demanding a
                // non-increasing column signature on such ties keeps at least
                // one solution (block-sort the tied machines) and removes the
                // residual permutation symmetry
                // the mask order here must match the lex rows so the price and
                // lex chains of a combined strategy agree on one canonical form
                auto sig_tie = [&] {
                    if (pmask != mask) return lex_le_prev(pmask, mask);
                    return pt >= offer_plus_1;
                };
                switch (ce.kind) {
                    case Chain::Kind::Price:
                        if (pprice < price) return;
                        if (pprice == price && !sig_tie()) return;
                        break;
                    case Chain::Kind::Lex:
                        if (!lex_le_prev(pmask, mask)) return;
                        if (pmask == mask && pt < offer_plus_1) return;
                        break;
                    case Chain::Kind::LexIfPriceEqual:
                        if (pprice == price && !lex_le_prev(pmask, mask)) return;
                        if (pprice == price && pmask == mask && pt < offer_plus_1)
                            return;
                        break;
                    case Chain::Kind::LoadIfTypeEqual:
                        if (pt == offer_plus_1 &&
                            std::popcount(pmask) < std::popcount(mask))
                            return;
                        break;
                    case Chain::Kind::LexIfTypeEqual:
                        if (pt == offer_plus_1 && !lex_le_prev(pmask, mask)) return;
                        break;
                }
            }
            std::size_t mark = trail_.size();
            std::int64_t best = inc_.bound.load(std::memory_order_relaxed);
            // any completion costs at least the committed price plus this one
            if (best != kInf && committed_ + price >= best) return;
            apply_machine(k, offer_plus_1, mask);
            dfs(k + 1);
            undo_to(mark, k, mask, price);
        };

        bool pinned_here = false;
        for (std::size_t i = 0; i < ctx_.N; ++i)
            if (ctx_.cell_fixed[i * ctx_.M + k] == 1) pinned_here = true;
        if (!pinned_here) try_choice(0, 0);
        for (std::size_t oi : ctx_.offer_order) {
            if (timed_out_) return;
            const VMOffer& off = ctx_.ir.meta.offers[oi];
            for (std::uint64_t mask : columns_for(k, &off)) {
                try_choice(oi + 1, mask);
                if (timed_out_) return;
            }
        }
    }

    const Ctx& ctx_;
    Incumbent& inc_;
    std::chrono::steady_clock::time_point deadline_;

    std::vector<std::int64_t> vals_;
    std::vector<std::uint8_t> known_;
    std::vector<std::int64_t> assigned_;
    std::vector<int> trail_;
    std::vector<std::pair<std::size_t, std::uint64_t>> col_sig_;
    std::vector<std::int64_t> cap_scratch_;
    std::vector<std::int64_t> sorted_vals_;
    std::vector<std::size_t> order_scratch_;
    std::vector<std::int64_t> lo_, hi_;
    std::vector<std::uint8_t> unsat_;
    std::int64_t committed_ = 0;
    std::int64_t nodes_ = 0;
    bool timed_out_ = false;
};

DeploymentPlan plan_from_vals(const ConstraintIR& ir,
                              const std::vector<std::int64_t>& vals) {
    DeploymentPlan plan;
    plan.assignment.assign(ir.N, std::vector<std::uint8_t>(ir.M, 0));
    for (std::size_t i = 0; i < ir.N; ++i)
        for (std::size_t k = 0; k < ir.M; ++k)
            plan.assignment[i][k] = std::uint8_t(vals[ir.a_var(i, k)]);
    for (std::size_t k = 0; k < ir.M; ++k) {
        plan.types.push_back(int(vals[ir.t_var(k)]));
        plan.occupancy.push_back(std::uint8_t(vals[ir.v_var(k)]));
        plan.total_price += vals[ir.p_var(k)];
    }
    return plan;
}

}  // namespace

bool point_feasible(const ConstraintIR& ir, const std::vector<std::int64_t>& vals) {
    for (std::size_t v = 0; v < ir.vars.size(); ++v)
        if (vals[v] < ir.vars[v].lb || vals[v] > ir.vars[v].ub) return false;
    for (const auto& ind : ir.indicators) {
        std::int64_t sum = 0;
        for (int v : ind.vars) sum += vals[v];
        if (vals[ind.aux] != (sum > 0 ? 1 : 0)) return false;
    }
    for (const auto& row : ir.rows)
        if (!row_holds(row, vals)) return false;
    for (const auto& im : ir.implications) {
        if (!row_holds(im.guard, vals)) continue;
        for (const auto& row : im.then)
            if (!row_holds(row, vals)) return false;
    }
    return true;
}

std::int64_t lower_bound(const ConstraintIR& ir,
                         const std::vector<std::uint8_t>& unsatisfied,
                         std::size_t machines_left) {
    // rebuilt per call; callers on the hot path are expected to be fine with
    // this since the loops are tiny
    std::int64_t pmin = kInf, sum_minfit = 0, max_minfit = 0;
    std::size_t need = 0;
    const std::size_t H = ir.H;

    ResourceVector minreq(H, kInf);
    for (std::size_t i = 0; i < ir.N; ++i)
        for (std::size_t h = 0; h < H; ++h) {
            std::int64_t r = ir.meta.components[i].requirements[h];
            if (r > 0) minreq[h] = std::min(minreq[h], r);
        }
    std::size_t kmax = 1;
    for (const auto& o : ir.meta.offers) {
        pmin = std::min(pmin, o.price);
        std::size_t cap = ir.N;
        for (std::size_t h = 0; h < H; ++h)
            if (minreq[h] != kInf) cap = std::min(cap, std::size_t(o.capacity[h] / minreq[h]));
        kmax = std::max(kmax, cap);
    }
    kmax = std::max<std::size_t>(1, kmax);

    for (std::size_t i = 0; i < ir.N && i < unsatisfied.size(); ++i) {
        if (!unsatisfied[i]) continue;
        ++need;
        std::int64_t fit = kInf;
        const auto& req = ir.meta.components[i].requirements;
        for (const auto& o : ir.meta.offers) {
            bool ok = true;
            for (std::size_t h = 0; h < H; ++h)
                if (req[h] > o.capacity[h]) ok = false;
            if (ok) fit = std::min(fit, o.price);
        }
        if (fit == kInf) return kInf;  // cannot be completed at all
        sum_minfit += fit;
        max_minfit = std::max(max_minfit, fit);
    }
    if (need == 0) return 0;
    if (machines_left * kmax < need) return kInf;

    std::int64_t machines_needed = std::int64_t((need + kmax - 1) / kmax);
    std::int64_t by_spread = sum_minfit / std::int64_t(kmax);
    return std::max({by_spread, machines_needed * pmin, max_minfit});
}

SolveResult solve(const ConstraintIR& ir, std::int64_t timeout_ms, int threads) {
    auto start = std::chrono::steady_clock::now();
    auto deadline = start + std::chrono::milliseconds(timeout_ms);
    Ctx ctx(ir);
    Incumbent inc;

    bool timed_out = false;
    std::int64_t nodes = 0;

    if (threads <= 1) {
        Worker w(ctx, inc, deadline);
        w.run(0);
        timed_out = w.timed_out();
        nodes = w.nodes();
    } else {
        // split on the first machine's decisions, one worker pool over them
        Worker seed(ctx, inc, deadline);
        std::vector<std::pair<std::size_t, std::uint64_t>> tasks;
        if (!seed.columns_for(0, nullptr).empty()) tasks.emplace_back(0, 0);
        for (std::size_t oi : ctx.offer_order)
            for (std::uint64_t mask : seed.columns_for(0, &ir.meta.offers[oi]))
                tasks.emplace_back(oi + 1, mask);

        std::atomic<std::size_t> next{0};
        std::atomic<std::int64_t> node_total{0};
        std::atomic<bool> any_timeout{false};
        auto body = [&]() {
            while (true) {
                std::size_t idx = next.fetch_add(1);
                if (idx >= tasks.size()) break;
                Worker w(ctx, inc, deadline);
                auto [offer, mask] = tasks[idx];
                w.apply_machine(0, offer, mask);
                w.run(1);
                node_total += w.nodes();
                if (w.timed_out()) any_timeout = true;
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(body);
        for (auto& t : pool) t.join();
        timed_out = any_timeout.load();
        nodes = node_total.load();
    }

    SolveResult res;
    res.stats.nodes_explored = nodes;
    res.stats.incumbent_updates = inc.updates;
    res.stats.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (inc.bound.load() != kInf) {
        res.objective = inc.bound.load();
        res.plan = plan_from_vals(ir, inc.vals);
        res.has_plan = true;
        res.status = timed_out ? SolveStatus::Timeout : SolveStatus::Optimal;
    } else {
        res.status = timed_out ? SolveStatus::Timeout : SolveStatus::Infeasible;
    }
    return res;
}

SolveResult brute_force(const ConstraintIR& ir) {
    auto start = std::chrono::steady_clock::now();
    const std::size_t N = ir.N, M = ir.M, O = ir.O, H = ir.H;
    if (N * M > 26)
        throw SolverError("SpaceTooLarge", "assignment space exceeds the oracle limit");
    double space = double(1ULL << (N * M));
    for (std::size_t k = 0; k < M; ++k) space *= double(O + 1);
    if (space > 1e8)
        throw SolverError("SpaceTooLarge", "enumeration space exceeds 1e8 points");

    // rows whose variables are all assignment cells can veto a matrix early
    std::vector<const LinRow*> a_rows;
    for (const auto& row : ir.rows) {
        bool pure = true;
        for (const auto& t : row.terms)
            if (t.var >= int(N * M)) pure = false;
        if (pure) a_rows.push_back(&row);
    }

    std::vector<std::int64_t> vals(ir.vars.size(), 0);
    std::int64_t best = kInf;
    std::vector<std::int64_t> best_vals;

    for (std::uint64_t amask = 0; amask < (1ULL << (N * M)); ++amask) {
        for (std::size_t c = 0; c < N * M; ++c) vals[c] = (amask >> c) & 1;
        bool ok = true;
        for (const LinRow* row : a_rows)
            if (!row_holds(*row, vals)) {
                ok = false;
                break;
            }
        if (!ok) continue;

        // column loads and emptiness
        std::vector<std::uint8_t> used(M, 0);
        std::vector<ResourceVector> load(M, ResourceVector(H, 0));
        for (std::size_t k = 0; k < M; ++k)
            for (std::size_t i = 0; i < N; ++i)
                if (vals[ir.a_var(i, k)]) {
                    used[k] = 1;
                    for (std::size_t h = 0; h < H; ++h)
                        load[k][h] += ir.meta.components[i].requirements[h];
                }

        // enumerate type vectors: unused machines stay 0, used ones take any
        // offer with room
        std::vector<std::vector<std::size_t>> choices(M);
        bool dead = false;
        for (std::size_t k = 0; k < M; ++k) {
            if (!used[k]) {
                choices[k] = {0};
                continue;
            }
            for (std::size_t o = 0; o < O; ++o) {
                bool fits = true;
                for (std::size_t h = 0; h < H; ++h)
                    if (load[k][h] > ir.meta.offers[o].capacity[h]) fits = false;
                if (fits) choices[k].push_back(o + 1);
            }
            if (choices[k].empty()) dead = true;
        }
        if (dead) continue;

        std::vector<std::size_t> pick(M, 0);
        while (true) {
            std::int64_t obj = 0;
            for (std::size_t k = 0; k < M; ++k) {
                std::size_t t = choices[k][pick[k]];
                vals[ir.t_var(k)] = std::int64_t(t);
                vals[ir.v_var(k)] = used[k];
                vals[ir.p_var(k)] = t ? ir.meta.offers[t - 1].price : 0;
                for (std::size_t h = 0; h < H; ++h)
                    vals[ir.r_var(k, h)] = t ? ir.meta.offers[t - 1].capacity[h] : 0;
                obj += vals[ir.p_var(k)];
            }
            for (const auto& ind : ir.indicators) {
                std::int64_t sum = 0;
                for (int v : ind.vars) sum += vals[v];
                vals[ind.aux] = sum > 0 ? 1 : 0;
            }
            if (obj < best && point_feasible(ir, vals)) {
                best = obj;
                best_vals = vals;
            }
            std::size_t k = 0;
            while (k < M && ++pick[k] == choices[k].size()) pick[k++] = 0;
            if (k == M) break;
        }
    }

    SolveResult res;
    res.stats.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (best != kInf) {
        res.status = SolveStatus::Optimal;
        res.objective = best;
        res.plan = plan_from_vals(ir, best_vals);
        res.has_plan = true;
    }
    return res;
}

}  // namespace deployopt
