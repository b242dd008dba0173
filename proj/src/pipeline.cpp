#include "deployopt/pipeline.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "deployopt/confgraph.hpp"
#include "deployopt/smtlib.hpp"

namespace deployopt {

namespace {

// one sat/unsat round against the external solver
struct SmtProbe {
    bool sat = false;
    DeploymentPlan plan;
};

SmtProbe probe_external(const ConstraintIR& ir, const EmitOptions& eopts,
                        const ValidatedSpec& spec, const OfferCatalog& catalog,
                        const PipelineOptions& opts, std::int64_t budget_ms) {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path();
    auto path = dir / ("deployopt-" + std::to_string(::getpid()) + "-" +
                       std::to_string(std::rand()) + ".smt2");
    {
        std::ofstream out(path);
        out << emit_smtlib(ir, eopts);
    }
    std::string output;
    try {
        output = run_external(opts.external_cmd, path.string(), budget_ms);
    } catch (...) {
        fs::remove(path);
        throw;
    }
    fs::remove(path);
    SmtProbe probe;
    if (model_reports_unsat(output)) return probe;
    probe.plan = parse_model(output, ir, &spec, &catalog);
    probe.sat = true;
    return probe;
}

SolveResult solve_via_smt(const ConstraintIR& ir, const ValidatedSpec& spec,
                          const OfferCatalog& catalog, const PipelineOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    };
    SolveResult res;
    try {
        if (!opts.smt_no_opt) {
            EmitOptions eopts;  // (minimize ...) for OMT-capable solvers
            auto probe = probe_external(ir, eopts, spec, catalog, opts, opts.timeout_ms);
            if (probe.sat) {
                res.status = SolveStatus::Optimal;
                res.has_plan = true;
                res.plan = std::move(probe.plan);
                res.objective = res.plan.total_price;
            }
        } else {
            // plain SMT solver: find any model, then binary-search the cost
            EmitOptions eopts;
            eopts.minimize = false;
            auto first = probe_external(ir, eopts, spec, catalog, opts,
                                        opts.timeout_ms - elapsed());
            if (first.sat) {
                std::int64_t best = first.plan.total_price;
                DeploymentPlan best_plan = std::move(first.plan);
                std::int64_t lo = 0;
                while (lo < best) {
                    std::int64_t mid = lo + (best - lo - 1) / 2;
                    eopts.cost_bound = mid;
                    auto left = opts.timeout_ms - elapsed();
                    if (left <= 0) throw SmtError("ExternalTimeout", "cost search expired");
                    auto probe = probe_external(ir, eopts, spec, catalog, opts, left);
                    if (probe.sat) {
                        best = probe.plan.total_price;
                        best_plan = std::move(probe.plan);
                    } else {
                        lo = mid + 1;
                    }
                }
                res.status = SolveStatus::Optimal;
                res.has_plan = true;
                res.plan = std::move(best_plan);
                res.objective = best;
            }
        }
    } catch (const SmtError& e) {
        if (e.code() == "ExternalTimeout") {
            res.status = SolveStatus::Timeout;
            res.stats.time_ms = elapsed();
            return res;
        }
        throw;
    }
    res.stats.time_ms = elapsed();
    return res;
}

}  // namespace

Analysis analyze_problem(const ValidatedSpec& spec, const OfferCatalog& catalog,
                         const PipelineOptions& opts) {
    Analysis an;
    an.merge = merge_colocated(spec, catalog);
    const ValidatedSpec& merged = an.merge.merged;
    an.estimate = estimate_instances(merged);
    an.machine_count =
        opts.machine_count.value_or(std::size_t(an.estimate.m_upper));
    an.total_cells = merged.spec.components.size() * an.machine_count;

    auto graph = ConflictGraph::from_spec(merged);
    an.cliques = enumerate_maximal_cliques(graph);
    an.selected_clique = select_clique(an.cliques, an.estimate.nu);
    an.fv_mode = opts.fv_mode.value_or(choose_fv_mode(merged, an.selected_clique));
    an.breakers = make_breakers(opts.strategy, merged, an.estimate.nu,
                                an.machine_count, an.fv_mode);
    return an;
}

ConstraintIR build_pipeline_ir(const Analysis& analysis, const OfferCatalog& catalog) {
    auto ir = build_ir(analysis.merge.merged, catalog, analysis.machine_count);
    apply_breakers(ir, analysis.breakers);
    return ir;
}

PipelineResult run_pipeline(const ApplicationSpec& spec, const OfferCatalog& catalog,
                            const PipelineOptions& opts) {
    auto original = validate_spec(spec, catalog);
    PipelineResult out;
    out.analysis = analyze_problem(original, catalog, opts);

    auto ir = build_pipeline_ir(out.analysis, catalog);
    SolveResult solved;
    if (opts.backend == Backend::Builtin) {
        solved = solve(ir, opts.timeout_ms, opts.threads);
    } else {
        lower_h_terms(ir);
        solved = solve_via_smt(ir, out.analysis.merge.merged, catalog, opts);
    }
    out.status = solved.status;
    out.stats = solved.stats;
    out.objective = solved.objective;
    if (solved.has_plan) {
        out.has_plan = true;
        out.plan = expand_plan(out.analysis.merge, original, solved.plan);
        out.report = check_plan(original, catalog, out.plan);
    }
    return out;
}

}  // namespace deployopt
