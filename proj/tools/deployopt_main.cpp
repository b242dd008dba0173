// deployopt command line: estimate instance counts, analyze search-space
// reductions, compute minimum-cost deployment plans, check plans, emit
// SMT-LIB2 files, and run the benchmark matrix.
//
// Exit codes: 0 success/optimal, 1 check failure or bench mismatch,
// 2 parse/validation error, 3 infeasible, 4 timeout, 5 external solver
// unavailable.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "deployopt/json_io.hpp"
#include "deployopt/pipeline.hpp"
#include "deployopt/smtlib.hpp"

using json = nlohmann::json;
using namespace deployopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTimeout = 4;
constexpr int kExitExternalUnavailable = 5;

// Raises the minimum-instances bound of the component named "Wordpress" (a
// benchmark scaling knob); adds the bound when the spec has none.
void apply_min_instances(ApplicationSpec& spec, std::int64_t k) {
    int target = 0;
    for (const auto& c : spec.components)
        if (c.name == "Wordpress") target = c.id;
    if (target == 0)
        throw ValidationError("NoScalableComponent",
                              "--min-wordpress-instances needs a component named "
                              "'Wordpress' in the spec");
    for (auto& sc : spec.constraints)
        if (auto* b = std::get_if<BoundInstances>(&sc))
            if (b->op == BoundOp::Ge && b->components == std::vector<int>{target}) {
                b->n = k;
                return;
            }
    spec.constraints.push_back(BoundInstances{{target}, BoundOp::Ge, k});
}

// Offers are only needed by the estimator for the fits-an-offer validation;
// without a catalog we synthesize one generous offer so validation passes.
OfferCatalog catalog_for_estimate(const ApplicationSpec& spec, const std::string& path) {
    if (!path.empty()) return load_offers(path);
    OfferCatalog cat;
    cat.dimensions = spec.dimensions;
    VMOffer o;
    o.offer_id = 1;
    // summed so that even a fully merged hyper-component still fits
    o.capacity.assign(spec.dimensions.size(), 0);
    for (const auto& c : spec.components)
        for (std::size_t h = 0; h < c.requirements.size(); ++h)
            o.capacity[h] += c.requirements[h];
    o.price = 1;
    cat.offers.push_back(o);
    return cat;
}

std::string fv_mode_name(FvMode m) {
    return m == FvMode::Full ? "full" : "conservative";
}

struct CommonOpts {
    std::string strategy = "none";
    std::string fv_mode;  // empty = automatic
    std::int64_t timeout_s = 2400;
    std::string backend = "builtin";
    int threads = 1;
    std::string external_cmd;
    bool smt_no_opt = false;
    std::int64_t machines = 0;  // 0 = use the estimate
    std::int64_t min_wp = 0;    // 0 = leave the spec alone

    PipelineOptions to_pipeline() const {
        PipelineOptions po;
        po.strategy = strategy_from_name(strategy);
        if (!fv_mode.empty())
            po.fv_mode = fv_mode == "full" ? FvMode::Full : FvMode::Conservative;
        po.timeout_ms = timeout_s * 1000;
        po.threads = threads;
        po.backend = backend == "smt" ? Backend::Smt : Backend::Builtin;
        po.external_cmd = external_cmd;
        if (po.external_cmd.empty())
            if (const char* env = std::getenv("DEPLOYOPT_EXTERNAL_SOLVER"))
                po.external_cmd = env;
        po.smt_no_opt = smt_no_opt;
        if (machines > 0) po.machine_count = std::size_t(machines);
        return po;
    }
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_solver_opts) {
    cmd->add_option("--strategy", o.strategy, "Symmetry-breaking strategy")
        ->check(CLI::IsMember({"none", "pr", "lx", "prlx", "fv", "fvpr", "fvlx",
                               "tpr", "tlx"}));
    cmd->add_option("--fv-mode", o.fv_mode, "Value-fixing width mode")
        ->check(CLI::IsMember({"full", "conservative"}));
    cmd->add_option("--machines", o.machines, "Override the estimated machine count");
    cmd->add_option("--min-wordpress-instances", o.min_wp,
                    "Minimum instance count for the component named 'Wordpress'")
        ->check(CLI::Range(std::int64_t(1), std::int64_t(64)));
    if (with_solver_opts) {
        cmd->add_option("--timeout", o.timeout_s, "Solve timeout in seconds");
        cmd->add_option("--backend", o.backend, "Solver backend")
            ->check(CLI::IsMember({"builtin", "smt"}));
        cmd->add_option("--threads", o.threads, "Worker threads for the builtin solver");
        cmd->add_option("--external", o.external_cmd,
                        "External solver command template with {file} placeholder "
                        "(default: $DEPLOYOPT_EXTERNAL_SOLVER)");
        cmd->add_flag("--no-opt", o.smt_no_opt,
                      "Emit plain SMT with a cost bound and binary-search instead "
                      "of the (minimize ...) extension");
    }
}

ApplicationSpec load_spec_adjusted(const std::string& path, const CommonOpts& o) {
    ApplicationSpec spec = load_spec(path);
    if (o.min_wp > 0) apply_min_instances(spec, o.min_wp);
    return spec;
}

int cmd_estimate(const std::string& spec_path, const std::string& offers_path,
                 const CommonOpts& o) {
    ApplicationSpec spec = load_spec_adjusted(spec_path, o);
    OfferCatalog cat = catalog_for_estimate(spec, offers_path);
    ValidatedSpec vspec = validate_spec(spec, cat);
    // the machine bound is computed over hyper-components, exactly as the
    // planning pipeline sees the problem
    MergeResult merge = merge_colocated(vspec, cat);
    InstanceEstimate est = estimate_instances(merge.merged);
    json out;
    out["nu"] = json::object();
    for (std::size_t i = 0; i < est.nu.size(); ++i)
        out["nu"][merge.merged.spec.components[i].name] = est.nu[i];
    out["m_upper"] = est.m_upper;
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_analyze(const std::string& spec_path, const std::string& offers_path,
                const CommonOpts& o) {
    ApplicationSpec spec = load_spec_adjusted(spec_path, o);
    OfferCatalog cat = load_offers(offers_path);
    ValidatedSpec vspec = validate_spec(spec, cat);
    PipelineOptions po = o.to_pipeline();
    Analysis an = analyze_problem(vspec, cat, po);
    const auto& comps = an.merge.merged.spec.components;

    std::cout << "problem: " << spec.name << "\n";
    if (!an.merge.groups.empty()) {
        std::cout << "co-location groups:\n";
        for (const auto& [rep, members] : an.merge.groups) {
            std::cout << "  " << vspec.spec.by_id(rep).name << " <-";
            for (int id : members) std::cout << " " << vspec.spec.by_id(id).name;
            std::cout << "\n";
        }
    }
    std::cout << "components after merge: " << comps.size() << "\n";
    std::cout << "estimated instances:";
    for (std::size_t i = 0; i < comps.size(); ++i)
        std::cout << " " << comps[i].name << "=" << an.estimate.nu[i];
    std::cout << "\nmachine count: " << an.machine_count << "\n";

    std::cout << "maximal conflict cliques:\n";
    for (const auto& c : an.cliques) {
        std::cout << "  {";
        for (std::size_t q = 0; q < c.size(); ++q)
            std::cout << (q ? ", " : "") << comps[c[q]].name;
        std::cout << "}\n";
    }
    std::cout << "selected clique: {";
    for (std::size_t q = 0; q < an.selected_clique.size(); ++q)
        std::cout << (q ? ", " : "") << comps[an.selected_clique[q]].name;
    std::cout << "}\nfv mode: " << fv_mode_name(an.fv_mode) << "\n";

    std::cout << "strategy " << o.strategy << ": " << an.breakers.chains.size()
              << " ordering chain(s), " << an.breakers.fixed.fixed_count() << "/"
              << an.total_cells << " assignment cells fixed\n";
    if (an.breakers.fixed.fixed_count() > 0) {
        std::cout << "fixed-cell table (rows = components, columns = machines):\n";
        for (std::size_t i = 0; i < comps.size(); ++i) {
            std::cout << "  " << comps[i].name << ": ";
            for (std::size_t k = 0; k < an.machine_count; ++k) {
                int v = an.breakers.fixed.value_at(i, k);
                std::cout << (v < 0 ? "." : v ? "1" : "0");
            }
            std::cout << "\n";
        }
    }

    ConstraintIR ir = build_pipeline_ir(an, cat);
    std::cout << "constraint rows by family:\n";
    for (const auto& [fam, count] : ir.family_counts())
        std::cout << "  " << family_name(fam) << ": " << count << "\n";
    return kExitOk;
}

int status_exit(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return kExitOk;
        case SolveStatus::Infeasible: return kExitInfeasible;
        default: return kExitTimeout;
    }
}

int cmd_plan(const std::string& spec_path, const std::string& offers_path,
             const CommonOpts& o, const std::string& out_path) {
    ApplicationSpec spec = load_spec_adjusted(spec_path, o);
    OfferCatalog cat = load_offers(offers_path);
    PipelineOptions po = o.to_pipeline();
    PipelineResult res = run_pipeline(spec, cat, po);

    std::ostream& human = out_path.empty() ? std::cerr : std::cout;
    human << "status: " << solve_status_name(res.status) << "\n";
    if (res.has_plan) {
        human << "objective (micro-units/h): " << res.objective << "\n"
              << "machines occupied: " << res.plan.machines_occupied() << " of "
              << res.analysis.machine_count << "\n"
              << "instances deployed: " << res.plan.instances_deployed() << "\n"
              << "constraint check: " << (res.report.passed ? "passed" : "FAILED")
              << "\n";
    }
    human << "nodes explored: " << res.stats.nodes_explored << ", time: "
          << res.stats.time_ms << " ms\n";

    if (res.has_plan) {
        PlanDocument doc;
        doc.plan = res.plan;
        doc.problem = spec.name;
        doc.strategy = o.strategy;
        doc.status = solve_status_name(res.status);
        doc.colocation_groups = res.analysis.merge.groups;
        std::string text = plan_to_json(doc);
        if (out_path.empty()) {
            std::cout << text << "\n";
        } else {
            std::ofstream f(out_path);
            f << text << "\n";
        }
    }
    return status_exit(res.status);
}

int cmd_check(const std::string& spec_path, const std::string& offers_path,
              const std::string& plan_path, const CommonOpts& o) {
    ApplicationSpec spec = load_spec_adjusted(spec_path, o);
    OfferCatalog cat = load_offers(offers_path);
    ValidatedSpec vspec = validate_spec(spec, cat);
    std::ifstream f(plan_path);
    if (!f) throw ParseError("cannot open plan file " + plan_path);
    std::stringstream ss;
    ss << f.rdbuf();
    PlanDocument doc = parse_plan_json(ss.str());
    ValidationReport report = check_plan(vspec, cat, doc.plan);
    for (const auto& fam : report.families) {
        std::cout << fam.family << ": " << (fam.passed ? "ok" : "VIOLATED") << "\n";
        for (const auto& off : fam.offenses) std::cout << "  " << off << "\n";
    }
    std::cout << "recomputed price: " << report.recomputed_price << "\n"
              << (report.passed ? "plan is feasible" : "plan violates constraints")
              << "\n";
    return report.passed ? kExitOk : kExitCheckFailed;
}

int cmd_emit_smt(const std::string& spec_path, const std::string& offers_path,
                 const CommonOpts& o, const std::string& out_path,
                 std::optional<std::int64_t> cost_bound) {
    ApplicationSpec spec = load_spec_adjusted(spec_path, o);
    OfferCatalog cat = load_offers(offers_path);
    ValidatedSpec vspec = validate_spec(spec, cat);
    PipelineOptions po = o.to_pipeline();
    Analysis an = analyze_problem(vspec, cat, po);
    ConstraintIR ir = build_pipeline_ir(an, cat);
    lower_h_terms(ir);
    EmitOptions eo;
    eo.minimize = !o.smt_no_opt;
    eo.cost_bound = cost_bound;
    std::string text = emit_smtlib(ir, eo);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        f << text;
    }
    return kExitOk;
}

// ---- bench ----

struct BenchRow {
    std::string problem;
    std::size_t offer_count = 0;
    std::string strategy;
    std::string fv_mode;
    std::string status;
    std::int64_t objective = 0;
    std::int64_t time_ms = 0;
    std::int64_t nodes = 0;
    std::size_t fixed_cells = 0;
    std::int64_t m_estimated = 0;
    std::int64_t m_occupied = 0;
    std::int64_t instances_deployed = 0;
};

const char* kBenchHeader =
    "problem,offer_count,strategy,fv_mode,status,objective,time_ms,nodes,"
    "fixed_cells,m_estimated,m_occupied,instances_deployed";

std::string to_csv(const BenchRow& r) {
    std::ostringstream s;
    s << r.problem << ',' << r.offer_count << ',' << r.strategy << ',' << r.fv_mode
      << ',' << r.status << ',' << r.objective << ',' << r.time_ms << ',' << r.nodes
      << ',' << r.fixed_cells << ',' << r.m_estimated << ',' << r.m_occupied << ','
      << r.instances_deployed;
    return s.str();
}

struct BenchCell {
    std::string problem;
    std::string spec_path;
    std::string offers_path;
    std::size_t offer_count = 0;
    std::string strategy;
    std::int64_t min_wp = 0;
};

int cmd_bench(const std::string& matrix_path, const std::string& out_path,
              int workers, const CommonOpts& common) {
    std::ifstream f(matrix_path);
    if (!f) throw ParseError("cannot open matrix file " + matrix_path);
    json m;
    try {
        m = json::parse(f);
    } catch (const json::exception& e) {
        throw ParseError(std::string("matrix file: ") + e.what());
    }

    std::string fixture_dir = m.value("fixture_dir", std::string("fixtures"));
    std::vector<std::string> problems = m.value("problems", std::vector<std::string>{});
    std::vector<int> offer_counts = m.value("offer_counts", std::vector<int>{});
    std::vector<std::string> strategies =
        m.value("strategies", std::vector<std::string>{"none", "pr", "lx", "prlx",
                                                       "fv", "fvpr", "fvlx"});
    std::vector<int> wp_rows = m.value("min_wordpress_instances", std::vector<int>{});
    std::int64_t timeout_ms = m.value("timeout_s", common.timeout_s) * 1000;

    std::vector<BenchCell> cells;
    for (const auto& p : problems)
        for (int oc : offer_counts) {
            std::vector<std::int64_t> wp_variants{0};
            if (p == "wordpress" && !wp_rows.empty())
                wp_variants.assign(wp_rows.begin(), wp_rows.end());
            for (std::int64_t wp : wp_variants)
                for (const auto& s : strategies) {
                    BenchCell c;
                    c.problem = wp > 0 ? p + "-min" + std::to_string(wp) : p;
                    c.spec_path = fixture_dir + "/" + p + ".json";
                    c.offers_path =
                        fixture_dir + "/offers-" + std::to_string(oc) + ".json";
                    c.offer_count = std::size_t(oc);
                    c.strategy = s;
                    c.min_wp = wp;
                    cells.push_back(std::move(c));
                }
        }

    std::vector<BenchRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mu;
    auto body = [&] {
        while (true) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) break;
            const BenchCell& c = cells[idx];
            BenchRow& r = rows[idx];
            r.problem = c.problem;
            r.offer_count = c.offer_count;
            r.strategy = c.strategy;
            try {
                ApplicationSpec spec = load_spec(c.spec_path);
                if (c.min_wp > 0) apply_min_instances(spec, c.min_wp);
                OfferCatalog cat = load_offers(c.offers_path);
                PipelineOptions po;
                po.strategy = strategy_from_name(c.strategy);
                po.timeout_ms = timeout_ms;
                PipelineResult res = run_pipeline(spec, cat, po);
                r.fv_mode = fv_mode_name(res.analysis.fv_mode);
                r.status = solve_status_name(res.status);
                r.objective = res.has_plan ? res.objective : 0;
                r.time_ms = res.stats.time_ms;
                r.nodes = res.stats.nodes_explored;
                r.fixed_cells = res.analysis.breakers.fixed.fixed_count();
                r.m_estimated = std::int64_t(res.analysis.machine_count);
                r.m_occupied = res.has_plan ? res.plan.machines_occupied() : 0;
                r.instances_deployed = res.has_plan ? res.plan.instances_deployed() : 0;
            } catch (const std::exception& e) {
                r.status = std::string("error:") + e.what();
            }
            std::lock_guard<std::mutex> lock(log_mu);
            std::cerr << "[" << idx + 1 << "/" << cells.size() << "] " << to_csv(r)
                      << "\n";
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, workers); ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << kBenchHeader << "\n";
    for (const auto& r : rows) csv << to_csv(r) << "\n";
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        out << csv.str();
    }

    // strategies must agree on the objective for each (problem, offer_count)
    bool mismatch = false;
    std::map<std::pair<std::string, std::size_t>, std::int64_t> seen;
    for (const auto& r : rows) {
        if (r.status != "optimal") continue;
        auto key = std::make_pair(r.problem, r.offer_count);
        auto [it, inserted] = seen.emplace(key, r.objective);
        if (!inserted && it->second != r.objective) {
            std::cerr << "objective mismatch for " << r.problem << "/"
                      << r.offer_count << ": " << it->second << " vs " << r.objective
                      << " (" << r.strategy << ")\n";
            mismatch = true;
        }
    }
    return mismatch ? kExitCheckFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum-cost deployment of component-based applications onto "
                 "VM offer catalogs"};
    app.require_subcommand(1);

    std::string spec_path, offers_path, plan_path, out_path, matrix_path;
    std::optional<std::int64_t> cost_bound;
    int bench_workers = 1;
    CommonOpts o;

    CLI::App* est = app.add_subcommand("estimate", "Instance-count estimate and "
                                                   "machine upper bound");
    est->add_option("spec", spec_path, "Application spec JSON")->required();
    est->add_option("--offers", offers_path, "Offer catalog JSON (optional)");
    add_common(est, o, false);

    CLI::App* ana = app.add_subcommand("analyze", "Cliques, value fixing, and "
                                                  "constraint-family counts");
    ana->add_option("spec", spec_path)->required();
    ana->add_option("offers", offers_path)->required();
    add_common(ana, o, false);

    CLI::App* plan = app.add_subcommand("plan", "Compute a minimum-cost deployment");
    plan->add_option("spec", spec_path)->required();
    plan->add_option("offers", offers_path)->required();
    plan->add_option("--out", out_path, "Write the plan JSON here");
    add_common(plan, o, true);

    CLI::App* chk = app.add_subcommand("check", "Re-validate a plan JSON");
    chk->add_option("spec", spec_path)->required();
    chk->add_option("offers", offers_path)->required();
    chk->add_option("plan", plan_path)->required();
    add_common(chk, o, false);

    CLI::App* emit = app.add_subcommand("emit-smt", "Write the SMT-LIB2 encoding");
    emit->add_option("spec", spec_path)->required();
    emit->add_option("offers", offers_path)->required();
    emit->add_option("--out", out_path, "Output file (default stdout)");
    emit->add_option("--cost-bound", cost_bound, "Assert cost <= bound (with --no-opt)");
    emit->add_flag("--no-opt", o.smt_no_opt,
                   "Declare a cost variable instead of (minimize ...)");
    add_common(emit, o, false);

    CLI::App* bench = app.add_subcommand("bench", "Run the benchmark matrix to CSV");
    bench->add_option("matrix", matrix_path, "Matrix JSON")->required();
    bench->add_option("--out", out_path, "CSV output file (default stdout)");
    bench->add_option("--workers", bench_workers, "Parallel bench rows");
    bench->add_option("--timeout", o.timeout_s, "Per-cell timeout in seconds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (est->parsed()) return cmd_estimate(spec_path, offers_path, o);
        if (ana->parsed()) return cmd_analyze(spec_path, offers_path, o);
        if (plan->parsed()) return cmd_plan(spec_path, offers_path, o, out_path);
        if (chk->parsed()) return cmd_check(spec_path, offers_path, plan_path, o);
        if (emit->parsed())
            return cmd_emit_smt(spec_path, offers_path, o, out_path, cost_bound);
        if (bench->parsed()) return cmd_bench(matrix_path, out_path, bench_workers, o);
    } catch (const SmtError& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return e.code() == "ExternalUnavailable" ? kExitExternalUnavailable
                                                 : kExitParse;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ValidationError& e) {
        std::cerr << "validation error [" << e.code() << "]: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitOk;
}
