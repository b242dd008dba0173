// Python bindings with a JSON-string surface: callers pass the same JSON
// documents the CLI consumes and receive JSON back, so the binding layer
// stays free of mirrored data classes.
#include <pybind11/pybind11.h>

#include <json.hpp>

#include "deployopt/json_io.hpp"
#include "deployopt/pipeline.hpp"
#include "deployopt/smtlib.hpp"

namespace py = pybind11;
using json = nlohmann::json;
using namespace deployopt;

namespace {

PipelineOptions options_from_json(const std::string& text) {
    PipelineOptions po;
    if (text.empty()) return po;
    json j = json::parse(text);
    po.strategy = strategy_from_name(j.value("strategy", std::string("none")));
    if (j.contains("fv_mode"))
        po.fv_mode = j["fv_mode"] == "full" ? FvMode::Full : FvMode::Conservative;
    po.timeout_ms = j.value("timeout_ms", po.timeout_ms);
    po.threads = j.value("threads", po.threads);
    if (j.value("backend", std::string("builtin")) == "smt") po.backend = Backend::Smt;
    po.external_cmd = j.value("external_cmd", std::string());
    po.smt_no_opt = j.value("smt_no_opt", false);
    if (j.contains("machine_count"))
        po.machine_count = j["machine_count"].get<std::size_t>();
    return po;
}

json analysis_to_json(const Analysis& an) {
    json a;
    a["machine_count"] = an.machine_count;
    a["m_upper"] = an.estimate.m_upper;
    a["nu"] = json::object();
    const auto& comps = an.merge.merged.spec.components;
    for (std::size_t i = 0; i < comps.size(); ++i)
        a["nu"][comps[i].name] = an.estimate.nu[i];
    a["cliques"] = an.cliques;
    a["selected_clique"] = an.selected_clique;
    a["fv_mode"] = an.fv_mode == FvMode::Full ? "full" : "conservative";
    a["fixed_cells"] = an.breakers.fixed.fixed_count();
    a["total_cells"] = an.total_cells;
    return a;
}

std::string py_estimate(const std::string& spec_json, const std::string& offers_json) {
    ApplicationSpec spec = parse_spec_json(spec_json);
    OfferCatalog cat = parse_offers_json(offers_json);
    ValidatedSpec vspec = validate_spec(spec, cat);
    MergeResult merge = merge_colocated(vspec, cat);
    InstanceEstimate est = estimate_instances(merge.merged);
    json out;
    out["nu"] = json::object();
    for (std::size_t i = 0; i < est.nu.size(); ++i)
        out["nu"][merge.merged.spec.components[i].name] = est.nu[i];
    out["m_upper"] = est.m_upper;
    return out.dump();
}

std::string py_analyze(const std::string& spec_json, const std::string& offers_json,
                       const std::string& options_json) {
    ApplicationSpec spec = parse_spec_json(spec_json);
    OfferCatalog cat = parse_offers_json(offers_json);
    ValidatedSpec vspec = validate_spec(spec, cat);
    Analysis an = analyze_problem(vspec, cat, options_from_json(options_json));
    return analysis_to_json(an).dump();
}

std::string py_plan(const std::string& spec_json, const std::string& offers_json,
                    const std::string& options_json) {
    ApplicationSpec spec = parse_spec_json(spec_json);
    OfferCatalog cat = parse_offers_json(offers_json);
    PipelineOptions po = options_from_json(options_json);
    PipelineResult res;
    {
        py::gil_scoped_release release;
        res = run_pipeline(spec, cat, po);
    }
    json out;
    out["status"] = solve_status_name(res.status);
    out["objective"] = res.objective;
    out["analysis"] = analysis_to_json(res.analysis);
    out["nodes"] = res.stats.nodes_explored;
    out["time_ms"] = res.stats.time_ms;
    if (res.has_plan) {
        PlanDocument doc;
        doc.plan = res.plan;
        doc.problem = spec.name;
        doc.strategy = strategy_name(po.strategy);
        doc.status = solve_status_name(res.status);
        doc.colocation_groups = res.analysis.merge.groups;
        out["plan"] = json::parse(plan_to_json(doc));
        out["check_passed"] = res.report.passed;
    }
    return out.dump();
}

std::string py_check(const std::string& spec_json, const std::string& offers_json,
                     const std::string& plan_json) {
    ApplicationSpec spec = parse_spec_json(spec_json);
    OfferCatalog cat = parse_offers_json(offers_json);
    ValidatedSpec vspec = validate_spec(spec, cat);
    PlanDocument doc = parse_plan_json(plan_json);
    ValidationReport report = check_plan(vspec, cat, doc.plan);
    json out;
    out["passed"] = report.passed;
    out["recomputed_price"] = report.recomputed_price;
    out["families"] = json::array();
    for (const auto& fam : report.families)
        out["families"].push_back(
            {{"family", fam.family}, {"passed", fam.passed}, {"offenses", fam.offenses}});
    return out.dump();
}

std::string py_emit_smtlib(const std::string& spec_json, const std::string& offers_json,
                           const std::string& options_json) {
    ApplicationSpec spec = parse_spec_json(spec_json);
    OfferCatalog cat = parse_offers_json(offers_json);
    ValidatedSpec vspec = validate_spec(spec, cat);
    PipelineOptions po = options_from_json(options_json);
    Analysis an = analyze_problem(vspec, cat, po);
    ConstraintIR ir = build_pipeline_ir(an, cat);
    lower_h_terms(ir);
    EmitOptions eo;
    eo.minimize = !po.smt_no_opt;
    return emit_smtlib(ir, eo);
}

}  // namespace

PYBIND11_MODULE(_deployopt, m) {
    m.doc() = "Minimum-cost deployment of component-based applications onto VM "
              "offer catalogs";
    m.def("estimate", &py_estimate, py::arg("spec_json"), py::arg("offers_json"),
          "Instance-count estimate and machine upper bound as JSON");
    m.def("analyze", &py_analyze, py::arg("spec_json"), py::arg("offers_json"),
          py::arg("options_json") = "",
          "Cliques, value fixing, and machine count as JSON");
    m.def("plan", &py_plan, py::arg("spec_json"), py::arg("offers_json"),
          py::arg("options_json") = "", "Solve for a minimum-cost deployment");
    m.def("check", &py_check, py::arg("spec_json"), py::arg("offers_json"),
          py::arg("plan_json"), "Re-validate a plan document");
    m.def("emit_smtlib", &py_emit_smtlib, py::arg("spec_json"),
          py::arg("offers_json"), py::arg("options_json") = "",
          "SMT-LIB2 rendering of the constraint model");
}
