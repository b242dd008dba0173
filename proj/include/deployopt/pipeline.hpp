#ifndef DEPLOYOPT_PIPELINE_HPP
#define DEPLOYOPT_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deployopt/estimator.hpp"
#include "deployopt/ir.hpp"
#include "deployopt/model.hpp"
#include "deployopt/preprocess.hpp"
#include "deployopt/solver.hpp"
#include "deployopt/symbreak.hpp"

namespace deployopt {

enum class Backend { Builtin, Smt };

struct PipelineOptions {
    Strategy strategy = Strategy::None;
    // empty: pick automatically (conservative when a clique member carries an
    // explicit instance bound, full otherwise)
    std::optional<FvMode> fv_mode;
    std::int64_t timeout_ms = 2'400'000;
    int threads = 1;
    Backend backend = Backend::Builtin;
    std::string external_cmd;  // "CMD {file}" template, Smt backend only
    bool smt_no_opt = false;   // binary-search on a cost bound instead of (minimize)
    std::optional<std::size_t> machine_count;  // override the estimated M
};

// Everything derived from the problem before search starts.
struct Analysis {
    MergeResult merge;
    InstanceEstimate estimate;  // over the merged components
    std::size_t machine_count = 0;
    std::vector<std::vector<std::size_t>> cliques;  // merged component indices
    std::vector<std::size_t> selected_clique;
    FvMode fv_mode = FvMode::Full;
    BreakerSet breakers;
    std::size_t total_cells = 0;  // merged N * M
};

struct PipelineResult {
    SolveStatus status = SolveStatus::Infeasible;
    bool has_plan = false;
    DeploymentPlan plan;  // expanded back to the original components
    std::int64_t objective = 0;
    SolveStats stats;
    Analysis analysis;
    ValidationReport report;  // check_plan over the original spec, when has_plan
};

// validate + merge + estimate + clique analysis + breaker generation.
Analysis analyze_problem(const ValidatedSpec& spec, const OfferCatalog& catalog,
                         const PipelineOptions& opts);

// Full run: analysis, IR construction, solving (built-in or external SMT),
// plan expansion, and an independent constraint check of the result.
PipelineResult run_pipeline(const ApplicationSpec& spec, const OfferCatalog& catalog,
                            const PipelineOptions& opts);

// The analysis IR with breakers applied; exposed for emit-smt and tests.
ConstraintIR build_pipeline_ir(const Analysis& analysis, const OfferCatalog& catalog);

}  // namespace deployopt

#endif
