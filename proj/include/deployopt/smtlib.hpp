#ifndef DEPLOYOPT_SMTLIB_HPP
#define DEPLOYOPT_SMTLIB_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "deployopt/ir.hpp"
#include "deployopt/model.hpp"

namespace deployopt {

class SmtError : public std::runtime_error {
  public:
    SmtError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

struct EmitOptions {
    // true emits the (minimize ...) objective extension; false declares a
    // cost variable instead so plain solvers can binary-search on cost_bound
    bool minimize = true;
    std::optional<std::int64_t> cost_bound;
};

// QF_LIA rendering of a lowered IR: one declaration plus one bounds
// assertion per variable, one assertion per row, one implication per guard.
// Output is byte-stable for a given IR. Throws SmtError("UnloweredIndicator")
// when step-function terms have not been lowered to rows.
std::string emit_smtlib(const ConstraintIR& ir, const EmitOptions& opts = {});

// Reads a (define-fun ...) model back into a plan. The price is recomputed
// from the chosen offers, every IR constraint is re-evaluated on the model
// values, and when spec/catalog are given the plan must pass check_plan.
// Throws SmtError("ModelParseError") / SmtError("ModelInconsistent").
DeploymentPlan parse_model(const std::string& solver_output, const ConstraintIR& ir,
                           const ValidatedSpec* spec = nullptr,
                           const OfferCatalog* catalog = nullptr);

// True when the output ends in an explicit unsat verdict.
bool model_reports_unsat(const std::string& solver_output);

// Runs `cmd_template` with "{file}" substituted, under a wall-clock limit.
// Returns captured stdout. Throws SmtError("ExternalUnavailable") when the
// command cannot be started or is not installed, SmtError("ExternalTimeout")
// on expiry.
std::string run_external(const std::string& cmd_template, const std::string& file,
                         std::int64_t timeout_ms = 2'400'000);

}  // namespace deployopt

#endif
