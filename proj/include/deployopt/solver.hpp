#ifndef DEPLOYOPT_SOLVER_HPP
#define DEPLOYOPT_SOLVER_HPP

#include <cstdint>
#include <stdexcept>

#include "deployopt/ir.hpp"
#include "deployopt/model.hpp"

namespace deployopt {

enum class SolveStatus { Optimal, Infeasible, Timeout };

const char* solve_status_name(SolveStatus s);

struct SolveStats {
    std::int64_t nodes_explored = 0;
    std::int64_t time_ms = 0;
    std::int64_t incumbent_updates = 0;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    bool has_plan = false;  // true for Optimal, or Timeout with an incumbent
    DeploymentPlan plan;
    std::int64_t objective = 0;
    SolveStats stats;
};

class SolverError : public std::runtime_error {
  public:
    SolverError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

// Exact depth-first branch-and-bound over machine types and assignment
// columns. Deterministic for a fixed thread count; threads > 1 splits the
// top-level branches and shares the incumbent, objective unchanged.
SolveResult solve(const ConstraintIR& ir, std::int64_t timeout_ms = 2'400'000,
                  int threads = 1);

// Exhaustive oracle over every assignment matrix and type vector. Throws
// SolverError("SpaceTooLarge") above ~1e8 points.
SolveResult brute_force(const ConstraintIR& ir);

// Admissible completion bound for a partial schedule: given which components
// still need a machine, never exceeds the cheapest possible completion cost.
// Exposed for the oracle inequality tests.
std::int64_t lower_bound(const ConstraintIR& ir,
                         const std::vector<std::uint8_t>& component_unsatisfied,
                         std::size_t machines_left);

// Generic evaluation of every row, implication, and step indicator against a
// full variable valuation. Shared by the oracle and the leaf check.
bool point_feasible(const ConstraintIR& ir, const std::vector<std::int64_t>& vals);

}  // namespace deployopt

#endif
