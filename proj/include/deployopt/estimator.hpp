#ifndef DEPLOYOPT_ESTIMATOR_HPP
#define DEPLOYOPT_ESTIMATOR_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "deployopt/model.hpp"

namespace deployopt {

// Per-component instance counts and the machine-count upper bound derived
// from them. nu is ordered like ValidatedSpec::spec.components.
struct InstanceEstimate {
    std::vector<std::int64_t> nu;
    std::int64_t m_upper = 0;

    std::int64_t nu_for(const ValidatedSpec& spec, int component_id) const {
        return nu.at(spec.index_of(component_id));
    }
};

class EstimatorError : public std::runtime_error {
  public:
    EstimatorError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

// Minimizes the total instance count subject to the instance-count
// constraints only (require-provide, exact ratio, bounded instances,
// conditional bounds). Components default to at least one instance; members
// of exclusive-deployment sets are enumerated branch-by-branch with exactly
// one member deployed. Ties between optima go to the lexicographically
// smallest count vector.
InstanceEstimate estimate_instances(const ValidatedSpec& spec);

// Testing oracle: exhaustive enumeration over {0..bound}^N with the same
// feasibility filter. Must agree with estimate_instances whenever the true
// optimum fits under the bound.
InstanceEstimate solve_surrogate_bruteforce(const ValidatedSpec& spec, std::int64_t bound);

// True iff nu satisfies every constraint the surrogate problem considers.
bool surrogate_feasible(const ValidatedSpec& spec, const std::vector<std::int64_t>& nu);

}  // namespace deployopt

#endif
