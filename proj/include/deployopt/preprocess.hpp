#ifndef DEPLOYOPT_PREPROCESS_HPP
#define DEPLOYOPT_PREPROCESS_HPP

#include <map>
#include <stdexcept>
#include <vector>

#include "deployopt/model.hpp"

namespace deployopt {

class PreprocessError : public std::runtime_error {
  public:
    PreprocessError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

// Result of collapsing co-location groups into single hyper-components. The
// hyper-component keeps the smallest member id and the summed requirements;
// every other constraint is rewritten onto the representatives.
struct MergeResult {
    ValidatedSpec merged;
    std::map<int, int> id_map;  // original id -> representative id
    // non-trivial groups only: (representative id, all member ids)
    std::vector<std::pair<int, std::vector<int>>> groups;
};

// Throws PreprocessError("ColocatedConflict") when two components are forced
// both onto and off the same machines. The merged spec is re-validated, so a
// hyper-component too large for every offer surfaces as a ValidationError.
MergeResult merge_colocated(const ValidatedSpec& spec, const OfferCatalog& catalog);

// Expands a plan over the merged spec back to the original component set by
// duplicating each hyper-component row across its members.
DeploymentPlan expand_plan(const MergeResult& merge, const ValidatedSpec& original,
                           const DeploymentPlan& merged_plan);

}  // namespace deployopt

#endif
