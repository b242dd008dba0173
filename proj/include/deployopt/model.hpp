#ifndef DEPLOYOPT_MODEL_HPP
#define DEPLOYOPT_MODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace deployopt {

// Per-dimension hardware quantities. The dimension order is fixed per problem
// instance (declared once in ApplicationSpec::dimensions) and must match
// between components and offers.
using ResourceVector = std::vector<std::int64_t>;

using Money = std::int64_t;  // micro-currency-units per hour

struct Component {
    int id = 0;  // 1-based, unique within a spec
    std::string name;
    ResourceVector requirements;
};

struct VMOffer {
    int offer_id = 0;  // 1-based; 0 is reserved for "machine unused"
    ResourceVector capacity;
    Money price = 0;
};

struct OfferCatalog {
    std::vector<std::string> dimensions;
    std::vector<VMOffer> offers;

    std::size_t size() const { return offers.size(); }
    const VMOffer& by_id(int offer_id) const;
};

// --- structural constraints (one variant per constraint family) ---

enum class BoundOp { Eq, Le, Ge };

struct Conflict {
    int i = 0, j = 0;  // components must not share a machine
};
struct Colocate {
    int i = 0, j = 0;  // components must share every machine
};
struct ExclusiveDeploy {
    std::vector<int> components;  // exactly one of these is deployed
};
struct RequireProvide {
    int i = 0, j = 0;        // consumer, provider
    std::int64_t n = 1;      // i requires n instances of j
    std::int64_t m = 1;      // j serves at most m instances of i
};
struct ExactRatio {
    int i = 0, j = 0;        // one j instance per full set of n i-instances
    std::int64_t n = 1;
};
struct FullDeploy {
    int i = 0;  // deployed on every machine not hosting a conflicting component
};
struct BoundInstances {
    std::vector<int> components;
    BoundOp op = BoundOp::Ge;
    std::int64_t n = 0;
};
struct ConditionalBound {
    int guard = 0;  // bound applies only if the guard component is deployed
    std::vector<int> components;
    BoundOp op = BoundOp::Ge;
    std::int64_t n = 0;
};

using StructuralConstraint =
    std::variant<Conflict, Colocate, ExclusiveDeploy, RequireProvide, ExactRatio,
                 FullDeploy, BoundInstances, ConditionalBound>;

struct ApplicationSpec {
    std::string name;
    std::vector<std::string> dimensions;
    std::vector<Component> components;
    std::vector<StructuralConstraint> constraints;

    std::size_t component_count() const { return components.size(); }
    const Component& by_id(int id) const;
    std::optional<std::size_t> index_of(int id) const;
};

// The solver's answer: which component runs where, which offer each machine
// uses, and the resulting hourly price.
struct DeploymentPlan {
    std::vector<std::vector<std::uint8_t>> assignment;  // N x M
    std::vector<int> types;                             // M, offer_id or 0
    std::vector<std::uint8_t> occupancy;                // M
    Money total_price = 0;

    std::size_t machines() const { return types.size(); }
    std::int64_t instances_deployed() const;
    std::int64_t machines_occupied() const;
};

// --- validation ---

class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(std::string code, std::string what)
        : std::runtime_error(std::move(what)), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

// Spec that passed validate_spec. Components are ordered by id and all
// constraint cross-references are known to resolve.
struct ValidatedSpec {
    ApplicationSpec spec;

    std::size_t index_of(int id) const { return id_to_index.at(id); }
    bool has_id(int id) const { return id_to_index.count(id) != 0; }
    // ids of components that belong to some ExclusiveDeploy set
    bool in_exclusive_set(int id) const;

    std::map<int, std::size_t> id_to_index;
};

struct Violation {
    std::string code;     // e.g. DanglingComponentRef
    std::string message;  // human-readable, names indices involved
};

// Checks all type invariants plus that every component fits alone into at
// least one offer. Throws ValidationError on the first violation, or use
// collect_violations for the full list.
ValidatedSpec validate_spec(const ApplicationSpec& spec, const OfferCatalog& catalog);
std::vector<Violation> collect_violations(const ApplicationSpec& spec,
                                          const OfferCatalog& catalog);

// --- plan checking ---

struct FamilyReport {
    std::string family;
    bool passed = true;
    std::vector<std::string> offenses;
};

struct ValidationReport {
    bool passed = true;
    std::vector<FamilyReport> families;
    Money recomputed_price = 0;

    const FamilyReport* find(const std::string& family) const;
};

// Re-evaluates every general and application-specific constraint against the
// plan, independently of any solver encoding. Pure function.
ValidationReport check_plan(const ValidatedSpec& spec, const OfferCatalog& catalog,
                            const DeploymentPlan& plan);

}  // namespace deployopt

#endif
