#ifndef DEPLOYOPT_IR_HPP
#define DEPLOYOPT_IR_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "deployopt/confgraph.hpp"
#include "deployopt/model.hpp"

namespace deployopt {

// Constraint families, used for reporting and for counting rows per family.
enum class Family {
    BasicAllocation,
    Occupancy,
    Capacity,
    Link,
    UnusedMachine,
    Conflict,
    Colocation,
    ExclusiveDeployment,
    RequireProvide,
    ExactRatio,
    FullDeployment,
    BoundInstances,
    ConditionalBound,
    FixedCell,
    SymmetryBreaking,
    IndicatorLink,  // rows produced by lowering step-function terms
};

const char* family_name(Family f);

enum class RowOp { Le, Ge, Eq };

struct Term {
    int var = 0;
    std::int64_t coef = 0;
};

struct LinRow {
    std::vector<Term> terms;
    RowOp op = RowOp::Le;
    std::int64_t rhs = 0;
    Family family = Family::BasicAllocation;
};

// if the guard row holds, every row in `then` must hold
struct Implication {
    LinRow guard;
    std::vector<LinRow> then;
    Family family = Family::Link;
};

// aux = 1 iff sum of vars > 0; `upper` bounds the sum for the lowering
struct Indicator {
    int aux = 0;
    std::vector<int> vars;
    std::int64_t upper = 1;
    Family family = Family::ExclusiveDeployment;
};

struct VarInfo {
    std::string name;
    std::int64_t lb = 0, ub = 1;
};

// An ordering imposed on consecutive machines of a chain. Produced by the
// symmetry-breaking generators and recorded in Meta so the solver can enforce
// the ordering natively while the equivalent rows serve the emitters.
struct Chain {
    enum class Kind {
        Price,            // p_k >= p_{k+1}
        Lex,              // column k >=_lex column k+1
        LexIfPriceEqual,  // lex order only between machines of equal price
        LoadIfTypeEqual,  // component count order between machines of equal type
        LexIfTypeEqual,   // lex order between machines of equal type
    };
    Kind kind = Kind::Price;
    std::vector<std::size_t> machines;  // strictly increasing

    bool operator==(const Chain&) const = default;
};

class IrError : public std::runtime_error {
  public:
    IrError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

// Integer-linear encoding of a deployment problem over a fixed machine
// count. Variable layout, in order: assignment cells a_{i,k}, machine types
// t_k, occupancy flags v_k, machine prices p_k, machine capacities r_{k,h},
// then any auxiliary binaries introduced for step-function terms.
struct ConstraintIR {
    std::size_t N = 0, M = 0, O = 0, H = 0;

    std::vector<VarInfo> vars;
    std::vector<LinRow> rows;
    std::vector<Implication> implications;
    std::vector<Indicator> indicators;
    bool lowered = false;

    std::vector<int> objective;  // minimized as a plain sum

    int a_var(std::size_t i, std::size_t k) const { return int(i * M + k); }
    int t_var(std::size_t k) const { return int(N * M + k); }
    int v_var(std::size_t k) const { return int(N * M + M + k); }
    int p_var(std::size_t k) const { return int(N * M + 2 * M + k); }
    int r_var(std::size_t k, std::size_t h) const {
        return int(N * M + 3 * M + k * H + h);
    }

    // data the branch-and-bound solver consumes directly instead of reading
    // the generic rows back
    struct Meta {
        std::vector<Component> components;  // in IR row order
        std::vector<VMOffer> offers;        // in type-value order (t = index+1)
        std::vector<std::pair<std::size_t, std::size_t>> conflicts;
        std::vector<std::pair<std::size_t, std::size_t>> colocates;
        std::vector<std::tuple<std::size_t, std::size_t, int>> fixed_cells;
        std::vector<std::size_t> optional_components;  // exclusive-set members
        std::vector<std::size_t> full_deploy;          // full-deployment components
        // instance-count constraints in source form, for count propagation
        std::vector<StructuralConstraint> counts;
        std::vector<Chain> chains;
        // true when no strategy rows or pinned cells distinguish machines
        bool columns_symmetric = true;
    } meta;

    std::map<Family, std::size_t> family_counts() const;
};

// fixed may be null (no pinned cells). Throws IrError("EmptyCatalog") when
// there is no offer to choose from.
ConstraintIR build_ir(const ValidatedSpec& spec, const OfferCatalog& catalog,
                      std::size_t machine_count, const FixedCells* fixed = nullptr);

// Replaces every step-function indicator with two linear rows
// (sum >= aux, sum <= upper * aux) so only linear rows remain.
void lower_h_terms(ConstraintIR& ir);

// Human-readable dump, stable across runs, used by golden tests.
std::string ir_to_text(const ConstraintIR& ir);

}  // namespace deployopt

#endif
