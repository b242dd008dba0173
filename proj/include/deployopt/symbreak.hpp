#ifndef DEPLOYOPT_SYMBREAK_HPP
#define DEPLOYOPT_SYMBREAK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "deployopt/confgraph.hpp"
#include "deployopt/ir.hpp"
#include "deployopt/model.hpp"

namespace deployopt {

// TPR and TLX cover the type-guarded orderings; they are opt-in and not part
// of the six benchmarked strategies.
enum class Strategy { None, PR, LX, PRLX, FV, FVPR, FVLX, TPR, TLX };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);  // throws std::invalid_argument

struct BreakerSet {
    std::vector<Chain> chains;
    FixedCells fixed;
    // ordered partition of the machines, recorded for FVPR / FVLX
    std::vector<std::vector<std::size_t>> vm_sublists;

    bool empty() const {
        return chains.empty() && fixed.fixed_count() == 0;
    }
};

BreakerSet gen_pr(std::size_t machine_count);
BreakerSet gen_lx(std::size_t machine_count);
BreakerSet gen_prlx(std::size_t machine_count);
BreakerSet gen_tpr(std::size_t machine_count);
BreakerSet gen_tlx(std::size_t machine_count);

// Clique-based value fixing; an edgeless conflict graph yields an empty set.
BreakerSet gen_fv(const ValidatedSpec& spec, const std::vector<std::int64_t>& nu,
                  std::size_t machine_count, FvMode mode);
// gen_fv plus a price (or lex) chain inside each clique member's machine run
// and over the remaining machines.
BreakerSet gen_fvpr(const ValidatedSpec& spec, const std::vector<std::int64_t>& nu,
                    std::size_t machine_count, FvMode mode);
BreakerSet gen_fvlx(const ValidatedSpec& spec, const std::vector<std::int64_t>& nu,
                    std::size_t machine_count, FvMode mode);

BreakerSet make_breakers(Strategy strategy, const ValidatedSpec& spec,
                         const std::vector<std::int64_t>& nu,
                         std::size_t machine_count, FvMode mode);

// Materializes the breaker set into IR rows (family SymmetryBreaking, plus
// FixedCell rows for the pinned block). Throws
// IrError("IncompatibleBreakers") when a chain or cell is out of range.
void apply_breakers(ConstraintIR& ir, const BreakerSet& breakers);

}  // namespace deployopt

#endif
