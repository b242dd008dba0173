#ifndef DEPLOYOPT_CONFGRAPH_HPP
#define DEPLOYOPT_CONFGRAPH_HPP

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "deployopt/model.hpp"

namespace deployopt {

// Undirected graph over component indices with an edge per conflict pair.
struct ConflictGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::uint8_t>> adj;

    explicit ConflictGraph(std::size_t nodes = 0)
        : n(nodes), adj(nodes, std::vector<std::uint8_t>(nodes, 0)) {}

    static ConflictGraph from_spec(const ValidatedSpec& spec);

    void add_edge(std::size_t a, std::size_t b) {
        adj[a][b] = adj[b][a] = 1;
    }
    bool edge(std::size_t a, std::size_t b) const { return adj[a][b] != 0; }
    std::size_t degree(std::size_t v) const;
};

// All maximal cliques, each sorted ascending, the list sorted
// lexicographically. Deterministic for a given graph.
std::vector<std::vector<std::size_t>> enumerate_maximal_cliques(const ConflictGraph& g);

// The clique whose members' combined instance count is largest; ties go to
// the lexicographically smallest member list. nu is indexed like the graph.
std::vector<std::size_t> select_clique(
    const std::vector<std::vector<std::size_t>>& cliques,
    const std::vector<std::int64_t>& nu);

enum class FvMode { Full, Conservative };

// Full mode pins every estimated instance of each clique member. That is
// unsafe when an explicit instance bound could be broken by pinning, so the
// default drops to one pinned instance per member in that case.
FvMode choose_fv_mode(const ValidatedSpec& spec, const std::vector<std::size_t>& clique);

class CliqueError : public std::runtime_error {
  public:
    CliqueError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

// Assignment cells pinned before search. Cells are (component index,
// machine index) pairs; machines_used is how many leading machines the
// pinned block occupies.
struct FixedCells {
    std::vector<std::pair<std::size_t, std::size_t>> ones;
    std::vector<std::pair<std::size_t, std::size_t>> zeros;
    std::size_t machines_used = 0;

    std::size_t fixed_count() const { return ones.size() + zeros.size(); }
    // -1 unknown, else the pinned value
    int value_at(std::size_t i, std::size_t k) const;
};

// Pins clique members onto disjoint leading machines: member q of the clique
// gets its instances (or one instance in conservative mode) on a fresh run
// of machines, every other clique cell in that block is zero, and components
// conflicting with a member are zeroed on that member's machines. Throws
// CliqueError("InsufficientMachines") if the block does not fit.
FixedCells fix_assignments(const std::vector<std::size_t>& clique,
                           const std::vector<std::int64_t>& nu,
                           std::size_t machine_count, FvMode mode,
                           const ConflictGraph& graph);

}  // namespace deployopt

#endif
