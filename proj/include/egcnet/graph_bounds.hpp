#pragma once

#include "egcnet/chain.hpp"

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace egcnet {

/// Interaction graphs derived structurally from the chain tail: an entry
/// recurring in the periodic tail has a divergent time integral; prefix
/// contributions are always finite.
struct InteractionGraph {
  enum class Kind { UnboundedDirected, InfiniteFlowUndirected };
  Kind kind = Kind::UnboundedDirected;
  int n = 0;
  /// Directed pairs (i, j) meaning i -> j; for the undirected graph the
  /// stored pair has i < j.
  std::set<std::pair<int, int>> edges;
};

/// Directed graph H1: edge (i, j) iff the total influence of i on j
/// diverges over infinite time.
InteractionGraph unbounded_interactions_graph(const Chain& chain);

/// Undirected graph H2: edge {i, j} iff the symmetrized total interaction
/// diverges.
InteractionGraph infinite_flow_graph(const Chain& chain);

struct SRoot {
  int size = 0;
  std::vector<int> witness;  // lowest-index node of each source component
};

/// Smallest s-root of H1: a minimum set of nodes from which every node is
/// reachable. Equals the number of source components of the SCC
/// condensation.
SRoot smallest_sroot(const InteractionGraph& h1);

/// Connected components of an undirected graph, sorted by smallest member.
std::vector<std::vector<int>> connected_components(const InteractionGraph& h2);

struct BoundsReport {
  int lower_sroot = 0;
  int lower_components_h2 = 0;     // h2
  int upper_n_minus_h2prime = 0;   // N - h2'
  std::optional<int> upper_ergodicity_classes;
  int rank = 0;
  bool rank_converged = true;
  bool all_consistent = true;
};

/// Evaluates every rank bound: h2 <= s-root size <= rank <= min(N - h2',
/// #ergodicity classes). Inconsistencies are reported, not thrown.
BoundsReport bounds_report(const Chain& chain, double tau);

/// Full-rank characterization. Continuous: the chain is l1-close to the
/// neutral chain (quiescent tail). Discrete: every tail-block matrix is a
/// permutation matrix within 1e-12.
bool full_rank_test(const Chain& chain);

/// DOT export with component coloring. H1 renders as digraph, H2 as graph.
std::string to_dot(const InteractionGraph& g);

}  // namespace egcnet
