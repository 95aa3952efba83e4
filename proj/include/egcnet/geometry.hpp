#pragma once

#include "egcnet/chain.hpp"
#include "egcnet/transition.hpp"

#include <optional>
#include <string>
#include <vector>

namespace egcnet {

inline constexpr double kVertexTol = 1e-6;
inline constexpr double kClusterTol = 1e-3;
inline constexpr double kNestingTol = 1e-8;

/// The polytope C_{t,tau}: convex hull of the rows of Phi(t, tau)
/// (equivalently the columns of its transpose), each a stochastic vector.
struct PolytopeSnapshot {
  double t = 0.0;
  double tau = 0.0;
  std::vector<Vector> points;      // rows of Phi(t, tau), one per agent
  std::vector<int> vertex_indices; // agents whose point is a hull vertex
  int vertex_count = 0;
  /// Near-duplicate groups merged before vertex testing; lowest index kept.
  std::vector<std::vector<int>> merged_groups;
};

struct TraceEntry {
  double t = 0.0;
  int vertex_count = 0;
  /// kNestingTol minus the largest distance of a current point from the
  /// previous hull; >= 0 means the nesting property held at this step.
  double min_nesting_margin = 0.0;
};

struct VertexTrace {
  double tau = 0.0;
  std::vector<TraceEntry> entries;
  bool stabilized = false;  // equal counts at the last two horizons
  bool nesting_ok = true;
};

/// Partition of agents into ergodicity classes: agents whose Phi rows
/// asymptotically coincide (max norm).
struct ErgodicityClassing {
  std::vector<std::vector<int>> classes;
  bool converged = false;
  double horizon_used = 0.0;
};

/// Points = rows of Phi(t, tau); a point is a vertex iff it is not within
/// tol_vertex of the convex hull of the other (merged) points.
PolytopeSnapshot polytope_snapshot(const Chain& chain, double t, double tau,
                                   double tol_vertex = kVertexTol);

/// Vertex counts along the horizon schedule plus the Lemma-style nesting
/// check: every point of C_{t2,tau} must lie within kNestingTol of
/// conv(C_{t1,tau}) for consecutive horizons t1 < t2.
VertexTrace vertex_count_trace(const Chain& chain, double tau,
                               const std::vector<double>& horizon_schedule,
                               double tol_vertex = kVertexTol);

/// Single-linkage clustering of the rows of Phi(t, tau) at each horizon;
/// converged iff the partition is identical at the last two horizons.
ErgodicityClassing ergodicity_classes(const Chain& chain, double tau,
                                      const std::vector<double>& horizon_schedule,
                                      double tol_cluster = kClusterTol);

struct PStarResult {
  /// true / false / nullopt = inconclusive.
  std::optional<bool> in_class;
  double min_column_sum = 0.0;
};

/// Finite-horizon test for Class P*: minimum over the (t, tau) grid and
/// all j of the column sums of Phi(t, tau), combined with the structural
/// sufficient condition that every tail-block matrix has a positive
/// diagonal (automatic in continuous mode).
PStarResult class_pstar_check(const Chain& chain, const std::vector<double>& tau_grid,
                              double horizon, double threshold = 1e-3);

/// Trace CSV: "t,vertex_count,min_nesting_margin".
std::string trace_to_csv(const VertexTrace& trace);

}  // namespace egcnet
