#pragma once

#include "egcnet/chain.hpp"
#include "egcnet/geometry.hpp"

#include <string>
#include <vector>

namespace egcnet {

/// Stochastic row vectors pi(t), t in [0, T], satisfying the backward
/// identity pi'(t+1) A(t) = pi'(t).
struct AbsoluteProbabilitySequence {
  std::vector<Vector> pis;  // index t = 0..T
  std::string terminal_rule = "uniform";
  int horizon = 0;
};

/// A time-indexed sequence of agent subsets.
struct Jet {
  std::vector<std::vector<int>> sets;  // sets[t], members sorted ascending

  bool proper(int n) const;
  static Jet constant(const std::vector<int>& s, int horizon);
};

struct JetDecomposition {
  /// jets[0] is J^0 (vanishing mass); jets[1..c] are the proper jets.
  std::vector<Jet> jets;
  /// mass[k][t] = sum of pi_i(t) over i in jets[k].sets[t].
  std::vector<std::vector<double>> mass;
  /// Probe-based per-jet limit estimates (jets 1..c; entry 0 unused).
  std::vector<double> x_star;
  std::vector<double> x_star_spread;
  /// Truncated pairwise flows V(J^s, J^k), indexed like `jets`.
  Matrix flow;
  int horizon = 0;
  int t_mid = 0;  // where the vanishing-mass criterion was evaluated
  bool converged = true;
  std::vector<std::string> warnings;

  /// Number of jets excluding J^0.
  int count() const { return static_cast<int>(jets.size()) - 1; }
};

inline constexpr double kMassFloor = 1e-6;
inline constexpr double kFlowWarn = 10.0;
inline constexpr double kSlopeTol = 1e-8;

/// pi(T) uniform, propagated backward exactly. Discrete chains only.
AbsoluteProbabilitySequence absolute_probability_sequence(const Chain& chain, int horizon);

/// The reversed chain {P(t)}: p_ij(t) = pi_j(t+1) a_ji(t) / pi_i(t) when
/// pi_i(t) > 1e-14, otherwise a uniform row. Every P(t) is row-stochastic.
std::vector<Matrix> reversed_chain(const AbsoluteProbabilitySequence& aps,
                                   const Chain& chain);

/// Truncated total flow between two jets: sum over t of the r_ij mass
/// crossing between them in either direction, r_ij(t) = pi_j(t+1) a_ji(t).
double jet_flow(const Jet& jet_s, const Jet& jet_k,
                const AbsoluteProbabilitySequence& aps, const Chain& chain);

/// Truncated total influence of the complement on the jet:
/// sum_t sum_{i in J(t+1)} sum_{j not in J(t)} a_ij(t).
/// running_sum, when given, receives the partial sums per step.
double u_in(const Jet& jet, const Chain& chain, int horizon,
            std::vector<double>* running_sum = nullptr);

/// Desk-scale jet decomposition over [0, T]: clusters the rows of
/// Phi(T, t) per t, matches consecutive cross-sections by retained
/// pi-mass, extracts the vanishing-mass jet J^0, and reports per-jet
/// masses, probe limits and the truncated flow matrix. The number of
/// non-J^0 jets equals Rank(A) on converged instances.
JetDecomposition sonin_decomposition(const Chain& chain, int horizon,
                                     double tol_cluster = kClusterTol,
                                     double mass_floor = kMassFloor,
                                     const Vector* probe = nullptr);

/// Counts candidates (pairwise disjoint at every t) whose truncated U_in
/// is flat over the last half of the horizon: a certified-at-horizon
/// lower bound on Rank(A).
int jet_lower_bound(const Chain& chain, const std::vector<Jet>& candidate_jets,
                    int horizon, double slope_tol = kSlopeTol);

}  // namespace egcnet
