#pragma once

#include "egcnet/chain.hpp"
#include "egcnet/rank.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace egcnet {

/// Pivot threshold for accepting a basis row as independent during
/// coalition extraction.
inline constexpr double kPivotTol = 1e-8;

/// A smallest steering coalition: the agents (0-based here, 1-based in
/// all file formats) that can force consensus on any target by choosing
/// their own initial opinions.
struct Coalition {
  std::vector<int> members;          // S, sorted ascending
  std::vector<int> complement_rows;  // V \ S, rows of the basis, sorted
  NullSpaceBasis basis;
  double tau = 0.0;
  double condition_number = 1.0;  // of the complement submatrix
  /// "vertices": one representative agent per limit-polytope vertex;
  /// "greedy_rows": ascending-index greedy row selection fallback.
  std::string selection = "vertices";
};

struct SteeringPlan {
  double target = 0.0;
  std::map<int, double> fixed_opinions;      // V \ S
  std::map<int, double> coalition_opinions;  // S
  Vector predicted_limit;
  /// Distance of the assembled x(t0) - target*1 from span(basis).
  double residual = 0.0;
};

struct IllConditionedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Extracts a smallest EGC from the chain's null-space basis at tau.
/// Prefers one representative per stabilized limit-polytope vertex (the
/// vertices are in one-to-one correspondence with a smallest coalition);
/// falls back to greedy ascending-index row selection when the vertex
/// route does not yield an invertible complement. Deterministic.
/// Refuses (NotConvergedError) when the rank diagnostic did not converge.
Coalition smallest_egc(const Chain& chain, double tau);

/// As above but reusing an existing rank report.
Coalition smallest_egc(const Chain& chain, double tau, const RankReport& report);

/// Solves for the coalition's initial opinions that steer the network to
/// `target` given the other agents' fixed opinions. fixed_opinions must
/// cover exactly V \ S.
SteeringPlan steer(const Chain& chain, const Coalition& coalition, double target,
                   const std::map<int, double>& fixed_opinions);

/// Monte-Carlo falsification of the EGC property for a candidate set:
/// random fixed opinions, least-squares steering restricted to the
/// candidate's rows, simulation to the horizon. Returns false on the
/// first failure. True means "not falsified", never a proof.
bool verify_egc(const Chain& chain, const std::vector<int>& candidate, double tau,
                int trials, double target, double horizon, double tol,
                std::uint64_t seed = 2024);

}  // namespace egcnet
