#pragma once

#include "egcnet/chain.hpp"

#include <string>
#include <vector>

namespace egcnet {

/// Stochasticity tolerance for computed transition matrices.
inline constexpr double kPhiTol = 1e-10;

/// State transition matrix Phi(t, tau): the row-stochastic linear map
/// carrying opinions at tau to opinions at t.
struct TransitionMatrix {
  Matrix matrix;
  double t = 0.0;
  double tau = 0.0;
  TimeMode mode = TimeMode::Continuous;
  /// Number of rows renormalized because of row-sum drift beyond kPhiTol.
  int renormalizations = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
};

struct LimitPhiResult {
  TransitionMatrix phi;               // at the last horizon
  std::vector<double> horizons;
  std::vector<double> deltas;         // max-norm change between consecutive horizons
};

/// Phi(t, tau). Continuous: ordered product of segment exponentials over
/// [tau, t] with partial durations at the ends. Discrete: product
/// A(t-1)...A(tau); the empty product is the identity.
TransitionMatrix phi(const Chain& chain, double t, double tau);

/// states[k] = Phi(sample_times[k], t0) x0. sample_times must be
/// increasing and start at t0.
Trajectory simulate(const Chain& chain, const Vector& x0, double t0,
                    const std::vector<double>& sample_times);

/// Phi at the last horizon plus max-norm deltas between consecutive
/// horizons. Limit detection is the caller's judgement; this only
/// reports the evidence.
LimitPhiResult limit_phi(const Chain& chain, double tau,
                         const std::vector<double>& horizon_schedule);

/// Doubling horizons from past the prefix out to at least four tail
/// periods (or twice the prefix span for zero tails).
std::vector<double> default_horizon_schedule(const Chain& chain, double tau);

/// CSV export, header "t,x1,...,xN", full double precision.
std::string trajectory_to_csv(const Trajectory& traj);

}  // namespace egcnet
