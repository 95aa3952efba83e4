#pragma once

#include "egcnet/chain.hpp"
#include "egcnet/linalg.hpp"
#include "egcnet/transition.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace egcnet {

enum class RankMethod { ExactTI, ExactPeriodic, NumericalHorizon };

std::string to_string(RankMethod m);

/// Default absolute threshold on singular values of Phi(T, tau) for the
/// numerical null-space test. Phi has unit row sums and norm O(1), so an
/// absolute threshold is meaningful.
inline constexpr double kRankTol = 1e-6;

/// Margin used by the exact methods when classifying spectra against the
/// unit circle / zero.
inline constexpr double kSpectralMargin = 1e-10;

/// Orthonormal basis of Null_tau(A): directions v with
/// Phi(t, tau) v -> 0 as t -> infinity.
struct NullSpaceBasis {
  double tau = 0.0;
  Matrix basis;  // N x dim, orthonormal columns
  RankMethod method = RankMethod::NumericalHorizon;
  double tolerance = kRankTol;
  double horizon_used = 0.0;  // numerical method only
  bool converged = true;
  /// Sub-tolerance singular-value counts per horizon (numerical method).
  std::vector<int> subtol_counts;
  /// Singular values of Phi at the final horizon (numerical method).
  std::vector<double> singular_values_final;

  int dim() const { return static_cast<int>(basis.cols()); }
};

struct RankReport {
  int rank = 0;     // Rank(A) = N - Nullity(A), the limiting notion
  int nullity = 0;  // Nullity(A)
  /// dim(Null_tau) at the requested tau. Equals `nullity` in continuous
  /// mode; may exceed it in discrete mode for early tau.
  int null_dim_local = 0;
  double tau = 0.0;
  /// The tau at which the limiting nullity was evaluated (discrete mode:
  /// where the local dimension was observed to have stabilized).
  double nullity_tau = 0.0;
  NullSpaceBasis basis;  // basis of Null_tau at the requested tau
  std::vector<double> singular_values;  // numerical method only
  bool converged = true;
  /// max over basis columns of ||Phi(T, tau) v||_inf at the verification
  /// horizon T; should be < 10 * tolerance.
  double verification_residual = 0.0;
  double verification_horizon = 0.0;
};

struct NotConvergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// SVD of Phi(T, tau) at each horizon; null directions are right singular
/// vectors with singular value < tol. Converged iff the sub-tol count is
/// identical at the last two horizons and the bases agree to within
/// 1e-6 rad. Requires at least two horizons.
NullSpaceBasis nullspace_numerical(const Chain& chain, double tau, double tol,
                                   const std::vector<double>& horizon_schedule);

/// Exact rank for a time-invariant chain. Continuous: Rank(A) equals the
/// matrix nullity of the fixed intensity matrix; the chain null space is
/// its column span. Discrete: nullity is the total algebraic multiplicity
/// of eigenvalues strictly inside the unit disk.
RankReport rank_exact_ti(const Chain& chain, double tau = 0.0);

/// Exact rank for a periodic-tail chain via the monodromy matrix M (Phi
/// over one tail period). Nullity = algebraic multiplicity of eigenvalues
/// of M with modulus < 1 - margin; Null_tau is the preimage of the stable
/// subspace under Phi(prefix_end, tau). Eigenvalues within the margin of
/// the unit circle but away from 1 raise MarginalSpectrumError.
RankReport rank_exact_periodic(const Chain& chain, double tau = 0.0);

/// Dispatcher: ExactTI for time-invariant chains, ExactPeriodic for
/// periodic tails, otherwise the numerical horizon method with the given
/// tolerance and a doubling schedule (or `schedule` when non-empty; the
/// exact methods need no horizons). In discrete mode reports both the
/// tau-local null dimension and the limiting nullity.
RankReport rank(const Chain& chain, double tau, double tol = kRankTol,
                const std::vector<double>& schedule = {});

/// Dimension of the consensus set: vectors x(t0) from which the network
/// reaches some consensus. Equals Nullity(A) + 1.
int consensus_set_dimension(const Chain& chain, double tau);

/// max over basis columns v of ||Phi(horizon, tau) v||_inf.
double verify_basis(const Chain& chain, const NullSpaceBasis& basis, double horizon);

}  // namespace egcnet
