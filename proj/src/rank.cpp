#include "egcnet/rank.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace egcnet {

namespace {

bool is_permutation_matrix(const Matrix& m, double tol = 1e-12) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> col_hits(n, 0);
  for (int i = 0; i < n; ++i) {
    int ones = 0;
    for (int j = 0; j < n; ++j) {
      double v = m(i, j);
      if (std::abs(v - 1.0) <= tol) {
        ++ones;
        ++col_hits[j];
      } else if (std::abs(v) > tol) {
        return false;
      }
    }
    if (ones != 1) return false;
  }
  return std::all_of(col_hits.begin(), col_hits.end(), [](int c) { return c == 1; });
}

bool stable_eig(std::complex<double> lambda) {
  return std::abs(lambda) < 1.0 - kSpectralMargin;
}

// Screens the spectrum: eigenvalues within the margin of the unit circle
// that are not the stochastic eigenvalue 1 make the stable/neutral split
// ill-conditioned.
void check_marginal(const Eigen::VectorXcd& eigs) {
  for (int i = 0; i < eigs.size(); ++i) {
    double mod = std::abs(eigs(i));
    if (std::abs(mod - 1.0) <= kSpectralMargin &&
        std::abs(eigs(i) - std::complex<double>(1.0, 0.0)) > kSpectralMargin) {
      std::ostringstream os;
      os << "marginal spectrum: eigenvalue " << eigs(i).real() << "+"
         << eigs(i).imag() << "i has modulus within " << kSpectralMargin
         << " of the unit circle";
      throw linalg::MarginalSpectrumError(os.str());
    }
  }
}

// Orthonormal basis of the orthogonal complement of span(basis).
Matrix orthogonal_complement(const Matrix& basis, int n) {
  if (basis.cols() == 0) return Matrix::Identity(n, n);
  return linalg::kernel_basis(basis.transpose(), 1e-12);
}

// Adaptive verification: push the horizon out (doubling) until the basis
// columns decay below 10x the target or the attempt budget runs out.
void verify_report(const Chain& chain, RankReport& report, double target_tol) {
  if (report.basis.dim() == 0) {
    report.verification_residual = 0.0;
    report.verification_horizon = report.tau;
    return;
  }
  auto schedule = default_horizon_schedule(chain, report.tau);
  double horizon = std::max(schedule.back(), report.basis.horizon_used);
  double residual = verify_basis(chain, report.basis, horizon);
  for (int i = 0; i < 12 && residual >= 10.0 * target_tol; ++i) {
    horizon = chain.is_discrete() ? std::ceil(2 * horizon) : 2 * horizon;
    residual = verify_basis(chain, report.basis, horizon);
  }
  report.verification_residual = residual;
  report.verification_horizon = horizon;
}

}  // namespace

std::string to_string(RankMethod m) {
  switch (m) {
    case RankMethod::ExactTI: return "exact_ti";
    case RankMethod::ExactPeriodic: return "exact_periodic";
    default: return "numerical_horizon";
  }
}

NullSpaceBasis nullspace_numerical(const Chain& chain, double tau, double tol,
                                   const std::vector<double>& horizon_schedule) {
  if (!(tol > 0 && tol < 1))
    throw std::invalid_argument("nullspace_numerical: tol must be in (0, 1)");
  if (horizon_schedule.size() < 2)
    throw std::invalid_argument(
        "nullspace_numerical: need at least two horizons to diagnose convergence");
  for (std::size_t i = 1; i < horizon_schedule.size(); ++i) {
    if (horizon_schedule[i] <= horizon_schedule[i - 1])
      throw std::invalid_argument("nullspace_numerical: schedule must increase");
  }

  NullSpaceBasis out;
  out.tau = tau;
  out.method = RankMethod::NumericalHorizon;
  out.tolerance = tol;

  Matrix prev_basis;
  Matrix last_basis;
  for (std::size_t h = 0; h < horizon_schedule.size(); ++h) {
    Matrix m = phi(chain, horizon_schedule[h], tau).matrix;
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int count = 0;
    for (int i = 0; i < s.size(); ++i) {
      if (s(i) < tol) ++count;
    }
    out.subtol_counts.push_back(count);
    prev_basis = std::move(last_basis);
    last_basis = svd.matrixV().rightCols(count);
    if (h + 1 == horizon_schedule.size()) {
      out.singular_values_final.assign(s.data(), s.data() + s.size());
    }
  }
  const std::size_t k = out.subtol_counts.size();
  out.converged = out.subtol_counts[k - 1] == out.subtol_counts[k - 2] &&
                  linalg::principal_angle(prev_basis, last_basis) < 1e-6;
  out.basis = last_basis;
  out.horizon_used = horizon_schedule.back();
  return out;
}

RankReport rank_exact_ti(const Chain& chain, double tau) {
  if (!chain.is_time_invariant())
    throw std::invalid_argument("rank_exact_ti: chain is not time-invariant");
  const int n = chain.n_agents;
  Matrix a_hat = evaluate_at(chain, chain.is_discrete() ? std::ceil(tau) : tau);

  RankReport report;
  report.tau = tau;
  report.nullity_tau = tau;
  report.basis.tau = tau;
  report.basis.method = RankMethod::ExactTI;
  report.basis.tolerance = kSpectralMargin;
  report.basis.converged = true;

  if (chain.is_discrete()) {
    if (is_permutation_matrix(a_hat)) {
      report.nullity = 0;
      report.basis.basis = Matrix(n, 0);
    } else {
      Eigen::VectorXcd eigs = linalg::eigenvalues(a_hat);
      check_marginal(eigs);
      int stable = 0;
      for (int i = 0; i < eigs.size(); ++i) {
        if (stable_eig(eigs(i))) ++stable;
      }
      report.nullity = stable;
      report.basis.basis = linalg::invariant_subspace(a_hat, stable_eig);
    }
  } else {
    // Rank(A) = nullity(A_hat); the chain null space is the column span
    // of A_hat (zero is a semisimple eigenvalue of an intensity matrix,
    // so range and kernel are complementary invariant subspaces).
    int matrix_nullity = n - linalg::matrix_rank(a_hat, 1e-10);
    report.nullity = n - matrix_nullity;
    report.basis.basis = linalg::orthonormal_colspace(a_hat, 1e-10);
  }
  report.rank = n - report.nullity;
  report.null_dim_local = report.basis.dim();
  report.converged = true;
  verify_report(chain, report, kRankTol);
  return report;
}

RankReport rank_exact_periodic(const Chain& chain, double tau) {
  const auto* tail = chain.periodic_tail();
  if (!tail) throw std::invalid_argument("rank_exact_periodic: tail is not periodic");
  const int n = chain.n_agents;
  const double pe = chain.prefix_end();
  const double period = chain.tail_period();

  // Anchor at the first tail-period boundary at or after tau.
  double base = pe;
  if (tau > pe) base = pe + std::ceil((tau - pe) / period - 1e-12) * period;

  Matrix monodromy = phi(chain, base + period, base).matrix;

  RankReport report;
  report.tau = tau;
  report.nullity_tau = base;
  report.basis.tau = tau;
  report.basis.method = RankMethod::ExactPeriodic;
  report.basis.tolerance = kSpectralMargin;
  report.basis.converged = true;

  Matrix stable_basis;  // Null at `base`
  if (is_permutation_matrix(monodromy)) {
    report.nullity = 0;
    stable_basis = Matrix(n, 0);
  } else {
    Eigen::VectorXcd eigs = linalg::eigenvalues(monodromy);
    check_marginal(eigs);
    int stable = 0;
    for (int i = 0; i < eigs.size(); ++i) {
      if (stable_eig(eigs(i))) ++stable;
    }
    report.nullity = stable;
    stable_basis = stable > 0 ? linalg::invariant_subspace(monodromy, stable_eig)
                              : Matrix(n, 0);
  }
  report.rank = n - report.nullity;

  if (base == tau || (chain.is_discrete() && base == std::ceil(tau))) {
    report.basis.basis = stable_basis;
  } else {
    // Null_tau is the preimage of the stable subspace under Phi(base, tau):
    // exactly the kernel of Q' Phi(base, tau) with Q spanning the stable
    // subspace's orthogonal complement. This picks up both the least-squares
    // preimage and any kernel of Phi(base, tau) in discrete mode.
    Matrix q = orthogonal_complement(stable_basis, n);
    Matrix transfer = phi(chain, base, tau).matrix;
    report.basis.basis = linalg::kernel_basis(q.transpose() * transfer, 1e-10);
  }
  report.null_dim_local = report.basis.dim();
  report.converged = true;
  verify_report(chain, report, kRankTol);
  return report;
}

RankReport rank(const Chain& chain, double tau, double tol,
                const std::vector<double>& schedule) {
  if (tau < 0) throw std::invalid_argument("rank: tau must be non-negative");
  if (chain.is_time_invariant()) return rank_exact_ti(chain, tau);
  if (chain.has_periodic_tail()) return rank_exact_periodic(chain, tau);

  RankReport report;
  report.tau = tau;
  report.basis = nullspace_numerical(
      chain, tau, tol,
      schedule.empty() ? default_horizon_schedule(chain, tau) : schedule);
  report.null_dim_local = report.basis.dim();
  report.singular_values = report.basis.singular_values_final;
  report.converged = report.basis.converged;

  if (chain.is_discrete() && tau < chain.prefix_end()) {
    // The limiting nullity: re-evaluate past the prefix, where dim(Null_tau)
    // has stabilized for this representation.
    double tau_lim = chain.prefix_end();
    NullSpaceBasis limit =
        nullspace_numerical(chain, tau_lim, tol, default_horizon_schedule(chain, tau_lim));
    report.nullity = limit.dim();
    report.nullity_tau = tau_lim;
    report.converged = report.converged && limit.converged;
  } else {
    report.nullity = report.basis.dim();
    report.nullity_tau = tau;
  }
  report.rank = chain.n_agents - report.nullity;
  verify_report(chain, report, tol);
  return report;
}

int consensus_set_dimension(const Chain& chain, double tau) {
  RankReport report = rank(chain, tau);
  const int n = chain.n_agents;
  Matrix combined(n, report.basis.dim() + 1);
  if (report.basis.dim() > 0) combined.leftCols(report.basis.dim()) = report.basis.basis;
  combined.col(report.basis.dim()) = Vector::Ones(n);
  return linalg::matrix_rank(combined, 1e-10);
}

double verify_basis(const Chain& chain, const NullSpaceBasis& basis, double horizon) {
  if (basis.dim() == 0) return 0.0;
  Matrix m = phi(chain, horizon, basis.tau).matrix;
  return (m * basis.basis).cwiseAbs().maxCoeff();
}

}  // namespace egcnet
