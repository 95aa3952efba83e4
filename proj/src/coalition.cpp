#include "egcnet/coalition.hpp"

#include "egcnet/geometry.hpp"
#include "egcnet/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>

namespace egcnet {

namespace {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

// Greedy ascending-index selection of dim(basis) linearly independent rows
// (pivot threshold on the residual after orthogonalization against the
// rows already selected).
std::vector<int> greedy_rows(const Matrix& basis, double pivot_tol) {
  const int n = static_cast<int>(basis.rows());
  const int m = static_cast<int>(basis.cols());
  std::vector<int> selected;
  Matrix q(m, 0);
  for (int i = 0; i < n && static_cast<int>(selected.size()) < m; ++i) {
    Vector row = basis.row(i).transpose();
    Vector resid = row - q * (q.transpose() * row);
    if (resid.norm() > pivot_tol) {
      resid.normalize();
      q.conservativeResize(m, q.cols() + 1);
      q.col(q.cols() - 1) = resid;
      selected.push_back(i);
    }
  }
  return selected;
}

double complement_condition(const Matrix& basis, const std::vector<int>& rows) {
  const int m = static_cast<int>(basis.cols());
  if (m == 0) return 1.0;
  Matrix sub(m, m);
  for (int i = 0; i < m; ++i) sub.row(i) = basis.row(rows[i]);
  return linalg::condition_number(sub);
}

// Basis entries from the numerical method are only trustworthy above its
// tolerance; pivots below that are noise, not independence.
double effective_pivot_tol(const NullSpaceBasis& basis) {
  return std::max(kPivotTol, basis.method == RankMethod::NumericalHorizon
                                 ? basis.tolerance
                                 : 0.0);
}

bool complement_valid(const Matrix& basis, const std::vector<int>& rows,
                      double pivot_tol) {
  const int m = static_cast<int>(basis.cols());
  if (static_cast<int>(rows.size()) != m) return false;
  if (m == 0) return true;
  Matrix sub(m, m);
  for (int i = 0; i < m; ++i) sub.row(i) = basis.row(rows[i]);
  Eigen::JacobiSVD<Matrix> svd(sub);
  return svd.singularValues()(m - 1) > pivot_tol;
}

// One representative agent per vertex of the stabilized limit polytope.
// The vertices are in one-to-one correspondence with a smallest coalition;
// lowest agent index represents each vertex cluster.
std::optional<std::vector<int>> vertex_representatives(const Chain& chain, double tau,
                                                       const RankReport& report) {
  auto schedule = default_horizon_schedule(chain, tau);
  double t1 = schedule[schedule.size() - 2];
  double t2 = schedule[schedule.size() - 1];
  PolytopeSnapshot s1 = polytope_snapshot(chain, t1, tau);
  PolytopeSnapshot s2 = polytope_snapshot(chain, t2, tau);
  if (s1.vertex_indices != s2.vertex_indices) return std::nullopt;
  int expected = chain.n_agents - report.null_dim_local;
  if (s2.vertex_count != expected) return std::nullopt;
  return s2.vertex_indices;
}

}  // namespace

Coalition smallest_egc(const Chain& chain, double tau) {
  return smallest_egc(chain, tau, rank(chain, tau));
}

Coalition smallest_egc(const Chain& chain, double tau, const RankReport& report) {
  if (!report.converged) {
    std::ostringstream os;
    os << "smallest_egc: rank diagnostic did not converge (method "
       << to_string(report.basis.method) << ", horizon " << report.basis.horizon_used
       << "); refusing to extract a coalition";
    throw NotConvergedError(os.str());
  }
  const int n = chain.n_agents;
  const Matrix& basis = report.basis.basis;

  Coalition coalition;
  coalition.tau = tau;
  coalition.basis = report.basis;

  const double pivot_tol = effective_pivot_tol(report.basis);
  std::vector<int> members;
  if (auto reps = vertex_representatives(chain, tau, report)) {
    members = *reps;
    std::vector<int> complement;
    std::set<int> member_set(members.begin(), members.end());
    for (int i = 0; i < n; ++i) {
      if (!member_set.count(i)) complement.push_back(i);
    }
    if (complement_valid(basis, complement, pivot_tol)) {
      coalition.members = members;
      coalition.complement_rows = complement;
      coalition.selection = "vertices";
      coalition.condition_number = complement_condition(basis, complement);
      return coalition;
    }
  }

  // Fallback: greedy ascending-index row selection.
  std::vector<int> complement = greedy_rows(basis, pivot_tol);
  std::set<int> comp_set(complement.begin(), complement.end());
  std::vector<int> s;
  for (int i = 0; i < n; ++i) {
    if (!comp_set.count(i)) s.push_back(i);
  }
  coalition.members = s;
  coalition.complement_rows = complement;
  coalition.selection = "greedy_rows";
  coalition.condition_number = complement_condition(basis, complement);
  return coalition;
}

SteeringPlan steer(const Chain& chain, const Coalition& coalition, double target,
                   const std::map<int, double>& fixed_opinions) {
  (void)chain;
  const Matrix& basis = coalition.basis.basis;
  const int m = static_cast<int>(basis.cols());

  std::set<int> expected(coalition.complement_rows.begin(),
                         coalition.complement_rows.end());
  std::set<int> given;
  for (const auto& [idx, _] : fixed_opinions) given.insert(idx);
  if (given != expected)
    throw std::invalid_argument("steer: fixed opinions must cover exactly V \\ S");

  Matrix sub(m, m);
  Vector rhs(m);
  for (int i = 0; i < m; ++i) {
    int row = coalition.complement_rows[i];
    sub.row(i) = basis.row(row);
    rhs(i) = fixed_opinions.at(row) - target;
  }
  if (m > 0 && linalg::condition_number(sub) > 1e12) {
    throw IllConditionedError("steer: complement submatrix condition number > 1e12");
  }
  Vector alpha = m > 0 ? sub.fullPivLu().solve(rhs).eval() : Vector(0);

  // x(t0) = target * 1 + basis * alpha reproduces the fixed opinions on
  // V \ S and lies in the consensus set by construction.
  const int n = static_cast<int>(basis.rows());
  Vector x0 = Vector::Constant(n, target);
  if (m > 0) x0 += basis * alpha;

  SteeringPlan plan;
  plan.target = target;
  plan.fixed_opinions = fixed_opinions;
  for (int i : coalition.members) plan.coalition_opinions[i] = x0(i);
  plan.predicted_limit = Vector::Constant(n, target);
  Vector dev = x0 - Vector::Constant(n, target);
  if (m > 0) {
    Vector proj = basis * (basis.transpose() * dev);
    plan.residual = (dev - proj).cwiseAbs().maxCoeff();
  } else {
    plan.residual = dev.cwiseAbs().maxCoeff();
  }
  return plan;
}

bool verify_egc(const Chain& chain, const std::vector<int>& candidate, double tau,
                int trials, double target, double horizon, double tol,
                std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("verify_egc: trials must be >= 1");
  const int n = chain.n_agents;
  RankReport report = rank(chain, tau);
  const Matrix& basis = report.basis.basis;
  const int m = static_cast<int>(basis.cols());

  std::set<int> cand(candidate.begin(), candidate.end());
  std::vector<int> others;
  for (int i = 0; i < n; ++i) {
    if (!cand.count(i)) others.push_back(i);
  }

  Matrix b_others(static_cast<int>(others.size()), m);
  for (std::size_t i = 0; i < others.size(); ++i) b_others.row(i) = basis.row(others[i]);

  std::atomic<bool> falsified{false};
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
    if (falsified.load()) return;
    Rng rng(seed + 0x1000 * trial);
    Vector fixed(static_cast<int>(others.size()));
    for (int i = 0; i < fixed.size(); ++i) fixed(i) = 4.0 * rng.uniform() - 2.0;

    // Steering restricted to the candidate's rows: least squares through
    // the basis, with a residual check for solvability.
    Vector alpha = Vector::Zero(m);
    if (!others.empty()) {
      Vector rhs = fixed - Vector::Constant(fixed.size(), target);
      if (m > 0) {
        alpha = b_others.completeOrthogonalDecomposition().solve(rhs);
      }
      double lsq_residual = m > 0 ? (b_others * alpha - rhs).cwiseAbs().maxCoeff()
                                  : rhs.cwiseAbs().maxCoeff();
      if (lsq_residual > tol) {
        falsified.store(true);
        return;
      }
    }
    Vector x0 = Vector::Constant(n, target);
    if (m > 0) x0 += basis * alpha;
    for (std::size_t i = 0; i < others.size(); ++i) x0(others[i]) = fixed(i);

    auto traj = simulate(chain, x0, tau, {tau, horizon});
    double dev = (traj.states.back() - Vector::Constant(n, target)).cwiseAbs().maxCoeff();
    if (dev > tol) falsified.store(true);
  });
  return !falsified.load();
}

}  // namespace egcnet
