#include "egcnet/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace egcnet::linalg {

Matrix orthonormal_colspace(const Matrix& a, double rel_tol) {
  if (a.cols() == 0 || a.rows() == 0) return Matrix(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > rel_tol * smax) ++r;
  }
  return svd.matrixU().leftCols(r);
}

Matrix kernel_basis(const Matrix& a, double rel_tol) {
  if (a.cols() == 0) return Matrix(0, 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * smax) ++r;
  }
  // Rows short of columns contribute kernel directions with no singular value.
  return svd.matrixV().rightCols(a.cols() - r);
}

int matrix_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * smax) ++r;
  }
  return r;
}

double principal_angle(const Matrix& b1, const Matrix& b2) {
  if (b1.cols() != b2.cols()) return M_PI / 2;
  if (b1.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(b1.transpose() * b2);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  smin = std::clamp(smin, -1.0, 1.0);
  return std::acos(smin);
}

double condition_number(const Matrix& a) {
  if (a.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  double smin = s(s.size() - 1);
  if (smin <= 0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Eigen::VectorXcd eigenvalues(const Matrix& m) {
  return Eigen::EigenSolver<Matrix>(m, /*computeEigenvectors=*/false).eigenvalues();
}

namespace {

using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

// Swap the adjacent diagonal entries at positions (k, k+1) of an upper
// triangular T by a unitary similarity, updating U accordingly.
void swap_adjacent(ComplexMatrix& t, ComplexMatrix& u, int k) {
  Complex a = t(k, k), b = t(k, k + 1), d = t(k + 1, k + 1);
  // [b, d - a] is an eigenvector of [[a, b], [0, d]] for eigenvalue d.
  Eigen::JacobiRotation<Complex> rot;
  rot.makeGivens(b, d - a);
  t.applyOnTheLeft(k, k + 1, rot.adjoint());
  t.applyOnTheRight(k, k + 1, rot);
  u.applyOnTheRight(k, k + 1, rot);
  t(k + 1, k) = Complex(0, 0);
}

}  // namespace

Matrix invariant_subspace(const Matrix& m,
                          const std::function<bool(Complex)>& select) {
  const int n = static_cast<int>(m.rows());
  Eigen::ComplexSchur<ComplexMatrix> schur(m.cast<Complex>());
  ComplexMatrix t = schur.matrixT();
  ComplexMatrix u = schur.matrixU();

  std::vector<bool> selected(n);
  for (int i = 0; i < n; ++i) selected[i] = select(t(i, i));
  int k = 0;  // next slot for a selected eigenvalue
  for (int i = 0; i < n; ++i) {
    if (!selected[i]) continue;
    for (int j = i; j > k; --j) {
      swap_adjacent(t, u, j - 1);
      std::swap(selected[j - 1], selected[j]);
    }
    ++k;
  }
  // The reordering must not have reclassified anything; tiny eigenvalue
  // perturbations from the rotations can only matter in marginal cases,
  // which callers are expected to have screened out.
  for (int i = 0; i < n; ++i) {
    if (select(t(i, i)) != (i < k)) {
      throw MarginalSpectrumError(
          "invariant_subspace: spectral classification unstable under reordering");
    }
  }
  if (k == 0) return Matrix(n, 0);

  // The selected set is conjugation-closed for a real matrix, so the
  // invariant subspace is real: recover it from [Re | Im].
  ComplexMatrix lead = u.leftCols(k);
  Matrix stacked(n, 2 * k);
  stacked << lead.real(), lead.imag();
  Matrix basis = orthonormal_colspace(stacked, 1e-12);
  if (basis.cols() != k) {
    // Fall back to a rank cut at k; the span is k-dimensional in exact
    // arithmetic.
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
    basis = svd.matrixU().leftCols(k);
  }
  return basis;
}

double distance_to_hull(const Vector& point, const std::vector<Vector>& points,
                        double tol) {
  if (points.empty()) return std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(point.size());
  const int m = static_cast<int>(points.size());

  // Wolfe's minimum-norm-point algorithm on the shifted set {p_i - point}.
  Matrix p(n, m);
  for (int i = 0; i < m; ++i) p.col(i) = points[i] - point;

  std::vector<int> corral;
  Vector lambda;  // convex coefficients over `corral`
  {
    int best = 0;
    double best_norm = p.col(0).squaredNorm();
    for (int i = 1; i < m; ++i) {
      double norm_i = p.col(i).squaredNorm();
      if (norm_i < best_norm) { best = i; best_norm = norm_i; }
    }
    corral = {best};
    lambda = Vector::Ones(1);
  }

  auto current_point = [&]() {
    Vector x = Vector::Zero(n);
    for (std::size_t i = 0; i < corral.size(); ++i)
      x += lambda(static_cast<int>(i)) * p.col(corral[i]);
    return x;
  };

  const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  const int max_iter = 64 * (m + n) + 256;
  Vector x = current_point();

  for (int iter = 0; iter < max_iter; ++iter) {
    // Linear minimization step. The duality gap bounds the SQUARED norm
    // error, so the gap tolerance must be the square of the distance
    // resolution we want.
    int best = -1;
    double best_dot = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double d = x.dot(p.col(i));
      if (d < best_dot - 1e-18) { best_dot = d; best = i; }
    }
    double xx = x.squaredNorm();
    if (xx - best_dot <= tol * scale * scale || best < 0) break;
    if (std::find(corral.begin(), corral.end(), best) == corral.end()) {
      corral.push_back(best);
      Vector grown(corral.size());
      grown.head(lambda.size()) = lambda;
      grown(lambda.size()) = 0.0;
      lambda = grown;
    }

    // Minor cycle: move to the affine minimizer, trimming until the
    // coefficients are a convex combination.
    for (;;) {
      const int c = static_cast<int>(corral.size());
      Matrix s(n, c);
      for (int i = 0; i < c; ++i) s.col(i) = p.col(corral[i]);
      // Affine minimizer: min ||S y||, 1'y = 1 via the KKT system.
      Matrix kkt(c + 1, c + 1);
      kkt.topLeftCorner(c, c) = s.transpose() * s;
      kkt.topRightCorner(c, 1).setOnes();
      kkt.bottomLeftCorner(1, c).setOnes();
      kkt(c, c) = 0.0;
      Vector rhs = Vector::Zero(c + 1);
      rhs(c) = 1.0;
      Vector y = kkt.completeOrthogonalDecomposition().solve(rhs).head(c);

      if (y.minCoeff() >= -1e-14) {
        lambda = y;
        break;
      }
      // Line search from lambda toward y up to the first vanishing coord.
      double theta = 1.0;
      for (int i = 0; i < c; ++i) {
        double diff = lambda(i) - y(i);
        if (diff > 1e-18) theta = std::min(theta, lambda(i) / diff);
      }
      lambda = lambda + theta * (y - lambda);
      // Drop zeroed members (keep at least one).
      for (int i = c - 1; i >= 0 && corral.size() > 1; --i) {
        if (lambda(i) <= 1e-14) {
          corral.erase(corral.begin() + i);
          Vector shrunk(lambda.size() - 1);
          int w = 0;
          for (int j = 0; j < lambda.size(); ++j)
            if (j != i) shrunk(w++) = lambda(j);
          lambda = shrunk;
        }
      }
      lambda /= lambda.sum();
    }
    x = current_point();
  }
  return x.norm();
}

std::vector<std::vector<int>> single_linkage(const std::vector<Vector>& points,
                                             double threshold) {
  const int m = static_cast<int>(points.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) { parent[i] = parent[parent[i]]; i = parent[i]; }
    return i;
  };
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double d = (points[i] - points[j]).cwiseAbs().maxCoeff();
      if (d <= threshold) {
        int ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  std::vector<std::vector<int>> clusters;
  std::vector<int> root_to_cluster(m, -1);
  for (int i = 0; i < m; ++i) {
    int r = find(i);
    if (root_to_cluster[r] < 0) {
      root_to_cluster[r] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[root_to_cluster[r]].push_back(i);
  }
  return clusters;
}

}  // namespace egcnet::linalg
