#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace egcnet::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when spectral classification would be a coin toss: an
/// eigenvalue sits within margin of the unit circle but is not the
/// stochastic eigenvalue 1.
struct MarginalSpectrumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Orthonormal basis of the column span of A (SVD, relative tol).
Matrix orthonormal_colspace(const Matrix& a, double rel_tol = 1e-12);

/// Orthonormal basis of the kernel of A (right singular vectors with
/// sigma <= rel_tol * sigma_max).
Matrix kernel_basis(const Matrix& a, double rel_tol = 1e-12);

/// Numerical rank by SVD with a tolerance relative to the largest
/// singular value.
int matrix_rank(const Matrix& a, double rel_tol = 1e-10);

/// Largest principal angle (radians) between the column spans of two
/// orthonormal bases of equal dimension. Zero-dimensional spans agree.
double principal_angle(const Matrix& b1, const Matrix& b2);

/// Condition number estimate (2-norm) of a square matrix.
double condition_number(const Matrix& a);

/// Real orthonormal basis of the invariant subspace of a real square
/// matrix spanned by the generalized eigenvectors of all eigenvalues
/// satisfying `select`. The selected set must be closed under complex
/// conjugation. Computed via a reordered complex Schur decomposition,
/// so defective eigenvalues are handled.
Matrix invariant_subspace(const Matrix& m,
                          const std::function<bool(std::complex<double>)>& select);

/// Eigenvalues of a real square matrix.
Eigen::VectorXcd eigenvalues(const Matrix& m);

/// Distance from `point` to the convex hull of `points` (each entry one
/// point), via Wolfe's minimum-norm-point algorithm. The hull of an
/// empty set is empty: distance is +infinity. `tol` is the duality-gap
/// cutoff on the squared distance: the default resolves distances to
/// about 1e-9.
double distance_to_hull(const Vector& point, const std::vector<Vector>& points,
                        double tol = 1e-18);

/// Single-linkage clustering under the max-norm metric: the partition
/// induced by the transitive closure of {dist <= threshold}. Clusters
/// are sorted by smallest member; members ascending.
std::vector<std::vector<int>> single_linkage(const std::vector<Vector>& points,
                                             double threshold);

}  // namespace egcnet::linalg
