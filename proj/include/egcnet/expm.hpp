#pragma once

#include <Eigen/Dense>

namespace egcnet {

/// Matrix exponential by scaling-and-squaring with diagonal Pade
/// approximants (degree chosen from the 1-norm), targeting relative
/// error <= 1e-12 in exact arithmetic.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

}  // namespace egcnet
