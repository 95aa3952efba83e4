#include "egcnet/expm.hpp"

#include <Eigen/LU>

#include <cmath>
#include <vector>

namespace egcnet {

namespace {

using Eigen::MatrixXd;

// Pade coefficients for the diagonal approximants of degree 3..13.
MatrixXd pade_u(const MatrixXd& a, const double* b, int half_degree,
                const std::vector<MatrixXd>& powers) {
  const int n = static_cast<int>(a.rows());
  MatrixXd u = b[1] * MatrixXd::Identity(n, n);
  for (int k = 1; k <= half_degree; ++k) u += b[2 * k + 1] * powers[k];
  return a * u;
}

MatrixXd pade_v(const MatrixXd& a, const double* b, int half_degree,
                const std::vector<MatrixXd>& powers) {
  const int n = static_cast<int>(a.rows());
  MatrixXd v = b[0] * MatrixXd::Identity(n, n);
  for (int k = 1; k <= half_degree; ++k) v += b[2 * k] * powers[k];
  return v;
}

MatrixXd pade_solve(const MatrixXd& u, const MatrixXd& v) {
  // (V - U) X = (V + U)
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  // Higham's 2005 degree selection thresholds on the 1-norm.
  static const double theta3 = 1.495585217958292e-2;
  static const double theta5 = 2.539398330063230e-1;
  static const double theta7 = 9.504178996162932e-1;
  static const double theta9 = 2.097847961257068e0;
  static const double theta13 = 5.371920351148152e0;

  static const double b3[] = {120, 60, 12, 1};
  static const double b5[] = {30240, 15120, 3360, 420, 30, 1};
  static const double b7[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
  static const double b9[] = {17643225600, 8821612800, 2075673600, 302702400,
                              30270240, 2162160, 110880, 3960, 90, 1};
  static const double b13[] = {64764752532480000, 32382376266240000, 7771770303897600,
                               1187353796428800, 129060195264000, 10559470521600,
                               670442572800, 33522128640, 1323241920, 40840800,
                               960960, 16380, 182, 1};

  const int n = static_cast<int>(a.rows());
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm

  std::vector<MatrixXd> powers(5);
  powers[1] = a * a;  // powers[k] = A^(2k)

  if (norm <= theta9) {
    int half_degree;
    const double* b;
    if (norm <= theta3) { half_degree = 1; b = b3; }
    else if (norm <= theta5) { half_degree = 2; b = b5; }
    else if (norm <= theta7) { half_degree = 3; b = b7; }
    else { half_degree = 4; b = b9; }
    for (int k = 2; k <= half_degree; ++k) powers[k] = powers[k - 1] * powers[1];
    return pade_solve(pade_u(a, b, half_degree, powers),
                      pade_v(a, b, half_degree, powers));
  }

  // Scale so that ||A / 2^s|| <= theta13, apply degree 13, square back.
  int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  MatrixXd as = a / std::pow(2.0, s);
  MatrixXd a2 = as * as;
  MatrixXd a4 = a2 * a2;
  MatrixXd a6 = a2 * a4;
  MatrixXd ident = MatrixXd::Identity(n, n);

  MatrixXd u = as * (a6 * (b13[13] * a6 + b13[11] * a4 + b13[9] * a2) +
                     b13[7] * a6 + b13[5] * a4 + b13[3] * a2 + b13[1] * ident);
  MatrixXd v = a6 * (b13[12] * a6 + b13[10] * a4 + b13[8] * a2) +
               b13[6] * a6 + b13[4] * a4 + b13[2] * a2 + b13[0] * ident;
  MatrixXd r = pade_solve(u, v);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

}  // namespace egcnet
