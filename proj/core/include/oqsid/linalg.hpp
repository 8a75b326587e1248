#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace oqsid {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

/// Base exception for contract violations raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace linalg {

/// Singular-value cutoff max(rows, cols) * eps * sigma_max, the single rank
/// rule used by every rank test in the library.
template <typename Derived>
double default_rank_cutoff(const Eigen::MatrixBase<Derived>& singular_values,
                           Eigen::Index rows, Eigen::Index cols) {
  if (singular_values.size() == 0) return 0.0;
  const double smax = singular_values.maxCoeff();
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * smax;
}

/// Numerical rank. A non-positive `cutoff` selects default_rank_cutoff.
int numerical_rank(const Mat& m, double cutoff = -1.0);
int numerical_rank(const CMat& m, double cutoff = -1.0);

Vec singular_values(const Mat& m);
Vec singular_values(const CMat& m);

double spectral_norm(const Mat& m);
double spectral_norm(const CMat& m);

/// sigma_max / sigma_min; +inf for a singular (or empty) matrix.
double condition_number(const CMat& m);

/// Moore-Penrose pseudoinverse using the default rank cutoff.
Mat pinv(const Mat& m);
CMat pinv(const CMat& m);

/// Least-squares solution of m x = rhs together with the residual norm
/// ||m x - rhs||.
struct LeastSquares {
  Vec x;
  double residual = 0.0;
};
LeastSquares least_squares(const Mat& m, const Vec& rhs);

struct ComplexLeastSquares {
  CVec x;
  double residual = 0.0;
};
ComplexLeastSquares least_squares(const CMat& m, const CVec& rhs);

Mat expm(const Mat& a);
CMat expm(const CMat& a);

/// Integral of exp(A t) over [0, tau], via the augmented exponential
/// exp([[A, I], [0, 0]] tau) whose top-right block is the integral.
Mat integral_expm(const Mat& a, double tau);

/// Row-major flattening: entry (j, k) lands at j * cols + k.
Vec vec_row_major(const Mat& m);
CVec vec_row_major(const CMat& m);
Mat unvec_row_major(const Vec& v, Eigen::Index rows, Eigen::Index cols);
CMat unvec_row_major(const CVec& v, Eigen::Index rows, Eigen::Index cols);

/// Kronecker product a (x) b.
CMat kron(const CMat& a, const CMat& b);

}  // namespace linalg
}  // namespace oqsid
