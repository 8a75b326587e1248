#include "oqsid/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace oqsid::linalg {

namespace {

template <typename M>
int rank_impl(const M& m, double cutoff) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<M> svd(m);
  const auto& s = svd.singularValues();
  const double tol = cutoff > 0.0 ? cutoff : default_rank_cutoff(s, m.rows(), m.cols());
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) ++r;
  }
  return r;
}

template <typename M>
M pinv_impl(const M& m) {
  if (m.size() == 0) return M::Zero(m.cols(), m.rows());
  Eigen::BDCSVD<M> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double tol = default_rank_cutoff(s, m.rows(), m.cols());
  Vec inv = Vec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace

int numerical_rank(const Mat& m, double cutoff) { return rank_impl(m, cutoff); }
int numerical_rank(const CMat& m, double cutoff) { return rank_impl(m, cutoff); }

Vec singular_values(const Mat& m) {
  if (m.size() == 0) return Vec();
  return Eigen::BDCSVD<Mat>(m).singularValues();
}

Vec singular_values(const CMat& m) {
  if (m.size() == 0) return Vec();
  return Eigen::BDCSVD<CMat>(m).singularValues();
}

double spectral_norm(const Mat& m) {
  const Vec s = singular_values(m);
  return s.size() ? s.maxCoeff() : 0.0;
}

double spectral_norm(const CMat& m) {
  const Vec s = singular_values(m);
  return s.size() ? s.maxCoeff() : 0.0;
}

double condition_number(const CMat& m) {
  const Vec s = singular_values(m);
  if (s.size() == 0 || s.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
  return s.maxCoeff() / s.minCoeff();
}

Mat pinv(const Mat& m) { return pinv_impl(m); }
CMat pinv(const CMat& m) { return pinv_impl(m); }

LeastSquares least_squares(const Mat& m, const Vec& rhs) {
  LeastSquares out;
  out.x = pinv(m) * rhs;
  out.residual = (m * out.x - rhs).norm();
  return out;
}

ComplexLeastSquares least_squares(const CMat& m, const CVec& rhs) {
  ComplexLeastSquares out;
  out.x = pinv(m) * rhs;
  out.residual = (m * out.x - rhs).norm();
  return out;
}

Mat expm(const Mat& a) { return a.exp(); }
CMat expm(const CMat& a) { return a.exp(); }

Mat integral_expm(const Mat& a, double tau) {
  const Eigen::Index n = a.rows();
  Mat aug = Mat::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = a * tau;
  aug.topRightCorner(n, n) = Mat::Identity(n, n) * tau;
  const Mat e = aug.exp();
  return e.topRightCorner(n, n);
}

Vec vec_row_major(const Mat& m) {
  Vec v(m.size());
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    for (Eigen::Index k = 0; k < m.cols(); ++k) v(j * m.cols() + k) = m(j, k);
  return v;
}

CVec vec_row_major(const CMat& m) {
  CVec v(m.size());
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    for (Eigen::Index k = 0; k < m.cols(); ++k) v(j * m.cols() + k) = m(j, k);
  return v;
}

Mat unvec_row_major(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw Error("unvec: size mismatch");
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j)
    for (Eigen::Index k = 0; k < cols; ++k) m(j, k) = v(j * cols + k);
  return m;
}

CMat unvec_row_major(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw Error("unvec: size mismatch");
  CMat m(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j)
    for (Eigen::Index k = 0; k < cols; ++k) m(j, k) = v(j * cols + k);
  return m;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace oqsid::linalg
