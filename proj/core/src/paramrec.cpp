#include "oqsid/paramrec.hpp"

#include <cmath>
#include <limits>

#include "oqsid/gksl.hpp"

namespace oqsid {

GammaIndexMap::GammaIndexMap(int n) : n_(n) {
  if (n < 1) throw Error("GammaIndexMap: n must be positive");
  sym_index_.assign(static_cast<std::size_t>(n) * n, -1);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      sym_index_[static_cast<std::size_t>(j * n + k)] = static_cast<int>(sym_pairs_.size());
      sym_pairs_.emplace_back(j, k);
    }
}

int GammaIndexMap::symmetric_inverse(int j, int k) const {
  if (j > k) std::swap(j, k);
  return sym_index_.at(static_cast<std::size_t>(j * n_ + k));
}

Mat GammaIndexMap::expand_symmetric(const Vec& v) const {
  if (v.size() != symmetric_size()) throw Error("GammaIndexMap: symmetric vector has wrong length");
  Mat m(n_, n_);
  for (int r = 0; r < symmetric_size(); ++r) {
    const auto [j, k] = symmetric_forward(r);
    m(j, k) = v(r);
    m(k, j) = v(r);
  }
  return m;
}

Vec GammaIndexMap::compress_symmetric(const Mat& m) const {
  Vec v(symmetric_size());
  for (int r = 0; r < symmetric_size(); ++r) {
    const auto [j, k] = symmetric_forward(r);
    v(r) = m(j, k);
  }
  return v;
}

const char* to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::FullRecovery: return "full-recovery";
    case RecoveryStatus::GammaOnly: return "gamma-only";
    case RecoveryStatus::ThetaOnly: return "theta-only";
    case RecoveryStatus::ThetaAndGammaFromBeta: return "theta-and-gamma-from-beta";
    case RecoveryStatus::GammaFromBeta: return "gamma-from-beta";
    case RecoveryStatus::NotRecoverable: return "not-recoverable";
  }
  return "?";
}

namespace {

double condition(const Vec& sv) {
  if (sv.size() == 0 || sv.minCoeff() == 0.0) return std::numeric_limits<double>::infinity();
  return sv.maxCoeff() / sv.minCoeff();
}

bool in_range(double residual, double rhs_norm, double tol) {
  return residual <= tol * (1.0 + rhs_norm);
}

}  // namespace

Mat build_T1(const StructureTensors& tensors) {
  const int n = tensors.n();
  Mat t1 = Mat::Zero(n * n, n);
  for (const auto& e : tensors.f_entries()) t1(e.j * n + e.k, e.l) = -e.value;
  return t1;
}

ReconstructionMatrices build_reconstruction_matrices(const StructureTensors& tensors,
                                                     int hilbert_dim, bool symmetric) {
  const int n = tensors.n();
  if (hilbert_dim * hilbert_dim - 1 != n)
    throw Error("build_reconstruction_matrices: n must equal N^2 - 1");
  ReconstructionMatrices m;
  m.n = n;
  m.hilbert_dim = hilbert_dim;
  m.symmetric = symmetric;
  m.index = GammaIndexMap(n);
  const int nn = n * n;

  m.T1 = build_T1(tensors);
  m.beta_map = cplx(0.0, -1.0 / hilbert_dim) * m.T1.transpose().cast<cplx>();

  const Vec sv1 = linalg::singular_values(m.T1);
  m.rank_T1 = linalg::numerical_rank(m.T1);
  m.kappa_T1 = condition(sv1);
  m.T1_pinv = linalg::pinv(m.T1);
  m.beta_map_pinv = linalg::pinv(m.beta_map);

  if (symmetric) {
    m.T3 = Mat::Zero(nn, m.index.symmetric_size());
    // A_d(j,k) = -1/2 sum gamma_lm f_jmp f_klp, with f_klp = f_pkl.
    for (const auto& e : tensors.f_entries()) {
      const int j = e.j, mm = e.k, p = e.l;
      for (int k = 0; k < n; ++k)
        for (const auto& s : tensors.f_pair(p, k))
          m.T3(j * n + k, m.index.symmetric_inverse(s.l, mm)) -= 0.5 * e.value * s.value;
    }
    const Vec sv3 = linalg::singular_values(m.T3);
    m.rank_T3 = linalg::numerical_rank(m.T3);
    m.kappa_T3 = condition(sv3);
    m.T3_pinv = linalg::pinv(m.T3);
  } else {
    m.T2 = CMat::Zero(nn, nn);
    for_each_dissipation_term(tensors, [&](int j, int k, int l, int mm, cplx d) {
      m.T2(j * n + k, l * n + mm) -= d;
    });
    m.M = CMat::Zero(nn + n, n + nn);
    m.M.topLeftCorner(nn, n) = m.T1.cast<cplx>();
    m.M.topRightCorner(nn, nn) = m.T2;
    m.M.bottomRightCorner(n, nn) = m.beta_map;
    const Vec svm = linalg::singular_values(m.M);
    m.kappa_M = condition(svm);
    m.norm_M = svm.size() ? svm.maxCoeff() : 0.0;
    if (std::isfinite(m.kappa_M) && svm.minCoeff() > 0.0) {
      m.norm_M_inv = 1.0 / svm.minCoeff();
      m.M_inv = m.M.partialPivLu().inverse();
    } else {
      m.norm_M_inv = std::numeric_limits<double>::infinity();
    }
  }
  return m;
}

namespace {

CMat hermitian_part(const CMat& g, double& distance) {
  const CMat h = 0.5 * (g + g.adjoint());
  distance = (g - h).norm();
  return h;
}

void fill_residuals(RecoveredParams& out, const Mat& A, const Vec* beta,
                    const ReconstructionMatrices& mats) {
  const int n = mats.n;
  CVec a_hat = CVec::Zero(n * n);
  if (out.has_theta) a_hat += mats.T1.cast<cplx>() * out.theta.cast<cplx>();
  if (out.has_gamma) {
    const CVec g = linalg::vec_row_major(out.gamma);
    if (mats.symmetric)
      a_hat += mats.T3.cast<cplx>() * mats.index.compress_symmetric(out.gamma.real()).cast<cplx>();
    else
      a_hat += mats.T2 * g;
    if (beta) out.residual_beta = (mats.beta_map * g - beta->cast<cplx>()).norm();
  } else if (beta) {
    out.residual_beta = beta->norm();
  }
  out.residual_A = (a_hat - linalg::vec_row_major(A).cast<cplx>()).norm();
}

void check_dims(const Mat& A, const ReconstructionMatrices& mats) {
  if (A.rows() != mats.n || A.cols() != mats.n)
    throw Error("parameter reconstruction: A must be " + std::to_string(mats.n) + "x" +
                std::to_string(mats.n));
}

bool gamma_from_beta(const Vec& beta, const ReconstructionMatrices& mats, const RecoveryOptions& o,
                     RecoveredParams& out) {
  const CVec b = beta.cast<cplx>();
  const CVec g = mats.beta_map_pinv * b;
  const double resid = (mats.beta_map * g - b).norm();
  if (!in_range(resid, b.norm(), o.range_tol)) {
    out.notes.push_back("beta outside the range of the beta map (residual " + std::to_string(resid) + ")");
    return false;
  }
  out.gamma = hermitian_part(linalg::unvec_row_major(g, mats.n, mats.n), out.hermitian_projection);
  out.has_gamma = true;
  out.notes.push_back("gamma is the minimum-norm solution consistent with beta");
  return true;
}

}  // namespace

RecoveredParams reconstruct_general(const Mat& A, const Vec& beta,
                                    const ReconstructionMatrices& mats,
                                    const RecoveryOptions& options) {
  check_dims(A, mats);
  if (beta.size() != mats.n) throw Error("reconstruct_general: beta must have length n");
  if (mats.symmetric) throw Error("reconstruct_general: matrices were built for symmetric mode");
  const int n = mats.n;
  RecoveredParams out;
  out.kappa = mats.kappa_M;

  if (mats.M_inv.size() && mats.kappa_M < options.condition_cap) {
    CVec rhs(n * n + n);
    rhs.head(n * n) = linalg::vec_row_major(A).cast<cplx>();
    rhs.tail(n) = beta.cast<cplx>();
    const CVec y = mats.M_inv * rhs;
    out.theta = y.head(n).real();
    out.theta_imag_residue = y.head(n).imag().cwiseAbs().maxCoeff();
    out.gamma = hermitian_part(linalg::unvec_row_major(CVec(y.tail(n * n)), n, n),
                               out.hermitian_projection);
    out.has_theta = out.has_gamma = true;
    out.status = RecoveryStatus::FullRecovery;
  } else {
    out.notes.push_back("kappa(M) = " + std::to_string(mats.kappa_M) + " is not below the cap");
    if (mats.rank_T1 == n && gamma_from_beta(beta, mats, options, out))
      out.status = RecoveryStatus::GammaFromBeta;
    else
      out.status = RecoveryStatus::NotRecoverable;
  }
  fill_residuals(out, A, &beta, mats);
  return out;
}

RecoveredParams reconstruct_symmetric(const Mat& A, const ReconstructionMatrices& mats,
                                      const std::optional<Vec>& beta,
                                      const RecoveryOptions& options) {
  check_dims(A, mats);
  if (!mats.symmetric) throw Error("reconstruct_symmetric: matrices were built for general mode");
  if (beta && beta->size() != mats.n) throw Error("reconstruct_symmetric: beta must have length n");
  const int n = mats.n;
  RecoveredParams out;
  out.kappa = mats.kappa_T3;

  const Mat a_d = 0.5 * (A + A.transpose());
  const Mat a_l = 0.5 * (A - A.transpose());
  const Vec vd = linalg::vec_row_major(a_d);
  const Vec vl = linalg::vec_row_major(a_l);

  bool t3_ok = mats.rank_T3 == mats.index.symmetric_size();
  if (t3_ok) {
    const Vec g = mats.T3_pinv * vd;
    const double resid = (mats.T3 * g - vd).norm();
    t3_ok = in_range(resid, vd.norm(), options.range_tol);
    if (t3_ok) {
      out.gamma = mats.index.expand_symmetric(g).cast<cplx>();
      out.has_gamma = true;
    } else {
      out.notes.push_back("vec(A_d) outside ran(T3) (residual " + std::to_string(resid) + ")");
    }
  } else {
    out.notes.push_back("T3 is rank deficient");
  }

  bool t1_ok = mats.rank_T1 == n;
  if (t1_ok) {
    const Vec th = mats.T1_pinv * vl;
    const double resid = (mats.T1 * th - vl).norm();
    t1_ok = in_range(resid, vl.norm(), options.range_tol);
    if (t1_ok) {
      out.theta = th;
      out.has_theta = true;
    } else {
      out.notes.push_back("vec(A_l) outside ran(T1) (residual " + std::to_string(resid) + ")");
    }
  } else {
    out.notes.push_back("T1 is rank deficient");
  }

  if (t3_ok) {
    out.status = t1_ok ? RecoveryStatus::FullRecovery : RecoveryStatus::GammaOnly;
  } else if (t1_ok) {
    out.status = RecoveryStatus::ThetaOnly;
    if (beta && gamma_from_beta(*beta, mats, options, out))
      out.status = RecoveryStatus::ThetaAndGammaFromBeta;
  } else {
    out.status = RecoveryStatus::NotRecoverable;
  }
  const Vec* bp = beta ? &*beta : nullptr;
  fill_residuals(out, A, bp, mats);
  return out;
}

ErrorBound error_bound(const ReconstructionMatrices& mats, double delta_M_norm, const Mat& A,
                       const Vec& beta, double delta_A_norm) {
  if (mats.symmetric || mats.M.size() == 0)
    throw Error("error_bound: requires general-mode matrices");
  ErrorBound eb;
  eb.kappa = mats.kappa_M;
  if (!std::isfinite(mats.kappa_M)) {
    eb.valid = false;
    eb.bound = std::numeric_limits<double>::infinity();
    eb.status = "bound invalid: M is singular";
    return eb;
  }
  const double rel = delta_M_norm / mats.norm_M;
  if (!(mats.kappa_M * rel < 1.0)) {
    eb.valid = false;
    eb.bound = std::numeric_limits<double>::infinity();
    eb.status = "bound invalid: kappa(M) ||dM|| / ||M|| >= 1";
    return eb;
  }
  double rhs_sq = linalg::vec_row_major(A).squaredNorm();
  if (beta.size()) rhs_sq += beta.squaredNorm();
  const double rhs = std::sqrt(rhs_sq);
  const double perturbed_inv = mats.norm_M_inv / (1.0 - mats.kappa_M * rel);
  const double second = delta_M_norm == 0.0
                            ? 0.0
                            : mats.kappa_M / (1.0 / rel - mats.kappa_M) * mats.norm_M_inv * rhs;
  eb.bound = perturbed_inv * delta_A_norm + second;
  eb.status = "ok";
  return eb;
}

}  // namespace oqsid
