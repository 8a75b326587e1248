#include "oqsid/gksl.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace oqsid {

namespace {

constexpr double kHermitianTol = 1e-12;

cplx trace_product(const CMat& a, const CMat& b) {
  return (a.array() * b.transpose().array()).sum();
}

Mat checked_real(const CMat& m, const char* what) {
  const double residue = m.imag().cwiseAbs().maxCoeff();
  if (residue >= kImagResidueLimit)
    throw Error(std::string("assemble_system: ") + what + " has imaginary residue " +
                std::to_string(residue) + " (index convention or non-Hermitian gamma)");
  return m.real();
}

}  // namespace

ParamsCheck validate_params(const GkslParams& params, int n) {
  if (params.theta.size() != n)
    throw Error("GkslParams: theta has length " + std::to_string(params.theta.size()) +
                ", expected " + std::to_string(n));
  if (params.gamma.rows() != n || params.gamma.cols() != n)
    throw Error("GkslParams: gamma must be " + std::to_string(n) + "x" + std::to_string(n));

  ParamsCheck check;
  check.hermiticity_error = (params.gamma - params.gamma.adjoint()).cwiseAbs().maxCoeff();
  if (check.hermiticity_error > kHermitianTol)
    throw Error("GkslParams: gamma is not Hermitian (max deviation " +
                std::to_string(check.hermiticity_error) + ")");
  check.symmetry_error = (params.gamma - params.gamma.transpose()).cwiseAbs().maxCoeff();
  if (params.symmetric && check.symmetry_error > kHermitianTol)
    throw Error("GkslParams: symmetric flag set but gamma is not real symmetric");

  const CMat herm = 0.5 * (params.gamma + params.gamma.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> eig(herm, Eigen::EigenvaluesOnly);
  check.min_eigenvalue = eig.eigenvalues().minCoeff();
  check.positive_semidefinite = check.min_eigenvalue >= -1e-10;
  if (!check.positive_semidefinite)
    check.warnings.push_back("gamma is not positive semidefinite (min eigenvalue " +
                             std::to_string(check.min_eigenvalue) + ")");
  return check;
}

void for_each_dissipation_term(
    const StructureTensors& tensors,
    const std::function<void(int, int, int, int, cplx)>& visit) {
  const int n = tensors.n();
  const cplx i_unit(0.0, 1.0);
  for (const auto& e : tensors.f_entries()) {
    // e = f_{j a p}; it plays f_{jmp} (a = m) in the first sum and
    // f_{jlp} (a = l) in the second.
    const int j = e.j;
    const int a = e.k;
    const int p = e.l;
    const double fv = 0.25 * e.value;
    for (int b = 0; b < n; ++b) {
      // first sum: z_{b p k} with l = b, m = a
      for (const auto& s : tensors.f_pair(b, p)) visit(j, s.l, b, a, cplx(fv * s.value, 0.0));
      for (const auto& s : tensors.g_pair(b, p)) visit(j, s.l, b, a, i_unit * (fv * s.value));
      // second sum: conj(z_{b p k}) with l = a, m = b
      for (const auto& s : tensors.f_pair(b, p)) visit(j, s.l, a, b, cplx(fv * s.value, 0.0));
      for (const auto& s : tensors.g_pair(b, p)) visit(j, s.l, a, b, -i_unit * (fv * s.value));
    }
  }
}

CoherenceSystem assemble_system(const LieBasis& basis, const StructureTensors& tensors,
                                const GkslParams& params, const std::vector<CMat>& observables) {
  const int n = basis.n;
  if (tensors.n() != n) throw Error("assemble_system: tensors do not match basis dimension");
  validate_params(params, n);
  const double inv_dim = 1.0 / static_cast<double>(basis.hilbert_dim);

  CoherenceSystem sys;
  sys.n = n;

  // A_l(j,k) = -sum_l theta_l f_{jkl}; N_j(k,l) = -f_{jkl}
  sys.A_l = Mat::Zero(n, n);
  sys.N_list.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (const auto& e : tensors.f_entries()) {
    sys.A_l(e.j, e.k) -= params.theta(e.l) * e.value;
    sys.N_list[static_cast<std::size_t>(e.j)](e.k, e.l) = -e.value;
  }

  CMat a_d = CMat::Zero(n, n);
  for_each_dissipation_term(tensors, [&](int j, int k, int l, int m, cplx d) {
    a_d(j, k) -= params.gamma(l, m) * d;
  });
  sys.A_d = checked_real(a_d, "A_d");

  // beta_j = (i/N) sum_{k,l} gamma_{kl} f_{jkl}
  CVec beta = CVec::Zero(n);
  for (const auto& e : tensors.f_entries())
    beta(e.j) += cplx(0.0, inv_dim) * params.gamma(e.k, e.l) * e.value;
  sys.beta = checked_real(beta, "beta");

  sys.A = sys.A_l + sys.A_d;

  if (observables.empty()) {
    sys.C = Mat::Identity(n, n);
  } else {
    sys.C.resize(static_cast<Eigen::Index>(observables.size()), n);
    for (std::size_t r = 0; r < observables.size(); ++r) {
      const CMat& o = observables[r];
      if (o.rows() != basis.hilbert_dim || o.cols() != basis.hilbert_dim)
        throw Error("assemble_system: observable " + std::to_string(r + 1) + " has wrong dimension");
      if ((o - o.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
        throw Error("assemble_system: observable " + std::to_string(r + 1) + " is not Hermitian");
      sys.C.row(static_cast<Eigen::Index>(r)) = observable_row(basis, o).transpose();
    }
  }
  sys.x0 = Vec::Zero(n);
  return sys;
}

EmbeddedSystem embed_standard_form(const CoherenceSystem& sys) {
  const Eigen::Index n = sys.A.rows();
  EmbeddedSystem emb;
  emb.A_emb = Mat::Zero(n + 1, n + 1);
  emb.A_emb.topLeftCorner(n, n) = sys.A;
  emb.A_emb.topRightCorner(n, 1) = sys.beta;
  emb.N_emb.reserve(sys.N_list.size());
  for (const auto& nj : sys.N_list) {
    Mat e = Mat::Zero(n + 1, n + 1);
    e.topLeftCorner(n, n) = nj;
    emb.N_emb.push_back(std::move(e));
  }
  emb.C_emb = Mat::Zero(sys.C.rows(), n + 1);
  emb.C_emb.leftCols(n) = sys.C;
  emb.x_emb = Vec::Ones(n + 1);
  if (sys.x0.size() == n) emb.x_emb.head(n) = sys.x0;
  return emb;
}

Vec observable_row(const LieBasis& basis, const CMat& observable) {
  Vec row(basis.n);
  for (int k = 0; k < basis.n; ++k) row(k) = trace_product(basis[k], observable).real();
  return row;
}

CMat liouvillian_superoperator(const LieBasis& basis, const GkslParams& params,
                               const Vec& controls) {
  const int n = basis.n;
  const int dim = basis.hilbert_dim;
  validate_params(params, n);
  if (controls.size() != 0 && controls.size() != n)
    throw Error("liouvillian_superoperator: controls must have length n");

  CMat h = CMat::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    double coeff = params.theta(j);
    if (controls.size() != 0) coeff += controls(j);
    h += coeff * basis[j];
  }
  const CMat id = CMat::Identity(dim, dim);
  const cplx minus_i(0.0, -1.0);
  CMat l = minus_i * (linalg::kron(id, h) - linalg::kron(h.transpose(), id));

  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const cplx g = params.gamma(j, k);
      if (g == cplx(0.0, 0.0)) continue;
      const CMat kj = basis[k] * basis[j];
      l += g * (linalg::kron(basis[k].transpose(), basis[j]) - 0.5 * linalg::kron(id, kj) -
                0.5 * linalg::kron(kj.transpose(), id));
    }
  }
  return l;
}

CVec vectorize(const CMat& rho) {
  return Eigen::Map<const CVec>(rho.data(), rho.size());
}

CMat unvectorize(const CVec& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) throw Error("unvectorize: size mismatch");
  return Eigen::Map<const CMat>(v.data(), dim, dim);
}

Vec rho_to_coherence(const CMat& rho, const LieBasis& basis) {
  if (rho.rows() != basis.hilbert_dim || rho.cols() != basis.hilbert_dim)
    throw Error("rho_to_coherence: dimension mismatch");
  const cplx tr = rho.trace();
  if (std::abs(tr - cplx(1.0, 0.0)) > 1e-10)
    throw Error("rho_to_coherence: trace is " + std::to_string(tr.real()) + ", expected 1");
  Vec x(basis.n);
  for (int j = 0; j < basis.n; ++j) x(j) = trace_product(basis[j], rho).real();
  return x;
}

CMat coherence_to_rho(const Vec& x, const LieBasis& basis) {
  if (x.size() != basis.n) throw Error("coherence_to_rho: length mismatch");
  CMat rho = CMat::Identity(basis.hilbert_dim, basis.hilbert_dim) /
             static_cast<double>(basis.hilbert_dim);
  for (int j = 0; j < basis.n; ++j) rho += x(j) * basis[j];
  return rho;
}

Vec hamiltonian_coefficients(const LieBasis& basis, const CMat& hamiltonian) {
  return observable_row(basis, hamiltonian);
}

}  // namespace oqsid
