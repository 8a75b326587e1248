#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oqsid/liealg.hpp"
#include "oqsid/linalg.hpp"

namespace oqsid {

/// Hamiltonian coefficients and Kossakowski matrix of a time-independent
/// GKSL generator, expressed in a LieBasis.
struct GkslParams {
  Vec theta;   // H = sum_j theta_j F_j
  CMat gamma;  // Hermitian n x n
  bool symmetric = false;
};

/// Result of the physical-mode check. A negative eigenvalue is reported,
/// never rejected: non-CP generators are legitimate inputs.
struct ParamsCheck {
  double hermiticity_error = 0.0;
  double symmetry_error = 0.0;
  double min_eigenvalue = 0.0;
  bool positive_semidefinite = true;
  std::vector<std::string> warnings;
};

/// Validates shapes and Hermiticity (1e-12); throws on violation.
ParamsCheck validate_params(const GkslParams& params, int n);

/// Coherence-vector form  dx/dt = (A_l + A_d) x + beta + sum_j u_j N_j x,
/// y = C x.
struct CoherenceSystem {
  int n = 0;
  Mat A_l;
  Mat A_d;
  Mat A;
  Vec beta;
  std::vector<Mat> N_list;
  Mat C;
  Vec x0;
};

/// Standard-form embedding: A_emb = [[A, beta], [0, 0]], N_emb = diag(N, 0),
/// x_emb = [x; 1].
struct EmbeddedSystem {
  Mat A_emb;
  std::vector<Mat> N_emb;
  Mat C_emb;
  Vec x_emb;
};

/// Imaginary residue allowed when truncating complex intermediates to real.
inline constexpr double kImagResidueLimit = 1e-10;

/// Calls visit(j, k, l, m, D^{(j,k)}_{lm}) for every structurally nonzero
/// entry of the dissipation tensor
///   D^{(j,k)}_{lm} = 1/4 sum_p ( z_{lpk} f_{jmp} + conj(z_{mpk}) f_{jlp} ),
/// so that A_d(j, k) = -sum_{l,m} gamma_{lm} D^{(j,k)}_{lm}. A given index
/// tuple may be visited more than once; contributions add.
void for_each_dissipation_term(
    const StructureTensors& tensors,
    const std::function<void(int j, int k, int l, int m, cplx value)>& visit);

/// Builds A_l, A_d, beta, N_j and C. With no observables C is the identity.
CoherenceSystem assemble_system(const LieBasis& basis, const StructureTensors& tensors,
                                const GkslParams& params,
                                const std::vector<CMat>& observables = {});

EmbeddedSystem embed_standard_form(const CoherenceSystem& sys);

/// Row of C for one Hermitian observable: o_k = Tr(F_k O).
Vec observable_row(const LieBasis& basis, const CMat& observable);

/// Generator L with d vec(rho)/dt = L vec(rho), column-stacking vec, built
/// directly from H = sum (theta_j + u_j) F_j and the dissipator. `controls`
/// may be empty (no drive) or length n.
CMat liouvillian_superoperator(const LieBasis& basis, const GkslParams& params,
                               const Vec& controls = Vec());

/// Column-stacking vectorization and its inverse.
CVec vectorize(const CMat& rho);
CMat unvectorize(const CVec& v, int dim);

/// x_j = Tr(F_j rho). Rejects |Tr rho - 1| > 1e-10.
Vec rho_to_coherence(const CMat& rho, const LieBasis& basis);

/// rho = 1/N + sum_j x_j F_j.
CMat coherence_to_rho(const Vec& x, const LieBasis& basis);

/// Hamiltonian coefficients theta_j = Tr(F_j H) of a Hermitian operator.
Vec hamiltonian_coefficients(const LieBasis& basis, const CMat& hamiltonian);

}  // namespace oqsid
