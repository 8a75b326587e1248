#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oqsid/liealg.hpp"
#include "oqsid/linalg.hpp"

namespace oqsid {

/// Vectorization index for gamma. General: r = j * n + k. Symmetric: the
/// upper-triangle pairs (j <= k) in row-major order.
class GammaIndexMap {
 public:
  explicit GammaIndexMap(int n);

  int n() const { return n_; }
  int size() const { return n_ * n_; }
  int symmetric_size() const { return n_ * (n_ + 1) / 2; }

  std::pair<int, int> forward(int r) const { return {r / n_, r % n_}; }
  int inverse(int j, int k) const { return j * n_ + k; }

  std::pair<int, int> symmetric_forward(int r) const { return sym_pairs_.at(static_cast<std::size_t>(r)); }
  /// Accepts either order of (j, k).
  int symmetric_inverse(int j, int k) const;

  /// Real symmetric matrix from its upper-triangle vector and back.
  Mat expand_symmetric(const Vec& v) const;
  Vec compress_symmetric(const Mat& m) const;

 private:
  int n_;
  std::vector<std::pair<int, int>> sym_pairs_;
  std::vector<int> sym_index_;
};

/// T1(j n + k, l) = -f_jkl, so that vec A_l = T1 theta.
Mat build_T1(const StructureTensors& tensors);

/// Linear maps from the GKSL parameters to (vec A, beta):
///   vec A_l = T1 theta, vec A_d = T2 vec gamma (general) = T3 gamma_sym
///   (symmetric), beta = beta_map vec gamma, and
///   M = [[T1, T2], [0, beta_map]] acting on (theta; vec gamma).
/// beta_map equals -(i/N) T1^T.
struct ReconstructionMatrices {
  int n = 0;
  int hilbert_dim = 0;
  bool symmetric = false;
  GammaIndexMap index{1};

  Mat T1;       // n^2 x n
  CMat T2;      // n^2 x n^2, general mode only
  Mat T3;       // n^2 x n(n+1)/2, symmetric mode only
  CMat beta_map;  // n x n^2
  CMat M;       // (n^2 + n) x (n + n^2), general mode only

  int rank_T1 = 0;
  int rank_T3 = 0;
  double kappa_T1 = 0.0;
  double kappa_T3 = 0.0;
  double kappa_M = 0.0;
  double norm_M = 0.0;
  double norm_M_inv = 0.0;

  Mat T1_pinv;
  Mat T3_pinv;
  CMat beta_map_pinv;
  CMat M_inv;  // empty when M is singular
};

/// Symmetric mode builds T1 and T3; general mode builds T1, T2 and M.
/// The beta map is built in both modes.
ReconstructionMatrices build_reconstruction_matrices(const StructureTensors& tensors,
                                                     int hilbert_dim, bool symmetric);

enum class RecoveryStatus {
  FullRecovery,
  GammaOnly,               // T1 check failed
  ThetaOnly,               // T3 check failed, beta not usable
  ThetaAndGammaFromBeta,   // T3 check failed, gamma from beta
  GammaFromBeta,           // general mode: M singular, gamma from beta
  NotRecoverable,
};

const char* to_string(RecoveryStatus s);

struct RecoveryOptions {
  double condition_cap = 1e12;
  double range_tol = 1e-8;
  double cutoff = -1.0;
};

struct RecoveredParams {
  Vec theta;   // empty when not recovered
  CMat gamma;  // empty when not recovered
  RecoveryStatus status = RecoveryStatus::NotRecoverable;
  bool has_theta = false;
  bool has_gamma = false;
  double residual_A = 0.0;
  double residual_beta = 0.0;
  double kappa = 0.0;                   // kappa of the matrix inverted on the main path
  double hermitian_projection = 0.0;    // ||gamma_raw - gamma||
  double theta_imag_residue = 0.0;
  std::vector<std::string> notes;
};

/// Solves M (theta; vec gamma) = (vec A; beta) when kappa(M) is below the
/// cap; otherwise falls back to gamma = pinv(beta_map) beta when beta lies
/// in the range of the beta map.
RecoveredParams reconstruct_general(const Mat& A, const Vec& beta,
                                    const ReconstructionMatrices& mats,
                                    const RecoveryOptions& options = {});

/// Splits A into its antisymmetric (Hamiltonian) and symmetric
/// (dissipative) parts and inverts T1 and T3, with the beta-based fallback
/// for gamma when T3 cannot be used.
RecoveredParams reconstruct_symmetric(const Mat& A, const ReconstructionMatrices& mats,
                                      const std::optional<Vec>& beta = std::nullopt,
                                      const RecoveryOptions& options = {});

struct ErrorBound {
  double bound = 0.0;
  bool valid = true;
  std::string status;
  double kappa = 0.0;
};

/// Upper bound on the parameter error when M is perturbed by delta_M
/// (spectral norm) and vec A by delta_A (2-norm):
///   ||M~^-1|| ||delta A|| + kappa / (||M|| / ||delta M|| - kappa) ||M^-1|| ||rhs||
/// with ||M~^-1|| <= ||M^-1|| / (1 - kappa ||delta M|| / ||M||).
ErrorBound error_bound(const ReconstructionMatrices& mats, double delta_M_norm, const Mat& A,
                       const Vec& beta, double delta_A_norm);

}  // namespace oqsid
