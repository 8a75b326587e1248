#pragma once

#include <vector>

#include "oqsid/linalg.hpp"
#include "oqsid/simulate.hpp"

namespace oqsid {

/// Discrete model of a system sampled on a multirate schedule.
/// G_i[i] = exp(A t_i) for i = 0..l+1 (G_i[0] = I, G_i[l+1] = G).
/// F[i-1] = F_i = exp(A (T - t_i)) F_{tau_i}, i = 1..l+1. Empty when the
/// model was fitted from autonomous data.
/// Gamma stacks C G_0, C G_1, ..., C G_l.
struct DiscreteMultirateModel {
  Mat G;
  std::vector<Mat> G_i;
  std::vector<Mat> F;
  Mat Gamma;
  Mat C;
  std::vector<double> partition;

  Eigen::Index order() const { return G.rows(); }
  int blocks() const { return static_cast<int>(partition.size()) - 1; }
};

struct SingleRateModel {
  double tau = 0.0;
  Mat G_tau;
  Mat F_tau;  // empty when F is unknown
};

struct SingleRateFamily {
  std::vector<SingleRateModel> rates;  // i = 1..l+1
  Mat C;
};

/// Model computed from known (A, B, C) via matrix exponentials.
DiscreteMultirateModel exact_multirate_model(const Mat& A, const Mat& B, const Mat& C,
                                             const SamplingSchedule& schedule);

struct FitOptions {
  /// Append a constant 1 to every state so that x' = A x + beta is fitted
  /// in its standard-form embedding.
  bool affine = false;
  double cutoff = -1.0;
};

/// Least-squares fit of x(kT + t_i) = G_i x(kT) over every frame and run
/// of an autonomous record. Uses state snapshots when present, otherwise
/// x = C^+ y (C must have full column rank).
DiscreteMultirateModel fit_multirate(const MeasurementRecord& record,
                                     const SamplingSchedule& schedule, int order,
                                     const FitOptions& options = {});

/// G_{tau_i} = pinv(Gamma_{i-1}) Gamma_i with Gamma_i = [C G_i; C G G_i; ...; C G^n G_i].
SingleRateFamily single_rate_models(const DiscreteMultirateModel& model, double cutoff = -1.0);

struct ReconstructOptions {
  double match_tol = 1e-6;
  /// Largest |k| in the log branch enumeration; 0 selects an estimate.
  int branch_limit = 0;
  double imag_tol = 1e-8;
};

struct ContinuousReconstruction {
  Mat A;
  Mat B;  // empty when the family carries no F_tau
  CVec eigenvalues;
  int reference_rate = 0;  // 0-based index of the G_tau whose eigenvectors build A
  int branch_limit = 0;
  /// Branch candidates per eigenvalue of the reference rate before intersecting.
  std::vector<int> candidates_before_intersection;
  double imag_residue = 0.0;
};

/// (Log(mu) + 2 pi i k) / tau for k = -limit..limit.
std::vector<cplx> branch_candidates(cplx mu, double tau, int limit);

/// Eigenvalues of A from the intersection of the per-rate logarithm sets;
/// A = g diag(lambda) g^-1 in the eigenbasis of the reference G_tau and
/// B = [int_0^tau exp(A t) dt]^-1 F_tau.
ContinuousReconstruction reconstruct_continuous(const SingleRateFamily& family,
                                                const ReconstructOptions& options = {});

}  // namespace oqsid
