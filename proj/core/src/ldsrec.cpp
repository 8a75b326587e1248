#include "oqsid/ldsrec.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace oqsid {

namespace {

Mat observability_stack(const Mat& C, const Mat& G) {
  const Eigen::Index n = G.rows();
  const Eigen::Index p = C.rows();
  Mat o(p * (n + 1), n);
  Mat block = C;
  for (Eigen::Index k = 0; k <= n; ++k) {
    o.middleRows(k * p, p) = block;
    block = block * G;
  }
  return o;
}

Mat gamma_stack(const Mat& C, const std::vector<Mat>& G_i, std::size_t count) {
  const Eigen::Index p = C.rows();
  Mat gamma(p * static_cast<Eigen::Index>(count), C.cols());
  for (std::size_t i = 0; i < count; ++i)
    gamma.middleRows(static_cast<Eigen::Index>(i) * p, p) = C * G_i[i];
  return gamma;
}

}  // namespace

DiscreteMultirateModel exact_multirate_model(const Mat& A, const Mat& B, const Mat& C,
                                             const SamplingSchedule& schedule) {
  validate_schedule(schedule);
  if (A.rows() != A.cols()) throw Error("exact_multirate_model: A must be square");
  if (B.size() && B.rows() != A.rows()) throw Error("exact_multirate_model: B has wrong row count");
  if (C.cols() != A.cols()) throw Error("exact_multirate_model: C has wrong column count");

  DiscreteMultirateModel m;
  m.partition = schedule.partition;
  m.C = C;
  const double T = schedule.period;
  for (double t : schedule.partition) m.G_i.push_back(linalg::expm(Mat(A * t)));
  m.G = m.G_i.back();
  if (B.size()) {
    const auto taus = schedule.increments();
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const Mat f_tau = linalg::integral_expm(A, taus[i]) * B;
      m.F.push_back(linalg::expm(Mat(A * (T - schedule.partition[i + 1]))) * f_tau);
    }
  }
  m.Gamma = gamma_stack(C, m.G_i, schedule.partition.size() - 1);
  return m;
}

DiscreteMultirateModel fit_multirate(const MeasurementRecord& record,
                                     const SamplingSchedule& schedule, int order,
                                     const FitOptions& options) {
  validate_schedule(schedule);
  if (schedule.frames < 2)
    throw Error("fit_multirate: insufficient frames (M = " + std::to_string(schedule.frames) +
                ", need at least 2)");
  if (record.samples.empty()) throw Error("fit_multirate: empty record");

  const bool use_states = record.has_states();
  Mat c_pinv;
  if (!use_states) {
    if (record.C.size() == 0) throw Error("fit_multirate: record has neither states nor C");
    if (linalg::numerical_rank(record.C, options.cutoff) < record.C.cols())
      throw Error("fit_multirate: C lacks full column rank; states cannot be recovered from outputs");
    c_pinv = linalg::pinv(record.C);
  }

  std::map<std::tuple<int, int, int>, Vec> states;
  for (const auto& s : record.samples) {
    Vec x = use_states ? s.x : Vec(c_pinv * s.y);
    if (options.affine) {
      x.conservativeResize(x.size() + 1);
      x(x.size() - 1) = 1.0;
    }
    states[{s.run, s.frame, s.offset_index}] = std::move(x);
  }
  const Eigen::Index n = states.begin()->second.size();
  if (n != order)
    throw Error("fit_multirate: model order " + std::to_string(order) + " does not match state size " +
                std::to_string(n));

  const int blocks = static_cast<int>(schedule.partition.size()) - 1;  // l + 1
  DiscreteMultirateModel m;
  m.partition = schedule.partition;
  m.G_i.push_back(Mat::Identity(n, n));
  for (int i = 1; i <= blocks; ++i) {
    std::vector<Vec> x0s;
    std::vector<Vec> xis;
    for (int run = 0; run < record.runs; ++run) {
      for (int k = 0; k < schedule.frames; ++k) {
        auto a = states.find({run, k, 0});
        auto b = i == blocks ? states.find({run, k + 1, 0}) : states.find({run, k, i});
        if (a == states.end() || b == states.end()) continue;
        x0s.push_back(a->second);
        xis.push_back(b->second);
      }
    }
    Mat X0(n, static_cast<Eigen::Index>(x0s.size()));
    Mat Xi(n, static_cast<Eigen::Index>(xis.size()));
    for (std::size_t c = 0; c < x0s.size(); ++c) {
      X0.col(static_cast<Eigen::Index>(c)) = x0s[c];
      Xi.col(static_cast<Eigen::Index>(c)) = xis[c];
    }
    const int rank = X0.cols() ? linalg::numerical_rank(X0, options.cutoff) : 0;
    if (rank < n)
      throw Error("fit_multirate: rank-deficient regression for block i = " + std::to_string(i) +
                  " (rank " + std::to_string(rank) + " < " + std::to_string(n) +
                  "); use more runs with distinct initial states");
    m.G_i.push_back(Xi * linalg::pinv(X0));
  }
  m.G = m.G_i.back();

  if (record.C.size()) {
    m.C = record.C;
    if (options.affine) {
      m.C.conservativeResize(Eigen::NoChange, n);
      m.C.col(n - 1).setZero();
    }
  } else {
    m.C = Mat::Identity(n, n);
  }
  m.Gamma = gamma_stack(m.C, m.G_i, static_cast<std::size_t>(blocks));
  return m;
}

SingleRateFamily single_rate_models(const DiscreteMultirateModel& model, double cutoff) {
  const Eigen::Index n = model.order();
  const int blocks = model.blocks();
  if (static_cast<int>(model.G_i.size()) != blocks + 1)
    throw Error("single_rate_models: expected " + std::to_string(blocks + 1) + " G_i matrices");
  if (!model.F.empty() && static_cast<int>(model.F.size()) != blocks)
    throw Error("single_rate_models: expected " + std::to_string(blocks) + " F_i blocks");

  const Mat O = observability_stack(model.C, model.G);
  Eigen::PartialPivLU<Mat> g_lu(model.G);

  SingleRateFamily fam;
  fam.C = model.C;
  Mat gamma_prev = O * model.G_i[0];
  for (int i = 1; i <= blocks; ++i) {
    const int rank = linalg::numerical_rank(gamma_prev, cutoff);
    if (rank < n)
      throw Error("single_rate_models: Gamma_" + std::to_string(i - 1) + " is rank-deficient (rank " +
                  std::to_string(rank) + " < " + std::to_string(n) + ") at i = " + std::to_string(i) +
                  "; observability lost");
    const Mat gamma_i = O * model.G_i[static_cast<std::size_t>(i)];
    SingleRateModel r;
    r.tau = model.partition[static_cast<std::size_t>(i)] - model.partition[static_cast<std::size_t>(i) - 1];
    r.G_tau = linalg::pinv(gamma_prev) * gamma_i;
    if (!model.F.empty()) {
      const Mat& f = model.F[static_cast<std::size_t>(i) - 1];
      r.F_tau = i == blocks ? f : Mat(g_lu.solve(model.G_i[static_cast<std::size_t>(i)] * f));
    }
    fam.rates.push_back(std::move(r));
    gamma_prev = gamma_i;
  }
  return fam;
}

std::vector<cplx> branch_candidates(cplx mu, double tau, int limit) {
  if (std::abs(mu) == 0.0) throw Error("branch_candidates: zero eigenvalue has no logarithm");
  const cplx principal = std::log(mu);
  std::vector<cplx> out;
  for (int k = -limit; k <= limit; ++k)
    out.push_back((principal + cplx(0.0, 2.0 * std::numbers::pi * k)) / tau);
  return out;
}

ContinuousReconstruction reconstruct_continuous(const SingleRateFamily& family,
                                                const ReconstructOptions& options) {
  const auto& rates = family.rates;
  if (rates.empty()) throw Error("reconstruct_continuous: empty family");
  const Eigen::Index n = rates.front().G_tau.rows();
  for (const auto& r : rates)
    if (r.G_tau.rows() != n || r.G_tau.cols() != n || !(r.tau > 0.0))
      throw Error("reconstruct_continuous: inconsistent single-rate model");

  std::vector<CVec> eigs;
  std::vector<CMat> vecs;
  for (const auto& r : rates) {
    Eigen::EigenSolver<Mat> es(r.G_tau);
    if (es.info() != Eigen::Success) throw Error("reconstruct_continuous: eigendecomposition failed");
    eigs.push_back(es.eigenvalues());
    vecs.push_back(es.eigenvectors());
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(eigs.back()(i)) == 0.0)
        throw Error("reconstruct_continuous: singular G_tau has no logarithm");
  }

  ContinuousReconstruction out;
  std::size_t ref = 0;
  std::size_t fine = 0;
  for (std::size_t j = 1; j < rates.size(); ++j) {
    if (rates[j].tau > rates[ref].tau) ref = j;
    if (rates[j].tau < rates[fine].tau) fine = j;
  }
  out.reference_rate = static_cast<int>(ref);

  const CMat& g = vecs[ref];
  if (linalg::condition_number(g) > 1e12)
    throw Error("reconstruct_continuous: G_tau is not diagonalizable; Jordan-structure reconstruction is unsupported");

  int limit = options.branch_limit;
  if (limit <= 0) {
    // |Im lambda| is taken to be resolvable by the finest rate.
    double est = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) est = std::max(est, std::abs(std::log(eigs[fine](i))));
    est = est / rates[fine].tau + std::numbers::pi / rates[fine].tau;
    limit = std::max(5, static_cast<int>(std::ceil(est * rates[ref].tau / (2.0 * std::numbers::pi))) + 2);
  }
  out.branch_limit = limit;

  auto matches_rate = [&](cplx c, std::size_t j) {
    const double tau = rates[j].tau;
    for (Eigen::Index i = 0; i < n; ++i) {
      const cplx lg = std::log(eigs[j](i));
      const double k = std::round((c * tau - lg).imag() / (2.0 * std::numbers::pi));
      const cplx cand = (lg + cplx(0.0, 2.0 * std::numbers::pi * k)) / tau;
      if (std::abs(cand - c) <= options.match_tol * std::max(1.0, std::abs(c))) return true;
    }
    return false;
  };

  out.eigenvalues.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto cands = branch_candidates(eigs[ref](i), rates[ref].tau, limit);
    out.candidates_before_intersection.push_back(static_cast<int>(cands.size()));
    std::vector<cplx> kept;
    for (const cplx& c : cands) {
      bool all = true;
      for (std::size_t j = 0; j < rates.size() && all; ++j)
        if (j != ref) all = matches_rate(c, j);
      if (all) kept.push_back(c);
    }
    if (kept.empty())
      throw Error("reconstruct_continuous: sampling insufficient / branch ambiguity unresolved "
                  "(empty intersection for eigenvalue " + std::to_string(i + 1) + ")");
    if (kept.size() > 1)
      throw Error("reconstruct_continuous: sampling insufficient / branch ambiguity unresolved (" +
                  std::to_string(kept.size()) + " branches survive for eigenvalue " +
                  std::to_string(i + 1) + ")");
    out.eigenvalues(i) = kept.front();
  }

  const CMat a_c = g * out.eigenvalues.asDiagonal() * g.inverse();
  out.A = a_c.real();
  out.imag_residue = a_c.imag().cwiseAbs().maxCoeff();
  if (out.imag_residue > options.imag_tol * (1.0 + out.A.cwiseAbs().maxCoeff()))
    throw Error("reconstruct_continuous: reconstructed A has imaginary residue " +
                std::to_string(out.imag_residue));

  const Mat& f_tau = rates[ref].F_tau;
  if (f_tau.size()) {
    const Mat w = linalg::integral_expm(out.A, rates[ref].tau);
    out.B = w.partialPivLu().solve(f_tau);
  }
  return out;
}

}  // namespace oqsid
