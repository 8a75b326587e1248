#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "demo.hpp"
#include "oqsid/gksl.hpp"
#include "oqsid/identify.hpp"
#include "oqsid/ldsrec.hpp"
#include "oqsid/paramrec.hpp"
#include "oqsid/simulate.hpp"
#include "support/oracles.hpp"

using namespace oqsid;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (pass) detail << "failed: " << what << "; ";
      pass = false;
    }
  }
};

struct Algebra {
  LieBasis basis;
  StructureTensors tensors;
  explicit Algebra(int q) : basis(build_basis(q)), tensors(structure_constants(basis)) {}
};

const Algebra& algebra(int q) {
  static const Algebra a1(1);
  static const Algebra a2(2);
  return q == 1 ? a1 : a2;
}

CoherenceSystem system_of(const Algebra& a, const Vec& theta, const CMat& gamma, bool symmetric) {
  GkslParams p;
  p.theta = theta;
  p.gamma = gamma;
  p.symmetric = symmetric;
  return assemble_system(a.basis, a.tensors, p);
}

double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

CVec eigenvalues(const Mat& a) { return Eigen::EigenSolver<Mat>(a).eigenvalues(); }

double eig_distance(const CVec& a, const CVec& b) {
  auto key = [](cplx x, cplx y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); };
  std::vector<cplx> x(a.data(), a.data() + a.size());
  std::vector<cplx> y(b.data(), b.data() + b.size());
  if (x.size() != y.size()) return INFINITY;
  std::sort(x.begin(), x.end(), key);
  std::sort(y.begin(), y.end(), key);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

bool has_clause(const IdentifiabilityReport& r, const char* clause) {
  return std::find(r.failing_clauses.begin(), r.failing_clauses.end(), clause) != r.failing_clauses.end();
}

Outcome sparsity() {
  Outcome o;
  for (int q : {1, 2, 3}) {
    const SparsityReport r = verify_sparsity(structure_constants(build_basis(q)));
    o.require(r.max_f_count == 1 && r.max_g_count <= 1, "q=" + std::to_string(q));
    o.detail << "q=" << q << " f<=" << r.max_f_count << " g<=" << r.max_g_count << "; ";
  }
  return o;
}

Outcome raw_pauli() {
  Outcome o;
  const StructureTensors t = structure_constants(raw_pauli_basis());
  int mismatches = 0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        const double eps = (j == k || k == l || j == l) ? 0.0 : ((k - j + 3) % 3 == 1 ? 1.0 : -1.0);
        if (t.f(j, k, l) != 2.0 * eps || t.g(j, k, l) != 0.0) ++mismatches;
      }
  o.require(mismatches == 0, "entries differ");
  o.detail << mismatches << " mismatching entries; ";
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  oracle::Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Algebra& a = algebra(1 + trial % 2);
    const LieBasis& b = a.basis;
    const Vec theta = rng.vec(b.n);
    const CMat gamma = rng.psd(b.n, 0.5);
    const CoherenceSystem sys = system_of(a, theta, gamma, false);
    const Vec u = rng.vec(b.n);
    const CMat rho = rng.density(b.hilbert_dim);
    const Vec x = rho_to_coherence(rho, b);
    const Vec want = oracle::coherence(b.generators, oracle::lindblad_rhs(b.generators, theta, gamma, u, rho));
    Vec got = sys.A * x + sys.beta;
    for (int k = 0; k < b.n; ++k) got += u(k) * sys.N_list[static_cast<std::size_t>(k)] * x;
    worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
  }
  o.require(worst <= 1e-10, "derivative mismatch");
  o.detail << "max error " << worst << "; ";
  return o;
}

Outcome symmetric_structure() {
  Outcome o;
  oracle::Rng rng(1002);
  double sym = 0.0, beta = 0.0, anti = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Algebra& a = algebra(1 + trial % 2);
    const int n = a.basis.n;
    const CoherenceSystem sys = system_of(a, rng.vec(n), rng.symmetric_psd(n).cast<cplx>(), true);
    sym = std::max(sym, (sys.A_d - sys.A_d.transpose()).cwiseAbs().maxCoeff());
    beta = std::max(beta, sys.beta.norm());
    anti = std::max(anti, (sys.A_l + sys.A_l.transpose()).cwiseAbs().maxCoeff());
  }
  o.require(sym <= 1e-12, "A_d not symmetric");
  o.require(beta <= 1e-12, "beta nonzero");
  o.require(anti == 0.0, "A_l not antisymmetric");
  o.detail << "asym(A_d) " << sym << ", |beta| " << beta << ", sym(A_l) " << anti << "; ";
  return o;
}

Outcome symmetric_round_trip() {
  Outcome o;
  oracle::Rng rng(1003);
  double worst = 0.0;
  for (int q : {1, 2}) {
    const Algebra& a = algebra(q);
    const int n = a.basis.n;
    const ReconstructionMatrices s = build_reconstruction_matrices(a.tensors, a.basis.hilbert_dim, true);
    for (int trial = 0; trial < 50; ++trial) {
      const Vec theta = rng.vec(n);
      const CMat gamma = rng.symmetric_psd(n).cast<cplx>();
      const RecoveredParams r = reconstruct_symmetric(system_of(a, theta, gamma, true).A, s);
      o.require(r.status == RecoveryStatus::FullRecovery, "status");
      if (r.has_theta && r.has_gamma)
        worst = std::max({worst, (r.theta - theta).cwiseAbs().maxCoeff(), max_abs(r.gamma - gamma)});
    }
  }
  const Algebra& a = algebra(2);
  const demo::TwoQubitExample ex;
  const GkslParams p = demo::example_params(a.basis, ex);
  o.require(std::abs(p.gamma(2, 4).real() - (ex.g1z - ex.g2z) / 8.0) <= 1e-15, "example gamma_35");
  const CoherenceSystem sys = assemble_system(a.basis, a.tensors, p);
  const RecoveredParams r =
      reconstruct_symmetric(sys.A, build_reconstruction_matrices(a.tensors, 4, true), sys.beta);
  o.require(r.status == RecoveryStatus::FullRecovery, "example status");
  if (r.has_theta && r.has_gamma)
    worst = std::max({worst, (r.theta - p.theta).cwiseAbs().maxCoeff(), max_abs(r.gamma - p.gamma)});
  o.require(worst <= 1e-8, "recovery error");
  o.detail << "100 random + example, max error " << worst << "; ";
  return o;
}

Outcome general_round_trip() {
  Outcome o;
  for (int q : {1, 2}) {
    const ReconstructionMatrices g = build_reconstruction_matrices(algebra(q).tensors, 1 << q, false);
    o.detail << "q=" << q << " rank(M) " << linalg::numerical_rank(g.M) << "/" << g.M.cols() << " kappa(M) "
             << g.kappa_M << "; ";
  }
  oracle::Rng rng(1004);
  const Algebra& a = algebra(1);
  const ReconstructionMatrices g = build_reconstruction_matrices(a.tensors, 2, false);
  double worst = 0.0, kmin = INFINITY, kmax = 0.0;
  int used = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec theta = rng.vec(3);
    const CMat gamma = rng.psd(3);
    const CoherenceSystem sys = system_of(a, theta, gamma, false);
    const RecoveredParams r = reconstruct_general(sys.A, sys.beta, g);
    kmin = std::min(kmin, r.kappa);
    kmax = std::max(kmax, r.kappa);
    if (!(r.kappa < 1e10)) continue;
    ++used;
    o.require(r.status == RecoveryStatus::FullRecovery, "status");
    if (r.has_theta && r.has_gamma)
      worst = std::max({worst, (r.theta - theta).cwiseAbs().maxCoeff(), max_abs(r.gamma - gamma)});
  }
  o.require(used == 100, "kappa(M) >= 1e10");
  o.require(worst <= 1e-8, "recovery error");
  o.detail << used << " instances, per-instance kappa in [" << kmin << ", " << kmax << "], max error " << worst
           << "; ";
  return o;
}

Outcome t_matrices() {
  Outcome o;
  for (int q : {1, 2, 3}) {
    const StructureTensors t = structure_constants(build_basis(q));
    const int rank = linalg::numerical_rank(build_T1(t));
    o.require(rank == t.n(), "rank(T1) q=" + std::to_string(q));
    o.detail << "rank(T1) q=" << q << " " << rank << "/" << t.n() << "; ";
  }
  const ReconstructionMatrices s = build_reconstruction_matrices(algebra(2).tensors, 4, true);
  const int rank = linalg::numerical_rank(s.T3);
  o.require(s.T3.rows() == 225 && s.T3.cols() == 120, "T3 shape");
  o.require(rank == 120, "T3 rank");
  o.detail << "T3 " << s.T3.rows() << "x" << s.T3.cols() << " rank " << rank << "; ";
  return o;
}

Outcome continuous_reconstruction() {
  Outcome o;
  oracle::Rng rng(1005);
  double eig_err = 0.0, g_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 7;
    Mat A = rng.mat(n, n);
    A *= 4.0 / linalg::spectral_norm(A);
    A -= (eigenvalues(A).real().maxCoeff() + rng.uniform(0.05, 0.5)) * Mat::Identity(n, n);
    const SamplingSchedule s = golden_schedule(1.0, 1 + trial % 3);
    const DiscreteMultirateModel m = exact_multirate_model(A, Mat(), Mat(Mat::Identity(n, n)), s);
    const ContinuousReconstruction cr = reconstruct_continuous(single_rate_models(m));
    eig_err = std::max(eig_err, eig_distance(cr.eigenvalues, eigenvalues(A)));
    g_err = std::max(g_err, (linalg::expm(Mat(cr.A * s.period)) - m.G).norm());
  }

  const double w = 5.0;
  Mat A(2, 2);
  A << 0, w, -w, 0;
  const SamplingSchedule s = golden_schedule(2.0, 1);
  bool aliased = true;
  for (double t : s.increments()) aliased = aliased && w * t > std::numbers::pi;
  const SingleRateFamily fam = single_rate_models(exact_multirate_model(A, Mat(), Mat(Mat::Identity(2, 2)), s));
  bool single_ambiguous = true;
  for (const auto& r : fam.rates) {
    int plausible = 0;
    for (const cplx& c : branch_candidates(eigenvalues(r.G_tau)(0), r.tau, 5))
      if (std::abs(c.imag()) <= 2.0 * w) ++plausible;
    single_ambiguous = single_ambiguous && plausible >= 2;
  }
  const ContinuousReconstruction cr = reconstruct_continuous(fam);
  CVec want(2);
  want << cplx(0, w), cplx(0, -w);
  const double alias_err = eig_distance(cr.eigenvalues, want);
  o.require(eig_err <= 1e-8 && g_err <= 1e-8, "random systems");
  o.require(aliased && single_ambiguous, "aliased case not ambiguous per rate");
  o.require(alias_err <= 1e-8, "aliased eigenvalues");
  o.detail << "20 random: eig error " << eig_err << ", exp(A'T) error " << g_err << "; aliased |Im|T="
           << w * s.period << ", eig error " << alias_err << "; ";
  return o;
}

Outcome verdicts() {
  Outcome o;
  oracle::Rng rng(1006);
  const LieBasis b = build_basis(1);
  for (int trial = 0; trial < 5; ++trial) {
    ReportInputs in;
    in.system = system_of(algebra(1), rng.vec(3), rng.psd(3, 0.3), false);
    in.schedule = golden_schedule(1.0, 2, 3);
    const IdentifiabilityReport ok = identifiability_report(IdentMode::Autonomous, in);
    const LinearRanks lr = linear_rank_test(in.system.A, Mat(Mat::Identity(3, 3)), in.system.C);
    o.require(ok.verdict == Verdict::Identifiable && lr.rank_CM == 3 && lr.rank_OM == 3, "golden with B=I");

    in.schedule = uniform_schedule(1.0, 2, 3);
    const IdentifiabilityReport uni = identifiability_report(IdentMode::Autonomous, in);
    o.require(uni.verdict == Verdict::NotIdentifiable && has_clause(uni, kClauseRationalRatio), "uniform");

    in.system.x0 = rho_to_coherence(rng.density(2), b);
    in.pulses = make_pulse_family(0.0, {0.2, 0.4}, trial % 3).pulses;
    const IdentifiabilityReport zero = identifiability_report(IdentMode::Controlled, in);
    o.require(zero.verdict == Verdict::NotIdentifiable && has_clause(zero, kClauseDegeneratePulses), "alpha=0");
  }

  int agree = 0, total = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 3;
    std::vector<Mat> gens;
    for (int g = 0; g < 1 + trial % 3; ++g) gens.push_back(rng.mat(n, n));
    Vec seed = rng.vec(n);
    if (trial % 2 == 1) {
      const int k = 1 + trial % (n - 1);
      for (auto& g : gens) g.bottomLeftCorner(n - k, k).setZero();
      seed.tail(n - k).setZero();
    }
    const std::vector<Mat> N(gens.begin() + 1, gens.end());
    const BilinearRanks br = bilinear_span_test(gens.front(), N, seed, Mat(Mat::Identity(n, n)));
    ++total;
    if (br.controllability.rank == oracle::brute_force_word_rank(gens, {seed}, n - 1)) ++agree;
  }
  o.require(agree == total, "span test vs brute force");
  o.detail << "span test agrees on " << agree << "/" << total << "; ";
  return o;
}

Outcome physicality() {
  Outcome o;
  oracle::Rng rng(1007);
  double trace_err = 0.0, min_eig = 1.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Algebra& a = algebra(1 + trial % 2);
    const LieBasis& b = a.basis;
    const CoherenceSystem sys = system_of(a, rng.vec(b.n), rng.psd(b.n, 0.3), false);
    const Vec x0 = rho_to_coherence(rng.density(b.hilbert_dim), b);
    const Pulse pulse{0.3, rng.uniform(-2.0, 2.0), static_cast<int>(rng.uniform(0, b.n))};
    const MeasurementRecord rec = simulate(BilinearModel::from(sys), {pulse}, golden_schedule(1.0, 2, 2), x0);
    for (const auto& smp : rec.samples) {
      const CMat rho = coherence_to_rho(smp.x, b);
      trace_err = std::max(trace_err, std::abs(rho.trace() - 1.0));
      min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<CMat>(rho).eigenvalues().minCoeff());
    }
  }

  const CoherenceSystem sys = system_of(algebra(1), rng.vec(3), rng.psd(3, 0.5), false);
  const Vec x0 = rho_to_coherence(rng.density(2), build_basis(1));
  Mat aug = Mat::Zero(4, 4);
  aug.topLeftCorner(3, 3) = sys.A;
  aug.topRightCorner(3, 1) = sys.beta;
  Vec x0_aug(4);
  x0_aug << x0, 1.0;
  const Vec exact = (oracle::taylor_expm(Mat(aug * 2.0)) * x0_aug).head(3);
  const double e1 = (rk4_advance(sys.A, sys.beta, Mat(), x0, 2.0, 20) - exact).norm();
  const double e2 = (rk4_advance(sys.A, sys.beta, Mat(), x0, 2.0, 40) - exact).norm();
  const double ratio = e1 / e2;
  o.require(trace_err <= 1e-12, "trace");
  o.require(min_eig >= -1e-9, "positivity");
  o.require(ratio > 13.0 && ratio < 19.0, "RK4 order");
  o.detail << "trace error " << trace_err << ", min eig " << min_eig << ", RK4 ratio " << ratio << "; ";
  return o;
}

Outcome error_bound_mc() {
  Outcome o;
  oracle::Rng rng(1008);
  const Algebra& a = algebra(1);
  const ReconstructionMatrices g = build_reconstruction_matrices(a.tensors, 2, false);
  int violations = 0;
  double tightest = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec theta = rng.vec(3);
    const CMat gamma = rng.psd(3);
    const CoherenceSystem sys = system_of(a, theta, gamma, false);
    CMat dM = rng.cmat(12, 12);
    dM *= 1e-10 * std::pow(10.0, rng.uniform(0.0, 3.0)) / linalg::spectral_norm(dM);
    CVec dA = rng.cmat(12, 1);
    dA *= 1e-9 / dA.norm();
    CVec rhs(12);
    rhs.head(9) = linalg::vec_row_major(sys.A).cast<cplx>();
    rhs.tail(3) = sys.beta.cast<cplx>();
    CVec y(12);
    y.head(3) = theta.cast<cplx>();
    y.tail(9) = linalg::vec_row_major(gamma);
    const double observed = ((g.M + dM).fullPivLu().solve(CVec(rhs + dA)) - y).norm();
    const ErrorBound eb = error_bound(g, linalg::spectral_norm(dM), sys.A, sys.beta, dA.norm());
    if (!eb.valid || observed > eb.bound) ++violations;
    else tightest = std::max(tightest, observed / eb.bound);
  }
  o.require(violations == 0, "bound exceeded");
  o.detail << violations << " violations in 100, max observed/bound " << tightest << "; ";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "structure-constant sparsity", 10.0, sparsity},
      {2, "unnormalized Pauli structure constants", 0.0, raw_pauli},
      {3, "coherence derivative matches the Lindblad oracle", 30.0, oracle_equivalence},
      {4, "symmetric gamma structure", 0.0, symmetric_structure},
      {5, "parameter round trip, symmetric mode", 60.0, symmetric_round_trip},
      {6, "parameter round trip, general mode", 0.0, general_round_trip},
      {7, "T-matrix ranks and shapes", 0.0, t_matrices},
      {8, "continuous LDS reconstruction", 60.0, continuous_reconstruction},
      {9, "identifiability verdicts", 0.0, verdicts},
      {10, "simulator physicality and RK4 order", 0.0, physicality},
      {11, "error bound dominates observed error", 0.0, error_bound_mc},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what() << "; ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0.0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail << "exceeded " << c.limit_s << " s; ";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s%.2f s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
