#include "demo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "oqsid/ldsrec.hpp"
#include "oqsid/simulate.hpp"

namespace oqsid::demo {

namespace {

int idx(const LieBasis& basis, const char* word) {
  const int j = generator_index(basis, word);
  if (j < 0) throw Error(std::string("demo: missing generator ") + word);
  return j;
}

}  // namespace

GkslParams example_params(const LieBasis& basis, const TwoQubitExample& ex) {
  if (basis.num_qubits != 2) throw Error("demo: the example needs the two-qubit basis");
  const int n = basis.n;
  GkslParams p;
  p.symmetric = true;
  p.theta = Vec::Zero(n);
  p.theta(idx(basis, "zI")) = ex.omega1;
  p.theta(idx(basis, "Iz")) = ex.omega2;
  p.theta(idx(basis, "xx")) = 2.0 * ex.delta;
  p.theta(idx(basis, "yy")) = 2.0 * ex.delta;

  Mat g = Mat::Zero(n, n);
  g(0, 0) = 2.0 * ex.g1m;
  g(1, 1) = 2.0 * ex.g2p;
  g(2, 2) = (ex.g1z + ex.g2z) / 8.0;
  g(3, 3) = (ex.g1p + ex.g2m) / 2.0;
  g(4, 4) = (ex.g1z + ex.g2z) / 8.0;
  g(5, 5) = (ex.g1p + ex.g2m) / 2.0;
  g(2, 4) = g(4, 2) = (ex.g1z - ex.g2z) / 8.0;
  g(3, 5) = g(5, 3) = -(ex.g1p - ex.g2m) / 2.0;
  p.gamma = g.cast<cplx>();
  return p;
}

TwoQubitExample example_from_params(const LieBasis& basis, const Vec& theta, const Mat& g) {
  TwoQubitExample ex;
  ex.omega1 = theta(idx(basis, "zI"));
  ex.omega2 = theta(idx(basis, "Iz"));
  ex.delta = 0.25 * (theta(idx(basis, "xx")) + theta(idx(basis, "yy")));
  ex.g1m = g(0, 0) / 2.0;
  ex.g2p = g(1, 1) / 2.0;
  ex.g1z = 4.0 * (g(2, 2) + g(2, 4));
  ex.g2z = 4.0 * (g(2, 2) - g(2, 4));
  ex.g1p = g(3, 3) - g(3, 5);
  ex.g2m = g(3, 3) + g(3, 5);
  return ex;
}

DemoResult run_two_qubit(const TwoQubitExample& ex, const DemoOptions& options) {
  const LieBasis basis = build_basis(2);
  const StructureTensors tensors = structure_constants(basis);
  const int n = basis.n;
  const GkslParams params = example_params(basis, ex);
  const CoherenceSystem sys = assemble_system(basis, tensors, params);

  SamplingSchedule sched = golden_schedule(options.period, options.interior_points, options.frames);
  const auto taus = sched.increments();
  SimulationOptions sim;
  sim.step = *std::min_element(taus.begin(), taus.end()) / options.steps_per_min_increment;
  sim.threads = options.threads;

  // One run per generator direction; 1/4 +- 0.1 keeps every rho positive.
  const bool affine = sys.beta.norm() > 1e-12;
  const BilinearModel model = BilinearModel::from(sys);
  std::vector<MeasurementRecord> runs;
  for (int j = 0; j < n + (affine ? 1 : 0); ++j) {
    Vec x0 = Vec::Zero(n);
    if (j < n) x0(j) = 0.2;
    runs.push_back(simulate(model, {}, sched, x0, sim));
  }
  const MeasurementRecord record = merge_records(runs);

  DemoResult out;
  out.truth = ex;
  ReportInputs in;
  in.system = sys;
  in.schedule = sched;
  out.report = identifiability_report(IdentMode::Autonomous, in);

  FitOptions fit;
  fit.affine = affine;
  const DiscreteMultirateModel dm = fit_multirate(record, sched, n + (affine ? 1 : 0), fit);
  const ContinuousReconstruction cr = reconstruct_continuous(single_rate_models(dm));
  const Mat A_hat = cr.A.topLeftCorner(n, n);
  const Vec beta_hat = affine ? Vec(cr.A.topRightCorner(n, 1)) : Vec(Vec::Zero(n));
  out.max_A_error = (A_hat - sys.A).cwiseAbs().maxCoeff();

  const ReconstructionMatrices mats = build_reconstruction_matrices(tensors, basis.hilbert_dim, true);
  out.params = reconstruct_symmetric(A_hat, mats, beta_hat);
  if (out.params.status != RecoveryStatus::FullRecovery)
    throw Error(std::string("demo: parameter recovery ended with status ") + to_string(out.params.status));
  out.recovered = example_from_params(basis, out.params.theta, out.params.gamma.real());

  const double pairs[][2] = {{ex.omega1, out.recovered.omega1}, {ex.omega2, out.recovered.omega2},
                             {ex.delta, out.recovered.delta},   {ex.g1z, out.recovered.g1z},
                             {ex.g2z, out.recovered.g2z},       {ex.g1m, out.recovered.g1m},
                             {ex.g2m, out.recovered.g2m},       {ex.g1p, out.recovered.g1p},
                             {ex.g2p, out.recovered.g2p}};
  for (const auto& p : pairs) out.max_parameter_error = std::max(out.max_parameter_error, std::abs(p[0] - p[1]));
  return out;
}

void print_summary(std::ostream& os, const DemoResult& r) {
  os << "identifiability: " << to_string(r.report.verdict) << " (rank OM " << r.report.rank_OM
     << ", rank CM " << r.report.rank_CM << " of " << r.report.required_rank << ")\n";
  os << "parameter recovery: " << to_string(r.params.status) << ", max |A - A_hat| = "
     << std::scientific << std::setprecision(2) << r.max_A_error << "\n\n";
  os << std::left << std::setw(8) << "param" << std::right << std::setw(22) << "truth" << std::setw(22)
     << "recovered" << std::setw(12) << "|error|" << "\n";
  auto row = [&](const char* name, double t, double h) {
    os << std::left << std::setw(8) << name << std::right << std::fixed << std::setprecision(15)
       << std::setw(22) << t << std::setw(22) << h << std::scientific << std::setprecision(2)
       << std::setw(12) << std::abs(t - h) << "\n";
  };
  row("omega1", r.truth.omega1, r.recovered.omega1);
  row("omega2", r.truth.omega2, r.recovered.omega2);
  row("delta", r.truth.delta, r.recovered.delta);
  row("g1z", r.truth.g1z, r.recovered.g1z);
  row("g2z", r.truth.g2z, r.recovered.g2z);
  row("g1-", r.truth.g1m, r.recovered.g1m);
  row("g2-", r.truth.g2m, r.recovered.g2m);
  row("g1+", r.truth.g1p, r.recovered.g1p);
  row("g2+", r.truth.g2p, r.recovered.g2p);
  os << "\nmax parameter error: " << std::scientific << std::setprecision(2) << r.max_parameter_error << "\n";
}

}  // namespace oqsid::demo
