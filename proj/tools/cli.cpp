#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "demo.hpp"
#include "io.hpp"

namespace oqsid::cli {

namespace {

void distinct_paths(const std::vector<std::string>& inputs, const std::string& output) {
  namespace fs = std::filesystem;
  for (const auto& in : inputs) {
    if (in.empty()) continue;
    std::error_code ec;
    if (in == output || (fs::exists(output) && fs::equivalent(in, output, ec)))
      throw Error("output path " + output + " would overwrite input " + in);
  }
}

struct Args {
  std::string basis, params, system, schedule, pulses, record, model, out, report, a_path, beta_path;
  int qubits = 1;
  std::optional<int> frames;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> step;
  bool states = false;
  std::string mode = "auto";
  long word_cap = 0;
  int order = 0;
  bool affine = false;
  double match_tol = 1e-6;
  int branch_limit = 0;
  bool symmetric = false;
  double condition_cap = 1e12;
  double range_tol = 1e-8;
  std::string demo_name;
};

int cmd_basis(const Args& a, std::ostream& out) {
  const LieBasis basis = build_basis(a.qubits);
  const StructureTensors t = structure_constants(basis);
  io::write_json(a.out, io::basis_to_json(basis, t));
  out << "wrote " << basis.n << " generators to " << a.out << "\n";
  return 0;
}

int cmd_build(const Args& a, std::ostream& out) {
  distinct_paths({a.basis, a.params}, a.out);
  const LieBasis basis = io::basis_from_json(io::read_json(a.basis));
  const io::ParamsFile pf = io::params_from_json(io::read_json(a.params), basis.n, basis.hilbert_dim);
  const ParamsCheck check = validate_params(pf.params, basis.n);
  for (const auto& w : check.warnings) out << "warning: " << w << "\n";
  io::SystemFile sf;
  sf.num_qubits = basis.num_qubits;
  sf.system = assemble_system(basis, structure_constants(basis), pf.params, pf.observables);
  if (pf.x0) sf.system.x0 = *pf.x0;
  io::write_json(a.out, io::system_to_json(sf));
  out << "wrote system (n = " << basis.n << ") to " << a.out << "\n";
  return 0;
}

int cmd_simulate(const Args& a, std::ostream& out) {
  distinct_paths({a.system, a.schedule, a.pulses}, a.out);
  const io::SystemFile sf = io::system_from_json(io::read_json(a.system));
  SamplingSchedule sched = io::schedule_from_json(io::read_json(a.schedule));
  if (a.frames) {
    sched.frames = *a.frames;
    validate_schedule(sched);
  }
  std::vector<Pulse> pulses;
  if (!a.pulses.empty()) pulses = io::pulses_from_json(io::read_json(a.pulses));
  SimulationOptions opts;
  opts.noise_sigma = a.noise_sigma;
  opts.seed = a.seed;
  opts.step = a.step;
  opts.store_states = a.states;
  const MeasurementRecord rec =
      simulate(BilinearModel::from(sf.system), pulses, sched, sf.system.x0, opts);
  io::write_json(a.out, io::record_to_json(rec));
  out << "wrote " << rec.samples.size() << " samples (" << rec.runs << " runs) to " << a.out << "\n";
  return 0;
}

int cmd_check(const Args& a, std::ostream& out) {
  distinct_paths({a.system, a.schedule, a.pulses}, a.report);
  ReportInputs in;
  in.system = io::system_from_json(io::read_json(a.system)).system;
  in.span.word_cap = a.word_cap;
  const IdentMode mode = a.mode == "auto" ? IdentMode::Autonomous : IdentMode::Controlled;
  if (!a.schedule.empty()) in.schedule = io::schedule_from_json(io::read_json(a.schedule));
  if (mode == IdentMode::Autonomous && !in.schedule)
    throw Error("check: --schedule is required in auto mode");
  if (!a.pulses.empty()) in.pulses = io::pulses_from_json(io::read_json(a.pulses));
  const IdentifiabilityReport rep = identifiability_report(mode, in);
  io::write_json(a.report, io::report_to_json(rep));
  out << "verdict: " << to_string(rep.verdict) << " (rank OM " << rep.rank_OM << ", rank CM "
      << rep.rank_CM << ", required " << rep.required_rank << ")\n";
  for (const auto& c : rep.failing_clauses) out << "  failing: " << c << "\n";
  for (const auto& p : rep.sampling.pairs)
    if (p.verdict == RatioVerdict::NoSmallDenominator)
      out << "  warning: tau_" << p.j << "/tau_" << p.i << " = " << p.ratio << ": " << to_string(p.verdict)
          << "\n";
  return rep.exit_code();
}

int cmd_fit(const Args& a, std::ostream& out) {
  distinct_paths({a.record, a.schedule}, a.out);
  const MeasurementRecord rec = io::record_from_json(io::read_json(a.record));
  const SamplingSchedule sched = io::schedule_from_json(io::read_json(a.schedule));
  FitOptions fo;
  fo.affine = a.affine;
  const DiscreteMultirateModel m = fit_multirate(rec, sched, a.order, fo);
  io::write_json(a.out, io::model_to_json(m));
  out << "wrote multirate model (order " << m.order() << ", " << m.blocks() << " blocks) to " << a.out << "\n";
  return 0;
}

int cmd_reconstruct_lds(const Args& a, std::ostream& out, std::ostream& err) {
  distinct_paths({a.model, a.schedule}, a.out);
  const DiscreteMultirateModel m = io::model_from_json(io::read_json(a.model));
  const SamplingSchedule sched = io::schedule_from_json(io::read_json(a.schedule));
  if (sched.partition.size() != m.partition.size())
    throw Error("reconstruct-lds: schedule does not match the model partition");
  for (std::size_t i = 0; i < sched.partition.size(); ++i)
    if (std::abs(sched.partition[i] - m.partition[i]) > 1e-12 * sched.period)
      throw Error("reconstruct-lds: schedule does not match the model partition");
  const SamplingCheck sc = sampling_policy_check(sched);
  if (!sc.sampling_ok) err << "warning: sampling policy check did not pass; branch selection may be ambiguous\n";
  ReconstructOptions ro;
  ro.match_tol = a.match_tol;
  ro.branch_limit = a.branch_limit;
  const ContinuousReconstruction c = reconstruct_continuous(single_rate_models(m), ro);
  io::write_json(a.out, io::contsys_to_json(c));
  out << "wrote continuous system (n = " << c.A.rows() << ") to " << a.out << "\n";
  return 0;
}

int cmd_reconstruct_params(const Args& a, std::ostream& out) {
  distinct_paths({a.a_path, a.beta_path, a.basis}, a.out);
  const LieBasis basis = io::basis_from_json(io::read_json(a.basis));
  const Mat A = io::matrix_from_json(io::read_json(a.a_path));
  std::optional<Vec> beta;
  if (!a.beta_path.empty()) beta = io::vector_from_json(io::read_json(a.beta_path));
  if (!a.symmetric && !beta) throw Error("reconstruct-params: --beta is required without --symmetric");
  const ReconstructionMatrices mats =
      build_reconstruction_matrices(structure_constants(basis), basis.hilbert_dim, a.symmetric);
  RecoveryOptions ro;
  ro.condition_cap = a.condition_cap;
  ro.range_tol = a.range_tol;
  const RecoveredParams r =
      a.symmetric ? reconstruct_symmetric(A, mats, beta, ro) : reconstruct_general(A, *beta, mats, ro);
  io::write_json(a.out, io::recovered_to_json(r, mats));
  out << "status: " << to_string(r.status) << ", residual_A " << r.residual_A << ", kappa " << r.kappa << "\n";
  return r.status == RecoveryStatus::FullRecovery ? 0 : 2;
}

int cmd_demo(const Args& a, std::ostream& out) {
  if (a.demo_name != "two-qubit") throw Error("demo: unknown demo \"" + a.demo_name + "\"");
  const demo::DemoResult r = demo::run_two_qubit();
  demo::print_summary(out, r);
  return r.max_parameter_error <= 1e-6 ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Identifiability and parameter recovery for open quantum systems", "oqsid"};
  app.require_subcommand(1);
  Args a;

  auto* basis = app.add_subcommand("basis", "Write the generalized Pauli basis and structure constants");
  basis->add_option("--qubits", a.qubits, "Number of qubits")->required()->check(CLI::Range(1, kMaxQubits));
  basis->add_option("--out", a.out, "Output basis.json")->required();

  auto* build = app.add_subcommand("build", "Assemble the coherence-vector system from GKSL parameters");
  build->add_option("--basis", a.basis)->required();
  build->add_option("--params", a.params)->required();
  build->add_option("--out", a.out)->required();

  auto* sim = app.add_subcommand("simulate", "Integrate the system on a multirate schedule");
  sim->add_option("--system", a.system)->required();
  sim->add_option("--schedule", a.schedule)->required();
  sim->add_option("--pulses", a.pulses, "Pulse family; omit for an autonomous run");
  sim->add_option("--frames", a.frames, "Override the schedule frame count")->check(CLI::PositiveNumber);
  sim->add_option("--noise-sigma", a.noise_sigma)->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", a.seed);
  sim->add_option("--step", a.step, "Maximum RK4 step")->check(CLI::PositiveNumber);
  sim->add_flag("--states", a.states, "Store state snapshots");
  sim->add_option("--out", a.out)->required();

  auto* check = app.add_subcommand("check", "Run the identifiability tests");
  check->add_option("--mode", a.mode)->check(CLI::IsMember({"auto", "controlled"}));
  check->add_option("--system", a.system)->required();
  check->add_option("--schedule", a.schedule);
  check->add_option("--pulses", a.pulses);
  check->add_option("--word-cap", a.word_cap, "Bilinear span word cap (default 10 n^2)");
  check->add_option("--report", a.report)->required();

  auto* fit = app.add_subcommand("fit-discrete", "Fit the multirate discrete model from a record");
  fit->add_option("--record", a.record)->required();
  fit->add_option("--schedule", a.schedule)->required();
  fit->add_option("--order", a.order)->required()->check(CLI::PositiveNumber);
  fit->add_flag("--affine", a.affine, "Fit x' = A x + beta through the standard-form embedding");
  fit->add_option("--out", a.out)->required();

  auto* lds = app.add_subcommand("reconstruct-lds", "Recover the continuous-time (A, B)");
  lds->add_option("--model", a.model)->required();
  lds->add_option("--schedule", a.schedule)->required();
  lds->add_option("--match-tol", a.match_tol)->check(CLI::PositiveNumber);
  lds->add_option("--branch-limit", a.branch_limit)->check(CLI::NonNegativeNumber);
  lds->add_option("--out", a.out)->required();

  auto* rp = app.add_subcommand("reconstruct-params", "Recover (theta, gamma) from A and beta");
  rp->add_option("--A", a.a_path)->required();
  rp->add_option("--beta", a.beta_path);
  rp->add_option("--basis", a.basis)->required();
  rp->add_flag("--symmetric", a.symmetric);
  rp->add_option("--condition-cap", a.condition_cap)->check(CLI::PositiveNumber);
  rp->add_option("--range-tol", a.range_tol)->check(CLI::PositiveNumber);
  rp->add_option("--out", a.out)->required();

  auto* demo = app.add_subcommand("demo", "Packaged end-to-end demos");
  demo->add_option("name", a.demo_name, "two-qubit")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*basis) return cmd_basis(a, out);
    if (*build) return cmd_build(a, out);
    if (*sim) return cmd_simulate(a, out);
    if (*check) return cmd_check(a, out);
    if (*fit) return cmd_fit(a, out);
    if (*lds) return cmd_reconstruct_lds(a, out, err);
    if (*rp) return cmd_reconstruct_params(a, out);
    if (*demo) return cmd_demo(a, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace oqsid::cli
