#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "io.hpp"
#include "support/oracles.hpp"

using namespace oqsid;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  static const fs::path dir = [] {
    const char* env = std::getenv("OQSID_TEST_TMP");
    fs::path d = env ? fs::path(env) : fs::temp_directory_path() / "oqsid_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::string& p, const std::string& text) { std::ofstream(p) << text; }

/// 1-qubit params with a Hamiltonian and a non-symmetric dissipator.
void write_params(const std::string& file, bool symmetric) {
  oracle::Rng rng(91);
  io::ParamsFile pf;
  pf.params.theta = rng.vec(3);
  pf.params.gamma = symmetric ? CMat(rng.symmetric_psd(3, 0.3).cast<cplx>()) : rng.psd(3, 0.3);
  pf.params.symmetric = symmetric;
  Vec x0(3);
  x0 << 0.1, 0.2, 0.3;
  pf.x0 = x0;
  io::write_json(file, io::params_to_json(pf));
}

}  // namespace

TEST_CASE("schema handling") {
  io::json j = {{"schema", "oqsid.schedule/1"}};
  CHECK_NOTHROW(io::expect_schema(j, "schedule"));
  CHECK_THROWS_WITH_AS(io::expect_schema(io::json::object(), "schedule"), doctest::Contains("missing \"schema\""), Error);
  CHECK_THROWS_WITH_AS(io::expect_schema(io::json{{"schema", "oqsid.pulses/1"}}, "schedule"),
                       doctest::Contains("schema mismatch"), Error);
  CHECK_THROWS_WITH_AS(io::expect_schema(io::json{{"schema", "oqsid.schedule/7"}}, "schedule"),
                       doctest::Contains("version mismatch"), Error);
  CHECK(io::schema_tag("record") == "oqsid.record/1");
}

TEST_CASE("artifact round trips") {
  oracle::Rng rng(92);
  const SamplingSchedule s = golden_schedule(1.5, 2, 4);
  const SamplingSchedule s2 = io::schedule_from_json(io::json::parse(io::schedule_to_json(s).dump()));
  CHECK(s2.partition == s.partition);
  CHECK(s2.frames == 4);
  CHECK(s2.ratio_policy == RatioPolicy::GoldenByConstruction);

  const auto pulses = make_pulse_family(0.5, {0.1, 0.2}, 2).pulses;
  const io::json pj = io::pulses_to_json(pulses);
  CHECK(pj["pulses"][0]["channel"] == 3);
  const auto p2 = io::pulses_from_json(pj);
  REQUIRE(p2.size() == 2);
  CHECK(p2[1].tau == 0.2);
  CHECK(p2[1].channel == 2);

  const CMat c = rng.cmat(3, 2);
  CHECK(io::decode_complex_mat(io::json::parse(io::encode_complex(c).dump()), 3, 2, "c") == c);
  const io::json pair = io::encode_complex(CVec(CVec::Constant(1, cplx(1.5, -2.0))));
  CHECK(pair[0][0] == 1.5);
  CHECK(pair[0][1] == -2.0);

  const LieBasis b = build_basis(2);
  const StructureTensors t = structure_constants(b);
  const io::json bj = io::basis_to_json(b, t);
  CHECK(io::basis_from_json(io::json::parse(bj.dump())).n == 15);
  bool one_based = true;
  for (const auto& e : bj["f"]) one_based = one_based && e[0] >= 1 && e[1] >= 1 && e[2] >= 1;
  CHECK(one_based);

  GkslParams p;
  p.theta = rng.vec(3);
  p.gamma = rng.psd(3);
  io::SystemFile sf;
  sf.num_qubits = 1;
  sf.system = assemble_system(build_basis(1), structure_constants(build_basis(1)), p);
  const io::SystemFile sf2 = io::system_from_json(io::json::parse(io::system_to_json(sf).dump()));
  CHECK((sf2.system.A - sf.system.A).norm() == 0.0);
  CHECK((sf2.system.beta - sf.system.beta).norm() == 0.0);
  REQUIRE(sf2.system.N_list.size() == 3);
  CHECK((sf2.system.N_list[1] - sf.system.N_list[1]).norm() == 0.0);
}

TEST_CASE("large record round trip") {
  const LieBasis b = build_basis(1);
  GkslParams p;
  p.theta = Vec::Constant(3, 0.3);
  p.gamma = (0.1 * Mat::Identity(3, 3)).cast<cplx>();
  const CoherenceSystem sys = assemble_system(b, structure_constants(b), p);
  SimulationOptions o;
  o.noise_sigma = 1e-3;
  o.seed = 5;
  const auto pulses = make_pulse_family(1.0, {0.1, 0.2, 0.3, 0.4}, 0).pulses;
  const MeasurementRecord r = simulate(BilinearModel::from(sys), pulses, golden_schedule(1.0, 4, 500), Vec::Zero(3), o);
  REQUIRE(r.samples.size() >= 10000);
  const std::string file = path("big_record.json");
  io::write_json(file, io::record_to_json(r));
  const MeasurementRecord back = io::record_from_json(io::read_json(file));
  REQUIRE(back.samples.size() == r.samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    worst = std::max(worst, (back.samples[i].y - r.samples[i].y).cwiseAbs().maxCoeff());
    CHECK(back.samples[i].pulse_id == r.samples[i].pulse_id);
  }
  CHECK(worst == 0.0);
  CHECK(back.runs == 4);
}

TEST_CASE("basis, build and check from the command line") {
  REQUIRE(run({"basis", "--qubits", "1", "--out", path("basis.json")}).code == 0);
  write_params(path("params.json"), false);
  REQUIRE(run({"build", "--basis", path("basis.json"), "--params", path("params.json"), "--out",
               path("system.json")}).code == 0);
  const io::json sys = io::read_json(path("system.json"));
  CHECK(sys["schema"] == "oqsid.system/1");

  io::write_json(path("golden.json"), io::schedule_to_json(golden_schedule(1.0, 2, 3)));
  io::write_json(path("uniform.json"), io::schedule_to_json(uniform_schedule(1.0, 2, 3)));
  io::write_json(path("root2.json"), io::schedule_to_json(schedule_from_increments({1.0, std::sqrt(2.0)})));

  const Result ok = run({"check", "--mode", "auto", "--system", path("system.json"), "--schedule",
                         path("golden.json"), "--report", path("report.json")});
  CHECK(ok.code == 0);
  CHECK(io::read_json(path("report.json"))["verdict"] == "identifiable");

  const Result uni = run({"check", "--system", path("system.json"), "--schedule", path("uniform.json"),
                          "--report", path("report2.json")});
  CHECK(uni.code == 2);
  CHECK(uni.out.find("sampling ratios rational") != std::string::npos);

  const Result warn = run({"check", "--system", path("system.json"), "--schedule", path("root2.json"),
                           "--report", path("report3.json")});
  CHECK(warn.code == 3);
  CHECK(warn.out.find("no small denominator found (warning)") != std::string::npos);

  io::write_json(path("zero_pulses.json"), io::pulses_to_json(make_pulse_family(0.0, {0.2, 0.4}, 0).pulses));
  io::write_json(path("pulses.json"), io::pulses_to_json(make_pulse_family(1.0, {0.2, 0.4}, 0).pulses));
  const Result degenerate = run({"check", "--mode", "controlled", "--system", path("system.json"), "--pulses",
                                 path("zero_pulses.json"), "--report", path("report4.json")});
  CHECK(degenerate.code == 2);
  CHECK(degenerate.out.find("pulse family degenerate") != std::string::npos);
  const Result controlled = run({"check", "--mode", "controlled", "--system", path("system.json"), "--pulses",
                                 path("pulses.json"), "--report", path("report5.json")});
  CHECK(controlled.code == 0);
}

TEST_CASE("simulate, fit and reconstruct from the command line") {
  REQUIRE(fs::exists(path("system.json")));
  const io::SystemFile sf = io::system_from_json(io::read_json(path("system.json")));
  const SamplingSchedule s = golden_schedule(1.0, 1, 10);
  io::write_json(path("sched.json"), io::schedule_to_json(s));

  const Result sim = run({"simulate", "--system", path("system.json"), "--schedule", path("sched.json"),
                          "--states", "--out", path("record.json")});
  CHECK(sim.code == 0);
  const io::json rj = io::read_json(path("record.json"));
  CHECK(rj["samples"].size() == 2 * 10 + 1);
  CHECK(rj["samples"][0]["pulse_id"] == 0);

  // Four initial states are needed to fit the affine model.
  std::vector<MeasurementRecord> runs;
  for (int j = 0; j < 4; ++j) {
    Vec x0 = Vec::Zero(3);
    if (j < 3) x0(j) = 0.3;
    runs.push_back(simulate(BilinearModel::from(sf.system), {}, s, x0));
  }
  io::write_json(path("multi.json"), io::record_to_json(merge_records(runs)));
  CHECK(run({"fit-discrete", "--record", path("multi.json"), "--schedule", path("sched.json"), "--order", "4",
             "--affine", "--out", path("model.json")}).code == 0);
  CHECK(run({"reconstruct-lds", "--model", path("model.json"), "--schedule", path("sched.json"), "--out",
             path("cont.json")}).code == 0);
  const Mat A = io::matrix_from_json(io::read_json(path("cont.json")));
  CHECK((A.topLeftCorner(3, 3) - sf.system.A).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((A.topRightCorner(3, 1) - sf.system.beta).cwiseAbs().maxCoeff() < 1e-6);

  const SamplingSchedule one = golden_schedule(1.0, 1, 1);
  io::write_json(path("one.json"), io::schedule_to_json(one));
  io::write_json(path("short.json"), io::record_to_json(simulate(BilinearModel::from(sf.system), {}, one, Vec::Constant(3, 0.2))));
  const Result short_fit = run({"fit-discrete", "--record", path("short.json"), "--schedule", path("one.json"),
                                "--order", "3", "--out", path("model3.json")});
  CHECK(short_fit.code == 1);
  CHECK(short_fit.err.find("insufficient frames") != std::string::npos);
}

TEST_CASE("parameter reconstruction from the command line") {
  REQUIRE(fs::exists(path("system.json")));
  const Result general = run({"reconstruct-params", "--A", path("system.json"), "--beta", path("system.json"),
                              "--basis", path("basis.json"), "--out", path("params_hat.json")});
  CHECK(general.code == 0);
  const io::json ph = io::read_json(path("params_hat.json"));
  CHECK(ph["schema"] == "oqsid.params_hat/1");
  CHECK(ph["status"] == "full-recovery");
  const io::ParamsFile truth = io::params_from_json(io::read_json(path("params.json")), 3, 2);
  const Vec theta = io::decode_vec(ph["theta"], "theta");
  CHECK((theta - truth.params.theta).cwiseAbs().maxCoeff() < 1e-10);

  const Result forced = run({"reconstruct-params", "--A", path("system.json"), "--beta", path("system.json"),
                             "--basis", path("basis.json"), "--condition-cap", "1", "--out",
                             path("params_hat2.json")});
  CHECK(forced.code == 2);
  CHECK(io::read_json(path("params_hat2.json"))["status"] == "gamma-from-beta");

  write_params(path("sym_params.json"), true);
  REQUIRE(run({"build", "--basis", path("basis.json"), "--params", path("sym_params.json"), "--out",
               path("sym_system.json")}).code == 0);
  CHECK(run({"reconstruct-params", "--A", path("sym_system.json"), "--basis", path("basis.json"), "--symmetric",
             "--out", path("params_hat3.json")}).code == 0);
  CHECK(run({"reconstruct-params", "--A", path("system.json"), "--basis", path("basis.json"), "--out",
             path("params_hat4.json")}).code == 1);
}

TEST_CASE("errors exit with code 1") {
  write_text(path("broken.json"), "{\"schema\": \"oqsid.schedule/1\", ");
  const Result broken = run({"check", "--system", path("broken.json"), "--schedule", path("broken.json"),
                             "--report", path("r.json")});
  CHECK(broken.code == 1);
  CHECK(broken.err.find("broken.json") != std::string::npos);

  write_text(path("noschema.json"), "{\"period\": 1}");
  const Result noschema = run({"simulate", "--system", path("system.json"), "--schedule", path("noschema.json"),
                               "--out", path("x.json")});
  CHECK(noschema.code == 1);
  CHECK(noschema.err.find("schema") != std::string::npos);

  CHECK(run({"check", "--system", path("missing.json"), "--report", path("r.json")}).code == 1);
  CHECK(run({"basis", "--qubits", "9", "--out", path("b.json")}).code == 1);
  CHECK(run({"basis"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  const Result clobber = run({"simulate", "--system", path("system.json"), "--schedule", path("sched.json"),
                              "--out", path("system.json")});
  CHECK(clobber.code == 1);
  CHECK(clobber.err.find("overwrite") != std::string::npos);
  CHECK(run({"demo", "nope"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("noisy simulation is deterministic") {
  REQUIRE(fs::exists(path("system.json")));
  io::write_json(path("pulses3.json"), io::pulses_to_json(make_pulse_family(1.0, {0.1, 0.2, 0.3}, 0).pulses));
  for (const char* out : {"noisy_a.json", "noisy_b.json"})
    REQUIRE(run({"simulate", "--system", path("system.json"), "--schedule", path("sched.json"), "--pulses",
                 path("pulses3.json"), "--frames", "5", "--noise-sigma", "0.01", "--seed", "17", "--out",
                 path(out)}).code == 0);
  CHECK(slurp(path("noisy_a.json")) == slurp(path("noisy_b.json")));
  const io::json r = io::read_json(path("noisy_a.json"));
  CHECK(r["runs"] == 3);
  CHECK(r["samples"].size() == 3 * (5 * 2 + 1));
}

TEST_CASE("two-qubit demo") {
  const Result r = run({"demo", "two-qubit"});
  CHECK(r.code == 0);
  CHECK(r.out.find("full-recovery") != std::string::npos);
  CHECK(r.out.find("identifiable") != std::string::npos);
}
