#include "io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace oqsid::io {

namespace {

const json& field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw Error(std::string(what) + ": missing field \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw Error(std::string(what) + ": expected a number");
  return j.get<double>();
}

cplx pair_value(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(std::string(what) + ": expected an [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

const char* policy_name(RatioPolicy p) {
  switch (p) {
    case RatioPolicy::Undeclared: return "undeclared";
    case RatioPolicy::DeclaredIrrational: return "declared-irrational";
    case RatioPolicy::GoldenByConstruction: return "golden";
  }
  return "undeclared";
}

RatioPolicy policy_from(const std::string& s) {
  if (s == "undeclared") return RatioPolicy::Undeclared;
  if (s == "declared-irrational") return RatioPolicy::DeclaredIrrational;
  if (s == "golden") return RatioPolicy::GoldenByConstruction;
  throw Error("schedule: unknown ratio_policy \"" + s + "\"");
}

std::vector<double> decode_vec_std(const json& j) {
  const Vec v = decode_vec(j, "partition");
  return {v.data(), v.data() + v.size()};
}

json sparse_rows(const Mat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (m(r, c) != 0.0) out.push_back({r + 1, c + 1, m(r, c)});
  return out;
}

}  // namespace

std::string schema_tag(const std::string& kind) {
  return "oqsid." + kind + "/" + std::to_string(kSchemaVersion);
}

std::string schema_kind(const json& j) {
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string())
    throw Error("missing \"schema\" field");
  const std::string s = j["schema"].get<std::string>();
  const auto dot = s.find('.');
  const auto slash = s.rfind('/');
  if (s.rfind("oqsid.", 0) != 0 || slash == std::string::npos || slash < dot)
    throw Error("unrecognized schema \"" + s + "\"");
  return s.substr(dot + 1, slash - dot - 1);
}

void expect_schema(const json& j, const std::string& kind) {
  const std::string found_kind = schema_kind(j);
  const std::string s = j["schema"].get<std::string>();
  if (found_kind != kind)
    throw Error("schema mismatch: expected " + schema_tag(kind) + ", found " + s);
  if (s != schema_tag(kind))
    throw Error("schema version mismatch: expected " + schema_tag(kind) + ", found " + s);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path + ": parse error: " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw Error("write failed: " + path);
}

json encode(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json encode(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json encode_complex(const CMat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back({m(r, c).real(), m(r, c).imag()});
  return out;
}

json encode_complex(const CVec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

Mat decode_mat(const json& j, const char* what) {
  if (!j.is_array()) throw Error(std::string(what) + ": expected an array of rows");
  if (j.empty()) return Mat();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw Error(std::string(what) + ": ragged matrix at row " + std::to_string(r + 1));
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], what);
  }
  return m;
}

Vec decode_vec(const json& j, const char* what) {
  if (!j.is_array()) throw Error(std::string(what) + ": expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

CMat decode_complex_mat(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
    throw Error(std::string(what) + ": expected " + std::to_string(rows * cols) +
                " row-major [re, im] pairs");
  CMat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = pair_value(j[static_cast<std::size_t>(r * cols + c)], what);
  return m;
}

CVec decode_complex_vec(const json& j, const char* what) {
  if (!j.is_array()) throw Error(std::string(what) + ": expected an array of pairs");
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = pair_value(j[i], what);
  return v;
}

json basis_to_json(const LieBasis& basis, const StructureTensors& tensors) {
  json j;
  j["schema"] = schema_tag("basis");
  j["num_qubits"] = basis.num_qubits;
  j["hilbert_dim"] = basis.hilbert_dim;
  j["n"] = basis.n;
  j["labels"] = basis.labels;
  json gens = json::array();
  for (const auto& g : basis.generators) gens.push_back(encode_complex(g));
  j["generators"] = std::move(gens);
  auto tensor = [](const std::vector<TensorEntry>& entries) {
    json out = json::array();
    for (const auto& e : entries) out.push_back({e.j + 1, e.k + 1, e.l + 1, e.value});
    return out;
  };
  j["f"] = tensor(tensors.f_entries());
  j["g"] = tensor(tensors.g_entries());
  return j;
}

LieBasis basis_from_json(const json& j) {
  expect_schema(j, "basis");
  const json& q = field(j, "num_qubits", "basis");
  if (!q.is_number_integer()) throw Error("basis: num_qubits must be an integer");
  LieBasis basis = build_basis(q.get<int>());
  if (j.contains("n") && j["n"].get<int>() != basis.n) throw Error("basis: n does not match num_qubits");
  if (j.contains("labels") && j["labels"].get<std::vector<std::string>>() != basis.labels)
    throw Error("basis: generator labels differ from the canonical ordering");
  return basis;
}

json params_to_json(const ParamsFile& p) {
  json j;
  j["schema"] = schema_tag("params");
  j["theta"] = encode(p.params.theta);
  j["gamma"] = encode_complex(p.params.gamma);
  j["symmetric"] = p.params.symmetric;
  if (!p.observables.empty()) {
    json obs = json::array();
    for (const auto& o : p.observables) obs.push_back(encode_complex(o));
    j["observables"] = std::move(obs);
  }
  if (p.x0) j["x0"] = encode(*p.x0);
  return j;
}

ParamsFile params_from_json(const json& j, int n, int hilbert_dim) {
  expect_schema(j, "params");
  ParamsFile p;
  p.params.theta = decode_vec(field(j, "theta", "params"), "params.theta");
  p.params.gamma = decode_complex_mat(field(j, "gamma", "params"), n, n, "params.gamma");
  if (j.contains("symmetric")) {
    if (!j["symmetric"].is_boolean()) throw Error("params.symmetric: expected a boolean");
    p.params.symmetric = j["symmetric"].get<bool>();
  }
  if (j.contains("observables") && !j["observables"].is_null()) {
    for (const auto& o : j["observables"])
      p.observables.push_back(decode_complex_mat(o, hilbert_dim, hilbert_dim, "params.observables"));
  }
  if (j.contains("x0")) {
    p.x0 = decode_vec(j["x0"], "params.x0");
    if (p.x0->size() != n) throw Error("params.x0: expected length " + std::to_string(n));
  }
  validate_params(p.params, n);
  return p;
}

json system_to_json(const SystemFile& s) {
  const auto& sys = s.system;
  json j;
  j["schema"] = schema_tag("system");
  j["num_qubits"] = s.num_qubits;
  j["n"] = sys.n;
  j["A_l"] = encode(sys.A_l);
  j["A_d"] = encode(sys.A_d);
  j["A"] = encode(sys.A);
  j["beta"] = encode(sys.beta);
  json nl = json::array();
  for (std::size_t c = 0; c < sys.N_list.size(); ++c)
    nl.push_back({{"channel", c + 1}, {"entries", sparse_rows(sys.N_list[c])}});
  j["N_list"] = std::move(nl);
  j["C"] = encode(sys.C);
  j["x0"] = encode(sys.x0);
  return j;
}

SystemFile system_from_json(const json& j) {
  expect_schema(j, "system");
  SystemFile s;
  s.num_qubits = field(j, "num_qubits", "system").get<int>();
  auto& sys = s.system;
  sys.n = field(j, "n", "system").get<int>();
  const Eigen::Index n = sys.n;
  sys.A_l = decode_mat(field(j, "A_l", "system"), "system.A_l");
  sys.A_d = decode_mat(field(j, "A_d", "system"), "system.A_d");
  sys.A = j.contains("A") ? decode_mat(j["A"], "system.A") : Mat(sys.A_l + sys.A_d);
  sys.beta = decode_vec(field(j, "beta", "system"), "system.beta");
  for (const Mat* m : {&sys.A_l, &sys.A_d, &sys.A})
    if (m->rows() != n || m->cols() != n) throw Error("system: matrices must be n x n");
  if (sys.beta.size() != n) throw Error("system.beta: expected length n");
  sys.N_list.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (const auto& entry : field(j, "N_list", "system")) {
    const int c = entry.at("channel").get<int>();
    if (c < 1 || c > n) throw Error("system.N_list: channel out of range");
    Mat& m = sys.N_list[static_cast<std::size_t>(c - 1)];
    for (const auto& t : entry.at("entries")) {
      const int r = t.at(0).get<int>(), col = t.at(1).get<int>();
      if (r < 1 || r > n || col < 1 || col > n) throw Error("system.N_list: index out of range");
      m(r - 1, col - 1) = t.at(2).get<double>();
    }
  }
  sys.C = decode_mat(field(j, "C", "system"), "system.C");
  if (sys.C.cols() != n) throw Error("system.C: expected n columns");
  sys.x0 = j.contains("x0") ? decode_vec(j["x0"], "system.x0") : Vec(Vec::Zero(n));
  if (sys.x0.size() != n) throw Error("system.x0: expected length n");
  return s;
}

json schedule_to_json(const SamplingSchedule& s) {
  json j;
  j["schema"] = schema_tag("schedule");
  j["period"] = s.period;
  j["partition"] = s.partition;
  j["frames"] = s.frames;
  j["ratio_policy"] = policy_name(s.ratio_policy);
  return j;
}

SamplingSchedule schedule_from_json(const json& j) {
  expect_schema(j, "schedule");
  SamplingSchedule s;
  s.period = number(field(j, "period", "schedule"), "schedule.period");
  s.partition = decode_vec_std(field(j, "partition", "schedule"));
  if (j.contains("frames")) s.frames = j["frames"].get<int>();
  if (j.contains("ratio_policy")) s.ratio_policy = policy_from(j["ratio_policy"].get<std::string>());
  validate_schedule(s);
  return s;
}

json pulses_to_json(const std::vector<Pulse>& pulses) {
  json j;
  j["schema"] = schema_tag("pulses");
  json arr = json::array();
  for (const auto& p : pulses) arr.push_back({{"tau", p.tau}, {"alpha", p.alpha}, {"channel", p.channel + 1}});
  j["pulses"] = std::move(arr);
  return j;
}

std::vector<Pulse> pulses_from_json(const json& j) {
  expect_schema(j, "pulses");
  std::vector<Pulse> out;
  for (const auto& p : field(j, "pulses", "pulses")) {
    Pulse pulse;
    pulse.tau = number(field(p, "tau", "pulse"), "pulse.tau");
    pulse.alpha = number(field(p, "alpha", "pulse"), "pulse.alpha");
    pulse.channel = field(p, "channel", "pulse").get<int>() - 1;
    if (pulse.channel < 0) throw Error("pulse.channel: indices are 1-based");
    if (pulse.tau < 0.0) throw Error("pulse.tau: must be non-negative");
    out.push_back(pulse);
  }
  return out;
}

json record_to_json(const MeasurementRecord& r) {
  json j;
  j["schema"] = schema_tag("record");
  j["runs"] = r.runs;
  j["C"] = encode(r.C);
  j["pulses"] = pulses_to_json(r.pulses)["pulses"];
  json samples = json::array();
  for (const auto& s : r.samples) {
    json e = {{"t", s.t},         {"frame", s.frame}, {"offset_index", s.offset_index},
              {"pulse_id", s.pulse_id + 1}, {"run", s.run + 1}, {"y", encode(s.y)}};
    if (s.x.size()) e["x"] = encode(s.x);
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  return j;
}

MeasurementRecord record_from_json(const json& j) {
  expect_schema(j, "record");
  MeasurementRecord r;
  r.runs = field(j, "runs", "record").get<int>();
  r.C = decode_mat(field(j, "C", "record"), "record.C");
  if (j.contains("pulses")) {
    json wrapped = {{"schema", schema_tag("pulses")}, {"pulses", j["pulses"]}};
    r.pulses = pulses_from_json(wrapped);
  }
  for (const auto& e : field(j, "samples", "record")) {
    Sample s;
    s.t = number(field(e, "t", "sample"), "sample.t");
    s.frame = field(e, "frame", "sample").get<int>();
    s.offset_index = e.value("offset_index", 0);
    s.pulse_id = e.value("pulse_id", 0) - 1;
    s.run = e.value("run", 1) - 1;
    s.y = decode_vec(field(e, "y", "sample"), "sample.y");
    if (e.contains("x")) s.x = decode_vec(e["x"], "sample.x");
    r.samples.push_back(std::move(s));
  }
  return r;
}

json report_to_json(const IdentifiabilityReport& r) {
  json j;
  j["schema"] = schema_tag("report");
  j["mode"] = r.mode == IdentMode::Autonomous ? "auto" : "controlled";
  j["verdict"] = to_string(r.verdict);
  j["exit_code"] = r.exit_code();
  j["rank_OM"] = r.rank_OM;
  j["rank_CM"] = r.rank_CM;
  j["required_rank"] = r.required_rank;
  j["embedded"] = r.embedded;
  j["sampling_ok"] = r.sampling_ok;
  j["pulses_ok"] = r.pulses_ok;
  json ratios = json::array();
  for (const auto& p : r.sampling.pairs) {
    json e = {{"i", p.i}, {"j", p.j}, {"ratio", p.ratio}, {"verdict", to_string(p.verdict)}};
    if (p.verdict == RatioVerdict::Rational) e["fraction"] = {p.numerator, p.denominator};
    ratios.push_back(std::move(e));
  }
  j["ratios"] = std::move(ratios);
  j["single_rate"] = r.sampling.single_rate;
  j["failing_clauses"] = r.failing_clauses;
  j["notes"] = r.notes;
  return j;
}

json model_to_json(const DiscreteMultirateModel& m) {
  json j;
  j["schema"] = schema_tag("multirate");
  j["partition"] = m.partition;
  j["G"] = encode(m.G);
  json gi = json::array();
  for (const auto& g : m.G_i) gi.push_back(encode(g));
  j["G_i"] = std::move(gi);
  json f = json::array();
  for (const auto& x : m.F) f.push_back(encode(x));
  j["F"] = std::move(f);
  j["Gamma"] = encode(m.Gamma);
  j["C"] = encode(m.C);
  return j;
}

DiscreteMultirateModel model_from_json(const json& j) {
  expect_schema(j, "multirate");
  DiscreteMultirateModel m;
  m.partition = decode_vec_std(field(j, "partition", "multirate"));
  m.G = decode_mat(field(j, "G", "multirate"), "multirate.G");
  for (const auto& g : field(j, "G_i", "multirate")) m.G_i.push_back(decode_mat(g, "multirate.G_i"));
  if (j.contains("F"))
    for (const auto& f : j["F"]) m.F.push_back(decode_mat(f, "multirate.F"));
  m.Gamma = decode_mat(field(j, "Gamma", "multirate"), "multirate.Gamma");
  m.C = decode_mat(field(j, "C", "multirate"), "multirate.C");
  if (m.G.rows() != m.G.cols()) throw Error("multirate.G: must be square");
  return m;
}

json contsys_to_json(const ContinuousReconstruction& c) {
  json j;
  j["schema"] = schema_tag("contsys");
  j["A"] = encode(c.A);
  j["B"] = encode(c.B);
  j["eigenvalues"] = encode_complex(c.eigenvalues);
  j["reference_rate"] = c.reference_rate + 1;
  j["branch_limit"] = c.branch_limit;
  j["imag_residue"] = c.imag_residue;
  return j;
}

json matrix_to_json(const Mat& m) {
  return {{"schema", schema_tag("matrix")}, {"data", encode(m)}};
}

Mat matrix_from_json(const json& j) {
  const std::string kind = schema_kind(j);
  if (kind == "system") return system_from_json(j).system.A;
  if (kind == "contsys") return decode_mat(field(j, "A", "contsys"), "contsys.A");
  expect_schema(j, "matrix");
  return decode_mat(field(j, "data", "matrix"), "matrix.data");
}

json vector_to_json(const Vec& v) {
  return {{"schema", schema_tag("vector")}, {"data", encode(v)}};
}

Vec vector_from_json(const json& j) {
  const std::string kind = schema_kind(j);
  if (kind == "system") return system_from_json(j).system.beta;
  expect_schema(j, "vector");
  return decode_vec(field(j, "data", "vector"), "vector.data");
}

json recovered_to_json(const RecoveredParams& r, const ReconstructionMatrices& mats) {
  json j;
  j["schema"] = schema_tag("params_hat");
  j["symmetric"] = mats.symmetric;
  j["status"] = to_string(r.status);
  j["theta"] = r.has_theta ? encode(r.theta) : json(nullptr);
  j["gamma"] = r.has_gamma ? encode_complex(r.gamma) : json(nullptr);
  j["residual_A"] = r.residual_A;
  j["residual_beta"] = r.residual_beta;
  j["kappa"] = r.kappa;
  j["kappa_T1"] = mats.kappa_T1;
  if (mats.symmetric)
    j["kappa_T3"] = mats.kappa_T3;
  else
    j["kappa_M"] = mats.kappa_M;
  j["hermitian_projection"] = r.hermitian_projection;
  j["theta_imag_residue"] = r.theta_imag_residue;
  j["notes"] = r.notes;
  return j;
}

}  // namespace oqsid::io
