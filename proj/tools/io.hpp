#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oqsid/gksl.hpp"
#include "oqsid/identify.hpp"
#include "oqsid/ldsrec.hpp"
#include "oqsid/liealg.hpp"
#include "oqsid/paramrec.hpp"
#include "oqsid/simulate.hpp"

// JSON artifacts. Every file carries "schema": "oqsid.<kind>/<version>".
// Real matrices are arrays of rows; complex numbers are [re, im] pairs and
// complex matrices are flat row-major lists of pairs. Generator, channel
// and pulse indices are 1-based on disk.
namespace oqsid::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

std::string schema_tag(const std::string& kind);
/// Throws unless j["schema"] names `kind` at the current version.
void expect_schema(const json& j, const std::string& kind);
std::string schema_kind(const json& j);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);

json encode(const Mat& m);
json encode(const Vec& v);
json encode_complex(const CMat& m);  // flat row-major pairs
json encode_complex(const CVec& v);
Mat decode_mat(const json& j, const char* what);
Vec decode_vec(const json& j, const char* what);
CMat decode_complex_mat(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what);
CVec decode_complex_vec(const json& j, const char* what);

json basis_to_json(const LieBasis& basis, const StructureTensors& tensors);
/// Rebuilds the basis from num_qubits and checks it against the file.
LieBasis basis_from_json(const json& j);

struct ParamsFile {
  GkslParams params;
  std::vector<CMat> observables;
  std::optional<Vec> x0;
};
json params_to_json(const ParamsFile& p);
ParamsFile params_from_json(const json& j, int n, int hilbert_dim);

struct SystemFile {
  int num_qubits = 0;
  CoherenceSystem system;
};
json system_to_json(const SystemFile& s);
SystemFile system_from_json(const json& j);

json schedule_to_json(const SamplingSchedule& s);
SamplingSchedule schedule_from_json(const json& j);

json pulses_to_json(const std::vector<Pulse>& pulses);
std::vector<Pulse> pulses_from_json(const json& j);

json record_to_json(const MeasurementRecord& r);
MeasurementRecord record_from_json(const json& j);

json report_to_json(const IdentifiabilityReport& r);

json model_to_json(const DiscreteMultirateModel& m);
DiscreteMultirateModel model_from_json(const json& j);

json contsys_to_json(const ContinuousReconstruction& c);

json matrix_to_json(const Mat& m);
/// Accepts a matrix file or a system file (uses its A).
Mat matrix_from_json(const json& j);
json vector_to_json(const Vec& v);
/// Accepts a vector file or a system file (uses its beta).
Vec vector_from_json(const json& j);

json recovered_to_json(const RecoveredParams& r, const ReconstructionMatrices& mats);

}  // namespace oqsid::io
