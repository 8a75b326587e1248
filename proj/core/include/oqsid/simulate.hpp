#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oqsid/gksl.hpp"
#include "oqsid/linalg.hpp"

namespace oqsid {

/// Rectangular pulse u(t) = alpha on [0, tau), 0 afterwards, on one control
/// channel (generator index, 0-based). The pulse repeats at the start of
/// every frame; tau must not exceed the frame period.
struct Pulse {
  double tau = 0.0;
  double alpha = 0.0;
  int channel = 0;
  /// tau == 0 gives the zero input. Recorded so reports can flag it.
  bool zero_width() const { return tau == 0.0; }
  double value(double t_in_frame) const {
    return (t_in_frame >= 0.0 && t_in_frame < tau) ? alpha : 0.0;
  }
};

enum class RatioPolicy {
  Undeclared,          // ratios are tested heuristically
  DeclaredIrrational,  // the user asserts every ratio is irrational
  GoldenByConstruction,
};

/// Frame period T, partition 0 = t_0 < ... < t_{l+1} = T and frame count.
struct SamplingSchedule {
  double period = 0.0;
  std::vector<double> partition;  // t_0 .. t_{l+1}
  int frames = 1;
  RatioPolicy ratio_policy = RatioPolicy::Undeclared;

  /// tau_i = t_i - t_{i-1}, i = 1..l+1.
  std::vector<double> increments() const;
  /// Number of interior offsets l.
  int interior_points() const { return static_cast<int>(partition.size()) - 2; }
};

/// Checks the schedule invariants (strictly increasing, starts at 0, ends
/// at T, positive frame count). Throws on violation.
void validate_schedule(const SamplingSchedule& schedule);

/// Builds a schedule from increments, which must be positive.
SamplingSchedule schedule_from_increments(const std::vector<double>& taus, int frames = 1,
                                          RatioPolicy policy = RatioPolicy::Undeclared);

/// Increments proportional to phi^0, phi^1, ..., phi^l rescaled to sum to T.
SamplingSchedule golden_schedule(double period, int interior_points, int frames = 1);

/// Equal increments; every ratio is 1.
SamplingSchedule uniform_schedule(double period, int interior_points, int frames = 1);

struct PulseFamily {
  std::vector<Pulse> pulses;
  std::vector<std::string> warnings;
};

/// One pulse per distinct tau, sorted ascending, all with amplitude alpha.
PulseFamily make_pulse_family(double alpha, std::vector<double> taus, int channel);

/// Dynamics dx/dt = A x + offset + sum_j u_j N_j x, y = C x. Both the
/// coherence form and the standard-form embedding reduce to this.
struct BilinearModel {
  Mat A;
  Vec offset;
  std::vector<Mat> N_list;
  Mat C;

  static BilinearModel from(const CoherenceSystem& sys);
  static BilinearModel from(const EmbeddedSystem& emb);
  Eigen::Index dim() const { return A.rows(); }
};

struct Sample {
  double t = 0.0;
  int frame = 0;
  int offset_index = 0;  // i in kT + t_i; the stamp M*T carries frame M, i = 0
  int pulse_id = -1;     // -1 for autonomous runs
  int run = 0;
  Vec y;
  Vec x;  // state snapshot, present in oracle mode
};

struct MeasurementRecord {
  std::vector<Sample> samples;
  std::vector<Pulse> pulses;
  Mat C;
  int runs = 0;
  bool has_states() const { return !samples.empty() && samples.front().x.size() > 0; }
};

struct SimulationOptions {
  /// Maximum RK4 step. Unset selects min(tau_i) / 50.
  std::optional<double> step;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  bool store_states = true;
  /// Worker threads for independent runs; 0 reads OQS_IDENT_THREADS.
  int threads = 0;
};

/// Integrates one run per pulse (one autonomous run when `pulses` is empty)
/// from x0 over schedule.frames frames with fixed-step RK4, aligning steps
/// to every pulse edge and sample stamp.
MeasurementRecord simulate(const BilinearModel& model, const std::vector<Pulse>& pulses,
                           const SamplingSchedule& schedule, const Vec& x0,
                           const SimulationOptions& options = {});

/// Concatenates records (e.g. several initial states), renumbering runs.
MeasurementRecord merge_records(const std::vector<MeasurementRecord>& records);

/// Advances dx/dt = A x + offset + u N x over `duration` with `steps` RK4
/// steps and constant control term `drive` (already u-weighted).
Vec rk4_advance(const Mat& A, const Vec& offset, const Mat& drive, const Vec& x, double duration,
                int steps);

/// Worker-count cap from OQS_IDENT_THREADS (default: hardware concurrency).
int thread_cap();

}  // namespace oqsid
