#include "oqsid/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <thread>

namespace oqsid {

std::vector<double> SamplingSchedule::increments() const {
  std::vector<double> taus;
  for (std::size_t i = 1; i < partition.size(); ++i) taus.push_back(partition[i] - partition[i - 1]);
  return taus;
}

void validate_schedule(const SamplingSchedule& schedule) {
  if (!(schedule.period > 0.0)) throw Error("schedule: frame period must be positive");
  if (schedule.partition.size() < 2) throw Error("schedule: partition needs t_0 and t_{l+1}");
  if (schedule.partition.front() != 0.0) throw Error("schedule: partition must start at 0");
  if (std::abs(schedule.partition.back() - schedule.period) > 1e-12 * schedule.period)
    throw Error("schedule: partition must end at the frame period");
  for (std::size_t i = 1; i < schedule.partition.size(); ++i)
    if (!(schedule.partition[i] > schedule.partition[i - 1]))
      throw Error("schedule: partition must be strictly increasing");
  if (schedule.frames < 1) throw Error("schedule: frame count must be at least 1");
}

SamplingSchedule schedule_from_increments(const std::vector<double>& taus, int frames,
                                          RatioPolicy policy) {
  if (taus.empty()) throw Error("schedule: no increments");
  SamplingSchedule s;
  s.partition.push_back(0.0);
  double t = 0.0;
  for (double tau : taus) {
    if (!(tau > 0.0)) throw Error("schedule: increments must be positive");
    t += tau;
    s.partition.push_back(t);
  }
  s.period = t;
  s.frames = frames;
  s.ratio_policy = policy;
  validate_schedule(s);
  return s;
}

SamplingSchedule golden_schedule(double period, int interior_points, int frames) {
  if (interior_points < 1) throw Error("golden_schedule: need at least one interior point");
  if (!(period > 0.0)) throw Error("golden_schedule: period must be positive");
  const double phi = std::numbers::phi;
  std::vector<double> weights;
  double total = 0.0;
  for (int i = 0; i <= interior_points; ++i) {
    weights.push_back(std::pow(phi, i));
    total += weights.back();
  }
  std::vector<double> taus;
  for (double w : weights) taus.push_back(period * w / total);
  SamplingSchedule s = schedule_from_increments(taus, frames, RatioPolicy::GoldenByConstruction);
  // Pin the end point exactly; the cumulative sum may be off by an ulp.
  s.partition.back() = period;
  s.period = period;
  return s;
}

SamplingSchedule uniform_schedule(double period, int interior_points, int frames) {
  if (interior_points < 0) throw Error("uniform_schedule: negative interior point count");
  std::vector<double> taus(static_cast<std::size_t>(interior_points + 1),
                           period / (interior_points + 1));
  SamplingSchedule s = schedule_from_increments(taus, frames);
  s.partition.back() = period;
  s.period = period;
  return s;
}

PulseFamily make_pulse_family(double alpha, std::vector<double> taus, int channel) {
  PulseFamily family;
  if (alpha == 0.0)
    family.warnings.push_back("alpha = 0: the family is the zero input and cannot identify a bilinear system");
  for (double tau : taus)
    if (tau < 0.0) throw Error("make_pulse_family: negative pulse width");
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  for (double tau : taus) {
    if (tau == 0.0) family.warnings.push_back("tau = 0 pulse is the zero input");
    family.pulses.push_back({tau, alpha, channel});
  }
  return family;
}

BilinearModel BilinearModel::from(const CoherenceSystem& sys) {
  return {sys.A, sys.beta, sys.N_list, sys.C};
}

BilinearModel BilinearModel::from(const EmbeddedSystem& emb) {
  return {emb.A_emb, Vec::Zero(emb.A_emb.rows()), emb.N_emb, emb.C_emb};
}

Vec rk4_advance(const Mat& A, const Vec& offset, const Mat& drive, const Vec& x, double duration,
                int steps) {
  if (steps <= 0) throw Error("rk4_advance: step count must be positive");
  const Mat gen = drive.size() ? Mat(A + drive) : A;
  const double h = duration / steps;
  Vec state = x;
  for (int s = 0; s < steps; ++s) {
    const Vec k1 = gen * state + offset;
    const Vec k2 = gen * (state + 0.5 * h * k1) + offset;
    const Vec k3 = gen * (state + 0.5 * h * k2) + offset;
    const Vec k4 = gen * (state + h * k3) + offset;
    state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return state;
}

int thread_cap() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("OQS_IDENT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) cap = v;
  }
  return cap;
}

namespace {

std::vector<Sample> simulate_run(const BilinearModel& model, const Pulse* pulse, int pulse_id,
                                 int run, const SamplingSchedule& schedule, const Vec& x0,
                                 double h_max, const SimulationOptions& options) {
  const double T = schedule.period;
  std::vector<double> events = schedule.partition;
  if (pulse && pulse->tau > 0.0 && pulse->tau < T) events.push_back(pulse->tau);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  Mat drive;
  if (pulse && pulse->alpha != 0.0 && pulse->tau > 0.0)
    drive = pulse->alpha * model.N_list.at(static_cast<std::size_t>(pulse->channel));

  std::mt19937_64 rng(options.seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(run + 1));
  std::normal_distribution<double> noise(0.0, options.noise_sigma > 0.0 ? options.noise_sigma : 1.0);

  std::vector<Sample> out;
  auto record = [&](const Vec& x, int frame, int offset_index, double t) {
    Sample s;
    s.t = t;
    s.frame = frame;
    s.offset_index = offset_index;
    s.pulse_id = pulse_id;
    s.run = run;
    s.y = model.C * x;
    if (options.noise_sigma > 0.0)
      for (Eigen::Index i = 0; i < s.y.size(); ++i) s.y(i) += noise(rng);
    if (options.store_states) s.x = x;
    out.push_back(std::move(s));
  };

  const auto& part = schedule.partition;
  Vec x = x0;
  for (int k = 0; k < schedule.frames; ++k) {
    const double base = k * T;
    std::size_t next_stamp = 0;
    for (std::size_t e = 0; e + 1 < events.size(); ++e) {
      const double a = events[e];
      const double b = events[e + 1];
      while (next_stamp + 1 < part.size() && part[next_stamp] <= a) {
        if (part[next_stamp] == a)
          record(x, k, static_cast<int>(next_stamp), base + a);
        ++next_stamp;
      }
      const bool on = drive.size() && a < pulse->tau;
      const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / h_max - 1e-9)));
      x = rk4_advance(model.A, model.offset, on ? drive : Mat(), x, b - a, steps);
    }
  }
  record(x, schedule.frames, 0, schedule.frames * T);
  return out;
}

}  // namespace

MeasurementRecord simulate(const BilinearModel& model, const std::vector<Pulse>& pulses,
                           const SamplingSchedule& schedule, const Vec& x0,
                           const SimulationOptions& options) {
  validate_schedule(schedule);
  if (x0.size() != model.dim())
    throw Error("simulate: x0 has length " + std::to_string(x0.size()) + ", system has " +
                std::to_string(model.dim()));
  const auto taus = schedule.increments();
  const double min_tau = *std::min_element(taus.begin(), taus.end());
  double h_max = min_tau / 50.0;
  if (options.step) {
    if (!(*options.step > 0.0)) throw Error("simulate: step must be positive");
    h_max = std::min(*options.step, h_max);
  }
  for (const auto& p : pulses) {
    if (p.channel < 0 || p.channel >= static_cast<int>(model.N_list.size()))
      throw Error("simulate: pulse channel " + std::to_string(p.channel + 1) + " out of range");
    if (p.tau < 0.0 || p.tau > schedule.period)
      throw Error("simulate: pulse width exceeds the frame period (schedule/pulse time mismatch)");
  }

  const int runs = pulses.empty() ? 1 : static_cast<int>(pulses.size());
  std::vector<std::vector<Sample>> per_run(static_cast<std::size_t>(runs));
  auto work = [&](int r) {
    const Pulse* p = pulses.empty() ? nullptr : &pulses[static_cast<std::size_t>(r)];
    per_run[static_cast<std::size_t>(r)] =
        simulate_run(model, p, p ? r : -1, r, schedule, x0, h_max, options);
  };

  const int workers = std::min(runs, options.threads > 0 ? options.threads : thread_cap());
  if (workers <= 1) {
    for (int r = 0; r < runs; ++r) work(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int r = next++; r < runs; r = next++) work(r);
      });
  }

  MeasurementRecord rec;
  rec.pulses = pulses;
  rec.C = model.C;
  rec.runs = runs;
  for (auto& run : per_run)
    for (auto& s : run) rec.samples.push_back(std::move(s));
  return rec;
}

MeasurementRecord merge_records(const std::vector<MeasurementRecord>& records) {
  MeasurementRecord out;
  if (records.empty()) return out;
  out.C = records.front().C;
  out.pulses = records.front().pulses;
  for (const auto& rec : records) {
    for (const auto& s : rec.samples) {
      Sample copy = s;
      copy.run += out.runs;
      out.samples.push_back(std::move(copy));
    }
    out.runs += rec.runs;
  }
  return out;
}

}  // namespace oqsid
