#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oqsid/gksl.hpp"
#include "oqsid/liealg.hpp"
#include "oqsid/simulate.hpp"

namespace oqsid {

struct LinearRanks {
  int rank_OM = 0;
  int rank_CM = 0;
};

/// Ranks of [C; CA; ...; CA^{n-1}] and [B, AB, ..., A^{n-1}B]. B or C may be
/// empty (zero columns / rows), giving rank 0 for that side.
LinearRanks linear_rank_test(const Mat& A, const Mat& B, const Mat& C, double cutoff = -1.0);

Mat observability_matrix(const Mat& A, const Mat& C);
Mat controllability_matrix(const Mat& A, const Mat& B);

enum class SpanStatus {
  FullRank,
  Deficient,     // fixed point reached below full rank
  Inconclusive,  // word cap hit before either full rank or a fixed point
};

struct SpanResult {
  int rank = 0;
  SpanStatus status = SpanStatus::Deficient;
  long words = 0;  // matrix-vector products evaluated
};

struct BilinearRanks {
  SpanResult controllability;  // CM^(bi), seeded with b
  SpanResult observability;    // OM^(bi), seeded with the rows of C
};

struct SpanOptions {
  /// Cap on enumerated words; non-positive selects 10 n^2.
  long word_cap = 0;
  double cutoff = -1.0;
};

/// Rank of span{ A_{i1} ... A_{ik} v : A_j in {A} u N_list, k <= n-1 } for
/// each seed vector v, by breadth-first word enumeration. Only words whose
/// vector enlarged the span are extended, which leaves the span unchanged.
SpanResult word_span_rank(const std::vector<Mat>& generators, const std::vector<Vec>& seeds,
                          const SpanOptions& options = {});

/// Controllability uses {A, N_j} on b; observability uses the transposes on
/// the rows of C, so that an empty N_list reproduces linear_rank_test.
BilinearRanks bilinear_span_test(const Mat& A, const std::vector<Mat>& N_list, const Vec& b,
                                 const Mat& C, const SpanOptions& options = {});

enum class RatioVerdict {
  IrrationalByConstruction,
  DeclaredIrrational,
  Rational,           // fails
  NoSmallDenominator  // warning: floating point cannot certify irrationality
};

struct RatioCheck {
  int i = 0;  // 1-based increment indices
  int j = 0;
  double ratio = 0.0;
  RatioVerdict verdict = RatioVerdict::Rational;
  long numerator = 0;  // for Rational: ratio = numerator / denominator
  long denominator = 0;
};

struct SamplingCheck {
  bool sampling_ok = false;
  bool has_warnings = false;
  bool single_rate = false;  // one increment: there is no ratio to exploit
  std::vector<RatioCheck> pairs;
};

inline constexpr long kMaxRatioDenominator = 1000000;

/// Best rational approximation p/q with q <= max_denominator via the
/// continued-fraction expansion; returns {p, q}.
std::pair<long, long> best_rational(double x, long max_denominator = kMaxRatioDenominator);

SamplingCheck sampling_policy_check(const SamplingSchedule& schedule);

/// Row-rank test of the depth-L block Hankel matrix of the input sequence
/// (columns of `inputs` are u(0), ..., u(T-1)). Throws if T - L + 1 < L.
bool persistency_check(const Mat& inputs, int depth, double cutoff = -1.0);

/// rank(X_n) = n for the state matrix [x(0) ... x(n-1)] (n columns used).
bool state_persistency_check(const Mat& states, double cutoff = -1.0);

Mat hankel_matrix(const Mat& inputs, int depth);

struct AccessibleSet {
  std::set<int> indices;  // 0-based generator indices
  int iterations = 0;     // growth iterations until the fixed point
};

/// Closure of `measured` under commutation with `delta`: k joins when
/// f_{ghk} != 0 for some g in the current set and h in delta.
AccessibleSet accessible_set(const StructureTensors& tensors, const std::set<int>& measured,
                             const std::set<int>& delta);

enum class IdentMode { Autonomous, Controlled };

enum class Verdict { Identifiable, NotIdentifiable, Inconclusive };

struct IdentifiabilityReport {
  IdentMode mode = IdentMode::Autonomous;
  int rank_OM = 0;
  int rank_CM = 0;
  int required_rank = 0;
  bool embedded = false;
  SamplingCheck sampling;
  bool sampling_ok = false;
  bool pulses_ok = false;
  Verdict verdict = Verdict::NotIdentifiable;
  std::vector<std::string> failing_clauses;
  std::vector<std::string> notes;

  int exit_code() const {
    switch (verdict) {
      case Verdict::Identifiable: return 0;
      case Verdict::NotIdentifiable: return 2;
      case Verdict::Inconclusive: return 3;
    }
    return 2;
  }
};

inline const char* kClauseRationalRatio = "sampling ratios rational";
inline const char* kClauseSingleRate = "single sampling rate";
inline const char* kClauseUncertifiedRatio = "sampling ratios not certified irrational";
inline const char* kClauseDegeneratePulses = "pulse family degenerate";
inline const char* kClauseMixedAmplitudes = "pulses not a fixed-amplitude family";
inline const char* kClauseRankOM = "observability rank deficient";
inline const char* kClauseRankCM = "controllability rank deficient";
inline const char* kClauseSpanInconclusive = "bilinear span inconclusive below word cap";

struct ReportInputs {
  /// Coherence system; the standard-form embedding is used when beta != 0.
  CoherenceSystem system;
  std::optional<SamplingSchedule> schedule;
  std::vector<Pulse> pulses;
  /// Autonomous mode input matrix; empty selects the identity (free
  /// initial state).
  Mat B;
  SpanOptions span;
};

/// Autonomous: sampling policy AND full linear ranks. Controlled: pulses in
/// a fixed-amplitude family with alpha != 0 AND full bilinear span ranks
/// (seeded with x0 and the controlled channels of the pulses).
IdentifiabilityReport identifiability_report(IdentMode mode, const ReportInputs& inputs);

const char* to_string(RatioVerdict v);
const char* to_string(SpanStatus s);
const char* to_string(Verdict v);

}  // namespace oqsid
