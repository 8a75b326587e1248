#include "oqsid/identify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oqsid {

Mat observability_matrix(const Mat& A, const Mat& C) {
  const Eigen::Index n = A.rows();
  const Eigen::Index p = C.rows();
  Mat om(n * p, n);
  Mat block = C;
  for (Eigen::Index k = 0; k < n; ++k) {
    om.middleRows(k * p, p) = block;
    block = block * A;
  }
  return om;
}

Mat controllability_matrix(const Mat& A, const Mat& B) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  Mat cm(n, n * m);
  Mat block = B;
  for (Eigen::Index k = 0; k < n; ++k) {
    cm.middleCols(k * m, m) = block;
    block = A * block;
  }
  return cm;
}

LinearRanks linear_rank_test(const Mat& A, const Mat& B, const Mat& C, double cutoff) {
  if (A.rows() != A.cols()) throw Error("linear_rank_test: A must be square");
  if (B.size() && B.rows() != A.rows()) throw Error("linear_rank_test: B has wrong row count");
  if (C.size() && C.cols() != A.cols()) throw Error("linear_rank_test: C has wrong column count");
  LinearRanks r;
  if (C.size()) r.rank_OM = linalg::numerical_rank(observability_matrix(A, C), cutoff);
  if (B.size()) r.rank_CM = linalg::numerical_rank(controllability_matrix(A, B), cutoff);
  return r;
}

SpanResult word_span_rank(const std::vector<Mat>& generators, const std::vector<Vec>& seeds,
                          const SpanOptions& options) {
  SpanResult result;
  if (seeds.empty()) return result;
  const Eigen::Index n = seeds.front().size();
  const long cap = options.word_cap > 0 ? options.word_cap : 10L * n * n;
  const double rel_tol = options.cutoff > 0.0 ? options.cutoff : 1e-9;

  std::vector<Vec> basis;  // orthonormal
  auto try_add = [&](const Vec& w) {
    const double norm = w.norm();
    if (norm == 0.0 || static_cast<Eigen::Index>(basis.size()) >= n) return false;
    Vec r = w;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) r -= q.dot(r) * q;
    if (r.norm() <= rel_tol * norm) return false;
    basis.push_back(r.normalized());
    return true;
  };

  std::vector<Vec> frontier;
  for (const auto& s : seeds)
    if (try_add(s)) frontier.push_back(s);

  // Words of length 1 .. n-1; each level only extends vectors that were new.
  for (Eigen::Index level = 1; level < n && !frontier.empty(); ++level) {
    if (static_cast<Eigen::Index>(basis.size()) == n) break;
    std::vector<Vec> next;
    for (const auto& v : frontier) {
      for (const auto& g : generators) {
        if (result.words >= cap) {
          result.rank = static_cast<int>(basis.size());
          result.status = result.rank == n ? SpanStatus::FullRank : SpanStatus::Inconclusive;
          return result;
        }
        ++result.words;
        Vec w = g * v;
        // Keep magnitudes bounded across levels; the span is unaffected.
        const double wn = w.norm();
        if (wn > 0.0) w /= wn;
        if (try_add(w)) next.push_back(std::move(w));
        if (static_cast<Eigen::Index>(basis.size()) == n) break;
      }
      if (static_cast<Eigen::Index>(basis.size()) == n) break;
    }
    frontier = std::move(next);
  }
  result.rank = static_cast<int>(basis.size());
  result.status = result.rank == n ? SpanStatus::FullRank : SpanStatus::Deficient;
  return result;
}

BilinearRanks bilinear_span_test(const Mat& A, const std::vector<Mat>& N_list, const Vec& b,
                                 const Mat& C, const SpanOptions& options) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw Error("bilinear_span_test: A must be square");
  for (const auto& nj : N_list)
    if (nj.rows() != n || nj.cols() != n) throw Error("bilinear_span_test: N_j must match A");
  if (b.size() != n) throw Error("bilinear_span_test: b must have length n");
  if (C.size() && C.cols() != n) throw Error("bilinear_span_test: C has wrong column count");

  std::vector<Mat> fwd{A};
  std::vector<Mat> adj{A.transpose()};
  for (const auto& nj : N_list) {
    fwd.push_back(nj);
    adj.push_back(nj.transpose());
  }
  BilinearRanks out;
  out.controllability = word_span_rank(fwd, {b}, options);
  std::vector<Vec> rows;
  for (Eigen::Index r = 0; r < C.rows(); ++r) rows.push_back(C.row(r).transpose());
  out.observability = word_span_rank(adj, rows, options);
  return out;
}

std::pair<long, long> best_rational(double x, long max_denominator) {
  if (!std::isfinite(x)) throw Error("best_rational: non-finite value");
  const bool negative = x < 0.0;
  double rem = std::abs(x);
  long h_prev = 1, h_prev2 = 0;
  long k_prev = 0, k_prev2 = 1;
  long best_h = static_cast<long>(std::floor(rem)), best_k = 1;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(rem);
    if (a_real > static_cast<double>(std::numeric_limits<long>::max() / 4)) break;
    const long a = static_cast<long>(a_real);
    const long h = a * h_prev + h_prev2;
    const long k = a * k_prev + k_prev2;
    if (k > max_denominator) break;
    best_h = h;
    best_k = k;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const double frac = rem - a_real;
    if (frac <= 0.0) break;
    rem = 1.0 / frac;
  }
  return {negative ? -best_h : best_h, best_k};
}

SamplingCheck sampling_policy_check(const SamplingSchedule& schedule) {
  validate_schedule(schedule);
  SamplingCheck check;
  const auto taus = schedule.increments();
  if (taus.size() < 2) {
    check.single_rate = true;
    check.sampling_ok = false;
    return check;
  }
  bool all_ok = true;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    for (std::size_t j = i + 1; j < taus.size(); ++j) {
      RatioCheck rc;
      rc.i = static_cast<int>(i) + 1;
      rc.j = static_cast<int>(j) + 1;
      rc.ratio = taus[j] / taus[i];
      switch (schedule.ratio_policy) {
        case RatioPolicy::GoldenByConstruction:
          rc.verdict = RatioVerdict::IrrationalByConstruction;
          break;
        case RatioPolicy::DeclaredIrrational:
          rc.verdict = RatioVerdict::DeclaredIrrational;
          break;
        case RatioPolicy::Undeclared: {
          const auto [p, q] = best_rational(rc.ratio);
          const double approx = static_cast<double>(p) / static_cast<double>(q);
          if (std::abs(rc.ratio - approx) <=
              4.0 * std::numeric_limits<double>::epsilon() * std::abs(rc.ratio)) {
            rc.verdict = RatioVerdict::Rational;
            rc.numerator = p;
            rc.denominator = q;
            all_ok = false;
          } else {
            rc.verdict = RatioVerdict::NoSmallDenominator;
            check.has_warnings = true;
            all_ok = false;
          }
          break;
        }
      }
      check.pairs.push_back(rc);
    }
  }
  check.sampling_ok = all_ok;
  return check;
}

Mat hankel_matrix(const Mat& inputs, int depth) {
  const Eigen::Index m = inputs.rows();
  const Eigen::Index T = inputs.cols();
  if (depth < 1) throw Error("hankel_matrix: depth must be positive");
  const Eigen::Index cols = T - depth + 1;
  if (cols < depth)
    throw Error("persistency_check: need T - L + 1 >= L samples (T = " + std::to_string(T) +
                ", L = " + std::to_string(depth) + ")");
  Mat h(depth * m, cols);
  for (int r = 0; r < depth; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) h.block(r * m, c, m, 1) = inputs.col(r + c);
  return h;
}

bool persistency_check(const Mat& inputs, int depth, double cutoff) {
  const Mat h = hankel_matrix(inputs, depth);
  return linalg::numerical_rank(h, cutoff) == h.rows();
}

bool state_persistency_check(const Mat& states, double cutoff) {
  const Eigen::Index n = states.rows();
  if (states.cols() < n)
    throw Error("state_persistency_check: need n = " + std::to_string(n) + " state columns");
  return linalg::numerical_rank(Mat(states.leftCols(n)), cutoff) == n;
}

AccessibleSet accessible_set(const StructureTensors& tensors, const std::set<int>& measured,
                             const std::set<int>& delta) {
  const int n = tensors.n();
  for (int v : measured)
    if (v < 0 || v >= n) throw Error("accessible_set: measured index out of range");
  for (int v : delta)
    if (v < 0 || v >= n) throw Error("accessible_set: delta index out of range");

  AccessibleSet out;
  out.indices = measured;
  while (true) {
    std::set<int> grown = out.indices;
    for (int g : out.indices)
      for (int h : delta)
        for (const auto& s : tensors.f_pair(g, h)) grown.insert(s.l);
    if (grown.size() == out.indices.size()) break;
    out.indices = std::move(grown);
    ++out.iterations;
  }
  return out;
}

namespace {

struct ModelView {
  Mat A;
  Mat C;
  Vec b;
  std::vector<Mat> N;
  bool embedded = false;
};

ModelView view_of(const CoherenceSystem& sys) {
  ModelView v;
  const bool with_offset = sys.beta.size() && sys.beta.norm() > 1e-12;
  if (with_offset) {
    const EmbeddedSystem emb = embed_standard_form(sys);
    v.A = emb.A_emb;
    v.C = emb.C_emb;
    v.b = emb.x_emb;
    v.N = emb.N_emb;
    v.embedded = true;
  } else {
    v.A = sys.A;
    v.C = sys.C;
    v.b = sys.x0.size() == sys.A.rows() ? sys.x0 : Vec::Zero(sys.A.rows());
    v.N = sys.N_list;
  }
  return v;
}

}  // namespace

IdentifiabilityReport identifiability_report(IdentMode mode, const ReportInputs& inputs) {
  IdentifiabilityReport rep;
  rep.mode = mode;
  const ModelView view = view_of(inputs.system);
  rep.embedded = view.embedded;
  const auto n = static_cast<int>(view.A.rows());
  rep.required_rank = n;
  if (view.embedded) rep.notes.push_back("beta != 0: ranks computed on the standard-form embedding");

  bool inconclusive = false;
  if (mode == IdentMode::Autonomous) {
    if (!inputs.schedule) throw Error("identifiability_report: autonomous mode needs a schedule");
    rep.sampling = sampling_policy_check(*inputs.schedule);
    rep.sampling_ok = rep.sampling.sampling_ok;
    if (rep.sampling.single_rate) {
      rep.failing_clauses.push_back(kClauseSingleRate);
      rep.failing_clauses.push_back(kClauseRationalRatio);
    } else if (!rep.sampling_ok) {
      bool any_rational = false;
      for (const auto& p : rep.sampling.pairs) any_rational |= p.verdict == RatioVerdict::Rational;
      if (any_rational) {
        rep.failing_clauses.push_back(kClauseRationalRatio);
      } else {
        rep.failing_clauses.push_back(kClauseUncertifiedRatio);
        inconclusive = true;
      }
    }
    Mat B = inputs.B.size() ? inputs.B : Mat(Mat::Identity(n, n));
    if (B.rows() != n) throw Error("identifiability_report: B has wrong row count");
    const LinearRanks r = linear_rank_test(view.A, B, view.C);
    rep.rank_OM = r.rank_OM;
    rep.rank_CM = r.rank_CM;
    rep.pulses_ok = true;
  } else {
    rep.sampling_ok = true;
    std::vector<int> channels;
    double alpha = 0.0;
    bool mixed = false;
    bool degenerate = inputs.pulses.empty();
    for (const auto& p : inputs.pulses) {
      if (p.alpha == 0.0) degenerate = true;
      if (alpha == 0.0) alpha = p.alpha;
      else if (p.alpha != alpha && p.alpha != 0.0) mixed = true;
      if (p.channel < 0 || p.channel >= static_cast<int>(view.N.size()))
        throw Error("identifiability_report: pulse channel out of range");
      if (std::find(channels.begin(), channels.end(), p.channel) == channels.end())
        channels.push_back(p.channel);
    }
    rep.pulses_ok = !degenerate && !mixed;
    if (degenerate) rep.failing_clauses.push_back(kClauseDegeneratePulses);
    if (mixed) rep.failing_clauses.push_back(kClauseMixedAmplitudes);
    for (const auto& p : inputs.pulses)
      if (p.zero_width()) rep.notes.push_back("tau = 0 pulse acts as the zero input");

    std::vector<Mat> used;
    for (int c : channels) used.push_back(view.N[static_cast<std::size_t>(c)]);
    const BilinearRanks br = bilinear_span_test(view.A, used, view.b, view.C, inputs.span);
    rep.rank_CM = br.controllability.rank;
    rep.rank_OM = br.observability.rank;
    if (br.controllability.status == SpanStatus::Inconclusive ||
        br.observability.status == SpanStatus::Inconclusive) {
      rep.failing_clauses.push_back(kClauseSpanInconclusive);
      inconclusive = true;
    }
  }

  if (rep.rank_OM < n) rep.failing_clauses.push_back(kClauseRankOM);
  if (rep.rank_CM < n) rep.failing_clauses.push_back(kClauseRankCM);

  if (rep.failing_clauses.empty()) {
    rep.verdict = Verdict::Identifiable;
  } else {
    // Inconclusive only when nothing else definitely failed.
    bool hard_failure = false;
    for (const auto& c : rep.failing_clauses)
      if (c != kClauseUncertifiedRatio && c != kClauseSpanInconclusive &&
          !((c == kClauseRankOM || c == kClauseRankCM) && mode == IdentMode::Controlled &&
            inconclusive))
        hard_failure = true;
    rep.verdict = (inconclusive && !hard_failure) ? Verdict::Inconclusive : Verdict::NotIdentifiable;
  }
  return rep;
}

const char* to_string(RatioVerdict v) {
  switch (v) {
    case RatioVerdict::IrrationalByConstruction: return "irrational by construction";
    case RatioVerdict::DeclaredIrrational: return "declared irrational";
    case RatioVerdict::Rational: return "rational (fails)";
    case RatioVerdict::NoSmallDenominator: return "no small denominator found (warning)";
  }
  return "?";
}

const char* to_string(SpanStatus s) {
  switch (s) {
    case SpanStatus::FullRank: return "full-rank";
    case SpanStatus::Deficient: return "deficient";
    case SpanStatus::Inconclusive: return "inconclusive-below-cap";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Identifiable: return "identifiable";
    case Verdict::NotIdentifiable: return "not identifiable";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace oqsid
