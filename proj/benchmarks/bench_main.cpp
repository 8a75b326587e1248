#include <benchmark/benchmark.h>

#include <random>

#include "oqsid/gksl.hpp"
#include "oqsid/identify.hpp"
#include "oqsid/ldsrec.hpp"
#include "oqsid/paramrec.hpp"

using namespace oqsid;

namespace {

GkslParams random_params(int n, bool symmetric, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  GkslParams p;
  p.theta = Vec::NullaryExpr(n, [&] { return nd(eng); });
  if (symmetric) {
    const Mat l = Mat::NullaryExpr(n, n, [&] { return nd(eng); });
    p.gamma = (l * l.transpose() / n).cast<cplx>();
  } else {
    const CMat l = CMat::NullaryExpr(n, n, [&] { return cplx(nd(eng), nd(eng)); });
    p.gamma = l * l.adjoint() / static_cast<double>(n);
  }
  p.symmetric = symmetric;
  return p;
}

void BM_StructureConstants(benchmark::State& state) {
  const LieBasis b = build_basis(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(structure_constants(b));
}
BENCHMARK(BM_StructureConstants)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_AssembleSystem(benchmark::State& state) {
  const LieBasis b = build_basis(static_cast<int>(state.range(0)));
  const StructureTensors t = structure_constants(b);
  const GkslParams p = random_params(b.n, false, 1);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_system(b, t, p));
}
BENCHMARK(BM_AssembleSystem)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_BilinearSpan(benchmark::State& state) {
  const LieBasis b = build_basis(static_cast<int>(state.range(0)));
  const CoherenceSystem sys = assemble_system(b, structure_constants(b), random_params(b.n, false, 2));
  Vec seed = Vec::Zero(b.n);
  seed(b.n - 1) = 0.5;
  const std::vector<Mat> N = {sys.N_list.front()};
  for (auto _ : state) benchmark::DoNotOptimize(bilinear_span_test(sys.A, N, seed, sys.C));
}
BENCHMARK(BM_BilinearSpan)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);

void BM_ContinuousReconstruction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 eng(3);
  std::normal_distribution<double> nd;
  Mat A = Mat::NullaryExpr(n, n, [&] { return nd(eng); });
  A -= (Eigen::EigenSolver<Mat>(A).eigenvalues().real().maxCoeff() + 0.2) * Mat::Identity(n, n);
  const SingleRateFamily fam =
      single_rate_models(exact_multirate_model(A, Mat(), Mat(Mat::Identity(n, n)), golden_schedule(1.0, 2)));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_continuous(fam));
}
BENCHMARK(BM_ContinuousReconstruction)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SymmetricRecovery(benchmark::State& state) {
  const LieBasis b = build_basis(2);
  const StructureTensors t = structure_constants(b);
  const ReconstructionMatrices m = build_reconstruction_matrices(t, b.hilbert_dim, true);
  const CoherenceSystem sys = assemble_system(b, t, random_params(b.n, true, 4));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_symmetric(sys.A, m));
}
BENCHMARK(BM_SymmetricRecovery)->Unit(benchmark::kMillisecond);

void BM_GeneralRecovery(benchmark::State& state) {
  const LieBasis b = build_basis(static_cast<int>(state.range(0)));
  const StructureTensors t = structure_constants(b);
  const ReconstructionMatrices m = build_reconstruction_matrices(t, b.hilbert_dim, false);
  const CoherenceSystem sys = assemble_system(b, t, random_params(b.n, false, 5));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_general(sys.A, sys.beta, m));
}
BENCHMARK(BM_GeneralRecovery)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);

void BM_BuildReconstructionMatrices(benchmark::State& state) {
  const LieBasis b = build_basis(2);
  const StructureTensors t = structure_constants(b);
  const bool symmetric = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(build_reconstruction_matrices(t, b.hilbert_dim, symmetric));
}
BENCHMARK(BM_BuildReconstructionMatrices)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
