#include <benchmark/benchmark.h>

#include "sdcc/projpsd.hpp"
#include "sdcc/lowner.hpp"
#include "sdcc/scalarfun.hpp"
#include "sdcc/geometry.hpp"

using namespace sdcc;

namespace {

struct OracleLike {
  Mat Z, H, W;
};

OracleLike make_instance(int n) {
  std::mt19937_64 rng(0x5DCC + n);
  const Mat p = random_orthogonal(rng, n);
  Vec ev(n);
  for (int i = 0; i < n; ++i) ev[i] = (i < n / 3) ? 1.5 : (i < 2 * n / 3 ? 0.0 : -1.0);
  OracleLike o;
  o.Z = symmetrize(p * ev.asDiagonal() * p.transpose());
  o.H = random_sym(rng, n);
  o.W = random_sym(rng, n);
  return o;
}

void BM_EigSym(benchmark::State& state) {
  const auto o = make_instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eig_sym(o.Z));
}

void BM_ProjDir2(benchmark::State& state) {
  const auto o = make_instance(static_cast<int>(state.range(0)));
  const Spectral sp = eig_sym(o.Z);
  for (auto _ : state) benchmark::DoNotOptimize(proj_dir2(sp, o.H, o.W));
}

void BM_LownerDir2Max(benchmark::State& state) {
  const auto o = make_instance(static_cast<int>(state.range(0)));
  const Spectral sp = eig_sym(o.Z);
  for (auto _ : state) benchmark::DoNotOptimize(lowner_dir2(sp, max_fun(), o.H, o.W));
}

void BM_Tangent2Structural(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  const SpecialCaseInstance inst = generic_case_generator(std::min(n, 8), true, 42, 1, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(tangent2_structural(inst.base, inst.F, inst.G));
}

}  // namespace

BENCHMARK(BM_EigSym)->Unit(benchmark::kMicrosecond)->Arg(8)->Arg(32)->Arg(64);
BENCHMARK(BM_ProjDir2)->Unit(benchmark::kMicrosecond)->Arg(8)->Arg(32)->Arg(64);
BENCHMARK(BM_LownerDir2Max)->Unit(benchmark::kMicrosecond)->Arg(8)->Arg(32)->Arg(64);
BENCHMARK(BM_Tangent2Structural)->Unit(benchmark::kMicrosecond)->Arg(6)->Arg(8);

BENCHMARK_MAIN();
