#include <benchmark/benchmark.h>

#include "powdist/cantor.hpp"
#include "powdist/interval.hpp"
#include "powdist/rational.hpp"
#include "powdist/sequences.hpp"

using namespace powdist;

static void BM_IvPow(benchmark::State& state) {
  const Precision prec = state.range(0);
  const RInterval base = RInterval::parse("2.718281828", prec);
  const RInterval exponent = RInterval::parse("137.25", prec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iv_pow(base, exponent, Mode::Outward, prec));
  }
}
BENCHMARK(BM_IvPow)->RangeMultiplier(4)->Range(64, 4096);

static void BM_Densify(benchmark::State& state) {
  const SequencePair sp = gen_exponents("geom:2", "zero", static_cast<std::size_t>(state.range(0)));
  const BigReal eps = to_bigreal(BigRational(1, 10), kSequencePrecision);
  for (auto _ : state) {
    benchmark::DoNotOptimize(densify(sp, eps));
  }
}
BENCHMARK(BM_Densify)->Arg(10)->Arg(20)->Arg(40);

static void BM_Descend(benchmark::State& state) {
  const std::size_t depth = static_cast<std::size_t>(state.range(0));
  const SequencePair sp = gen_exponents("nsq", "zero", depth + 1);
  Problem p;
  p.dp = undensified(sp);
  p.es = default_schedule(p.dp);
  ConstructionConfig cfg;
  cfg.depth = depth;
  for (auto _ : state) {
    benchmark::DoNotOptimize(descend(cfg, p, sp));
  }
}
BENCHMARK(BM_Descend)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
