#include <benchmark/benchmark.h>

#include "support/vaccine.hpp"
#include "unitsel/benefit.hpp"
#include "unitsel/lp_oracle.hpp"
#include "unitsel/pc_bounds.hpp"
#include "unitsel/sim.hpp"

namespace {

using namespace unitsel;
using namespace unitsel::testing;

BenefitFunction task1() {
  const auto v = task1_vector();
  return BenefitFunction::from_vector(2, 3, v);
}

void BM_ResponseTypeBounds(benchmark::State& state) {
  const auto exp = vaccine_experimental();
  const auto obs = vaccine_observational();
  for (auto _ : state) {
    BoundsEvaluator evaluator(exp, obs);
    benchmark::DoNotOptimize(evaluator.response_type_bounds());
  }
}
BENCHMARK(BM_ResponseTypeBounds);

void BM_ExploreReductions(benchmark::State& state) {
  const auto f = task1();
  for (auto _ : state) benchmark::DoNotOptimize(explore_reductions(f).forms.size());
}
BENCHMARK(BM_ExploreReductions)->Unit(benchmark::kMillisecond);

void BM_BoundBenefit(benchmark::State& state) {
  const auto f = task1();
  const auto exp = vaccine_experimental();
  const auto obs = vaccine_observational();
  for (auto _ : state) benchmark::DoNotOptimize(bound_benefit(f, exp, obs).interval);
}
BENCHMARK(BM_BoundBenefit)->Unit(benchmark::kMillisecond);

void BM_OracleBounds(benchmark::State& state) {
  const auto f = task1();
  const auto exp = vaccine_experimental();
  const auto obs = vaccine_observational();
  for (auto _ : state) benchmark::DoNotOptimize(oracle_bounds(f, exp, obs));
}
BENCHMARK(BM_OracleBounds)->Unit(benchmark::kMillisecond);

void BM_SimPopulation(benchmark::State& state) {
  const auto f = task1();
  const auto space = explore_reductions(f);
  std::uint64_t id = 0;
  for (auto _ : state) {
    PopulationStream rng(20230207, id++);
    std::optional<ObservationalDistribution> obs;
    PopulationFractions fractions = generate_fractions(rng);
    ExperimentalDistribution exp = derive_experimental(fractions);
    while (!(obs = sample_observational(fractions, exp, rng))) {
      fractions = generate_fractions(rng);
      exp = derive_experimental(fractions);
    }
    BoundsEvaluator evaluator(exp, *obs);
    const auto types = evaluator.response_type_bounds();
    benchmark::DoNotOptimize(evaluate_space(space, exp, types));
  }
}
BENCHMARK(BM_SimPopulation)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
