#include <benchmark/benchmark.h>

#include <vector>

#include "hrcp/bhr.hpp"
#include "hrcp/changepoint.hpp"
#include "hrcp/margins.hpp"
#include "hrcp/monte_carlo.hpp"
#include "hrcp/random.hpp"

using namespace hrcp;

namespace {

BivariateSeries series(std::size_t T) {
  RandomStream rs(42);
  return BivariateSeries(sample_bhr(DependenceParam(1.5), T, rs));
}

void BM_Profile(benchmark::State& state, ProfileStrategy strategy) {
  const auto d = series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(scan_changepoints(d, strategy));
}
BENCHMARK_CAPTURE(BM_Profile, incremental, ProfileStrategy::Incremental)->Arg(50)->Arg(200)->Arg(600);
BENCHMARK_CAPTURE(BM_Profile, cold_serial, ProfileStrategy::ColdSerial)->Arg(50)->Arg(200)->Arg(600);
BENCHMARK_CAPTURE(BM_Profile, parallel, ProfileStrategy::Parallel)->Arg(50)->Arg(200)->Arg(600);

std::vector<double> gumbel_draws(std::size_t n) {
  RandomStream rs(7);
  std::vector<double> x(n);
  for (auto& v : x) v = rs.gumbel();
  return x;
}

void BM_LocalPwmSerial(benchmark::State& state) {
  const auto x = gumbel_draws(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(local_pwm_fit_serial(x, 100));
}
void BM_LocalPwmParallel(benchmark::State& state) {
  const auto x = gumbel_draws(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(local_pwm_fit(x, 100));
}
BENCHMARK(BM_LocalPwmSerial)->Arg(600)->Arg(5000);
BENCHMARK(BM_LocalPwmParallel)->Arg(600)->Arg(5000);

void BM_NullReplicates(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_null_statistics(100, DependenceParam(1.0), 64, RandomStream(3), workers));
  }
}
BENCHMARK(BM_NullReplicates)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_Sampler(benchmark::State& state) {
  RandomStream rs(9);
  for (auto _ : state) benchmark::DoNotOptimize(sample_bhr(DependenceParam(2.0), 1000, rs));
}
BENCHMARK(BM_Sampler);

}  // namespace

BENCHMARK_MAIN();
