#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "workbench/finance.hpp"
#include "workbench/genetics.hpp"
#include "workbench/laws.hpp"
#include "workbench/markov.hpp"
#include "workbench/queueing.hpp"
#include "workbench/rng.hpp"

using namespace workbench;

static void BM_BinomialPmfTable(benchmark::State& state) {
  const laws::DiscreteLaw law = laws::Binomial{state.range(0), 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(laws::pmf_table(law, state.range(0)));
  state.SetItemsProcessed(state.iterations() * (state.range(0) + 1));
}
BENCHMARK(BM_BinomialPmfTable)->Arg(100)->Arg(10000);

static void BM_RngUniform(benchmark::State& state) {
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
}
BENCHMARK(BM_RngUniform);

static void BM_ForwardLawRK4(benchmark::State& state) {
  const std::size_t n_max = markov::truncation_level(0.5);
  const auto gen = markov::birth_death_generator(markov::BirthDeathRates::constant(1.0, 2.0, n_max));
  markov::Distribution p0(n_max + 1, 0.0);
  p0[0] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(markov::integrate_forward_law(gen, p0, 50.0));
}
BENCHMARK(BM_ForwardLawRK4)->Unit(benchmark::kMillisecond);

static void BM_SimulateMM1(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RngStream rng(seed++);
    benchmark::DoNotOptimize(queueing::simulate_mm1({1.0, 2.0}, state.range(0), rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateMM1)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_WrightFisherToAbsorption(benchmark::State& state) {
  const genetics::WrightFisherModel model(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RngStream rng(seed++);
    benchmark::DoNotOptimize(genetics::simulate_wright_fisher(model, state.range(0) / 2, 1'000'000, rng, false));
  }
}
BENCHMARK(BM_WrightFisherToAbsorption)->Arg(20)->Arg(200);

static void BM_FixationSolve(benchmark::State& state) {
  const genetics::WrightFisherModel model(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(genetics::fixation_probabilities_exact(model));
}
BENCHMARK(BM_FixationSolve)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_ForwardDiffusion(benchmark::State& state) {
  const auto points = static_cast<std::size_t>(state.range(0));
  const auto x = genetics::diffusion_grid_points(points);
  std::vector<double> f0(points);
  for (std::size_t i = 0; i < points; ++i) f0[i] = std::exp(-0.5 * std::pow((x[i] - 0.5) / 0.1, 2));
  for (auto _ : state)
    benchmark::DoNotOptimize(genetics::solve_kolmogorov_forward(genetics::wright_fisher_diffusion, {}, f0,
                                                                {points, std::nullopt}, 0.1));
}
BENCHMARK(BM_ForwardDiffusion)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

static void BM_BinomialTree(benchmark::State& state) {
  const finance::GbmParams g{100.0, 0.05, 0.2, 0.05};
  const auto steps = static_cast<std::size_t>(state.range(0));
  const auto market = finance::crr_market(g, 1.0, steps);
  for (auto _ : state)
    benchmark::DoNotOptimize(finance::price_multi_period(market, {100.0, steps, finance::OptionKind::call}));
}
BENCHMARK(BM_BinomialTree)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_MonteCarloGbm(benchmark::State& state) {
  const finance::GbmParams g{100.0, 0.05, 0.2, 0.05};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        finance::mc_price_european(g, finance::OptionKind::call, 100.0, 1.0, state.range(0), RngStream(1)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloGbm)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
