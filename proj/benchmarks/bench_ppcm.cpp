#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "ppcm/cells.hpp"
#include "ppcm/metrics.hpp"
#include "ppcm/ppcm_estimator.hpp"
#include "ppcm/random.hpp"
#include "ppcm/sensitivity.hpp"
#include "ppcm/simgen.hpp"

namespace {

void BM_GenReplicate(benchmark::State& state) {
  ppcm::sim::ScenarioSpec spec;
  spec.id = static_cast<int>(state.range(0));
  spec.seed = 1;
  std::size_t r = 0;
  for (auto _ : state) {
    spec.replicate = r++;
    benchmark::DoNotOptimize(ppcm::sim::gen_replicate(spec).truth);
  }
}
BENCHMARK(BM_GenReplicate)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

ppcm::WaveModels constant_models(std::size_t waves) {
  ppcm::WaveModels w;
  for (std::size_t t = 0; t < waves; ++t) {
    w.outcome.push_back(std::make_shared<ppcm::ConstantOutcomeModel>(0.1 * static_cast<double>(t), 1.0));
    w.response.push_back(t == 0 ? nullptr : std::make_shared<ppcm::ConstantResponseModel>(0.8));
  }
  return w;
}

// Forward imputation over a 10^4 population with nonzero offsets; arg = posterior draws.
void BM_PosteriorWithOffsets(benchmark::State& state) {
  ppcm::sim::ScenarioSpec spec;
  spec.id = 5;
  spec.seed = 2;
  const auto rep = ppcm::sim::gen_replicate(spec);
  auto cfg = ppcm::SensitivityConfig::zeros(2);
  cfg.practice[0] = ppcm::TriangularPrior::constant(0.0, 0.15, 0.15);
  cfg.dropout[0] = ppcm::TriangularPrior::constant(-0.5, -0.2, 0.0);
  ppcm::PpcmOptions opt;
  opt.n_posterior = static_cast<std::size_t>(state.range(0));
  opt.seed = 4;
  const auto models = constant_models(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ppcm::estimate_ppcm_with_models(rep.population, models, cfg, opt).wave_draws.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(opt.n_posterior * rep.population.units()));
}
BENCHMARK(BM_PosteriorWithOffsets)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_TriangularQuantile(benchmark::State& state) {
  const ppcm::TriangularBounds b{-1.0, 0.2, 3.0};
  ppcm::Rng rng(6, 0);
  for (auto _ : state) benchmark::DoNotOptimize(ppcm::triangular_quantile(b, rng.uniform()));
}
BENCHMARK(BM_TriangularQuantile);

void BM_BuildCells(benchmark::State& state) {
  ppcm::Rng rng(7, 0);
  std::vector<ppcm::alt::CellKey> pop, smp;
  for (int i = 0; i < 10000; ++i) {
    pop.push_back({static_cast<int>(rng.index(2)), static_cast<int>(rng.index(2)), static_cast<int>(rng.index(3)),
                   static_cast<int>(rng.index(3))});
  }
  for (int i = 0; i < 1000; ++i) smp.push_back(pop[rng.index(pop.size())]);
  for (auto _ : state) benchmark::DoNotOptimize(ppcm::alt::build_cells_from_keys(pop, smp).cells.size());
}
BENCHMARK(BM_BuildCells)->Unit(benchmark::kMicrosecond);

void BM_Summarize(benchmark::State& state) {
  ppcm::Rng rng(8, 0);
  std::vector<ppcm::metrics::ReplicateResult> results;
  for (std::size_t r = 0; r < 1000; ++r) {
    for (const char* e : {"mb-sp", "mb-lm", "greg"}) {
      const double point = rng.normal();
      results.push_back({e, r, point, point - 1.0, point + 1.0, 0.0, true, {}});
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(ppcm::metrics::summarize(results).size());
}
BENCHMARK(BM_Summarize)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
