#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ppcm/bart.hpp"
#include "ppcm/dart.hpp"
#include "ppcm/random.hpp"

namespace {

struct Data {
  std::size_t n;
  std::size_t p;
  std::vector<double> x, y, r;
};

// Friedman-style response on p uniform predictors, five of them active.
Data make_data(std::size_t n, std::size_t p) {
  ppcm::Rng rng(17, n * 31 + p);
  Data d{n, p, std::vector<double>(n * p), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = &d.x[i * p];
    for (std::size_t j = 0; j < p; ++j) xi[j] = rng.uniform();
    const double f = 10.0 * std::sin(3.14159 * xi[0] * xi[1]) + 20.0 * (xi[2] - 0.5) * (xi[2] - 0.5) + 10.0 * xi[3] +
                     5.0 * xi[4];
    d.y[i] = f + rng.normal();
    d.r[i] = f + rng.normal() > 14.0 ? 1.0 : 0.0;
  }
  return d;
}

ppcm::bart::BartConfig config(std::size_t trees) {
  ppcm::bart::BartConfig c;
  c.n_trees = trees;
  c.n_burn = 0;
  c.n_keep = 1;
  c.seed = 3;
  return c;
}

// One backfitting sweep; args: n, trees.
void BM_BackfitSweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto trees = static_cast<std::size_t>(state.range(1));
  const Data d = make_data(n, 10);
  ppcm::bart::BackfitSampler sampler(d.x, d.n, d.p, d.y, ppcm::bart::OutcomeKind::kContinuous, config(trees));
  for (int k = 0; k < 50; ++k) sampler.iterate();
  for (auto _ : state) {
    sampler.iterate();
    benchmark::DoNotOptimize(sampler.sigma());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * trees));
}
BENCHMARK(BM_BackfitSweep)->ArgsProduct({{250, 1000, 4000}, {50, 100, 200}})->Unit(benchmark::kMillisecond);

void BM_ProbitSweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Data d = make_data(n, 10);
  ppcm::bart::BackfitSampler sampler(d.x, d.n, d.p, d.r, ppcm::bart::OutcomeKind::kProbit, config(50));
  for (int k = 0; k < 50; ++k) sampler.iterate();
  for (auto _ : state) {
    sampler.iterate();
    benchmark::DoNotOptimize(sampler.split_probs().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ProbitSweep)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

// Posterior-mean prediction over 100 kept forests.
void BM_PredictMean(benchmark::State& state) {
  const Data d = make_data(1000, 10);
  auto cfg = config(static_cast<std::size_t>(state.range(0)));
  cfg.n_burn = 100;
  cfg.n_keep = 100;
  const auto ens = ppcm::bart::fit_continuous(d.x, d.n, d.p, d.y, cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ens.predict_mean(std::span<const double>(&d.x[(i % d.n) * d.p], d.p)));
    ++i;
  }
}
BENCHMARK(BM_PredictMean)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_DartDraw(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  ppcm::Rng rng(5, 0);
  std::vector<std::size_t> counts(p, 0);
  for (std::size_t j = 0; j < p; j += 3) counts[j] = 10 + j;
  for (auto _ : state) benchmark::DoNotOptimize(ppcm::bart::draw_log_split_probs(counts, 0.7, rng));
}
BENCHMARK(BM_DartDraw)->Arg(8)->Arg(64)->Arg(512);

}  // namespace
