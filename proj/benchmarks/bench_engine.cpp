#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "bnrefine/counts.hpp"
#include "bnrefine/engine.hpp"
#include "bnrefine/math.hpp"
#include "bnrefine/query.hpp"
#include "bnrefine/sampler.hpp"

namespace {

using namespace bnrefine;

// Binary variables, each depending on its two predecessors.
ConcreteNetwork two_back_chain(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  std::vector<std::vector<std::size_t>> parents(n);
  std::vector<Cpt> cpts(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t k = 1; k <= 2 && k <= x; ++k) parents[x].insert(parents[x].begin(), x - k);
    cpts[x].arity = 2;
    cpts[x].num_configs = std::size_t{1} << parents[x].size();
    for (std::size_t j = 0; j < cpts[x].num_configs; ++j) {
      const double p = u(rng);
      cpts[x].probs.push_back(1.0 - p);
      cpts[x].probs.push_back(p);
    }
  }
  return ConcreteNetwork(DomainSchema::binary(n), std::move(parents), std::move(cpts));
}

CombinedNetwork fresh(std::size_t n) {
  return init(DomainSchema::binary(n), ArcPriorMatrix(n, 0.5), PriorConfig{});
}

void BM_LogMarginalLikelihood(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto truth = two_back_chain(k + 1, 1);
  const auto data = forward_sample(truth, 5000, 2);
  std::vector<std::size_t> parents(k);
  for (std::size_t i = 0; i < k; ++i) parents[i] = i;
  const std::vector<std::size_t> arities(k + 1, 2);
  const auto counts = tally(k, ParentIndexer(parents, arities), truth.schema(), data);
  for (auto _ : state) benchmark::DoNotOptimize(log_marginal_likelihood(counts, 0.5));
  state.counters["rows"] = static_cast<double>(counts.rows().size());
}
BENCHMARK(BM_LogMarginalLikelihood)->DenseRange(0, 10, 2);

// Per-example cost once search has populated the lattices.
void BM_ObserveAfterRefine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto truth = two_back_chain(n, 3);
  const auto warmup = forward_sample(truth, 500, 4);
  const auto stream = forward_sample(truth, 4096, 5);
  auto net = fresh(n);
  observe_batch(net, warmup);
  refine(net, SearchParams{});
  state.counters["nodes"] = static_cast<double>(net.total_nodes());
  std::size_t i = 0;
  for (auto _ : state) {
    observe(net, stream[i++ % stream.size()]);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ObserveAfterRefine)->Arg(6)->Arg(10)->Arg(14);

void BM_Refine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto truth = two_back_chain(n, 6);
  const auto data = forward_sample(truth, 2000, 7);
  for (auto _ : state) {
    state.PauseTiming();
    auto net = fresh(n);
    observe_batch(net, data);
    state.ResumeTiming();
    const auto report = refine(net, SearchParams{});
    benchmark::DoNotOptimize(report.expansions);
  }
}
BENCHMARK(BM_Refine)->Arg(6)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_ArcPosteriors(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto truth = two_back_chain(n, 8);
  auto net = fresh(n);
  observe_batch(net, forward_sample(truth, 2000, 9));
  refine(net, SearchParams{});
  for (auto _ : state) benchmark::DoNotOptimize(all_arc_posteriors(net));
}
BENCHMARK(BM_ArcPosteriors)->Arg(6)->Arg(14);

}  // namespace
BENCHMARK_MAIN();
