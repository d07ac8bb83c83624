#include "cat0/barycenter.hpp"
#include "cat0/fubini.hpp"
#include "cat0/obsvar.hpp"
#include "cat0/suites.hpp"
#include "cat0/transport.hpp"

#include <benchmark/benchmark.h>

using namespace cat0;

namespace {

void BM_BarycenterTree(benchmark::State& state) {
    Rng rng(1);
    const Space s = Space::metric_tree(random_tree(static_cast<std::size_t>(state.range(0)), rng));
    const DiscreteMeasure nu = random_measure(s, 16, rng);
    for (auto _ : state) benchmark::DoNotOptimize(barycenter(nu));
}
BENCHMARK(BM_BarycenterTree)->Arg(4)->Arg(16)->Arg(64);

void BM_BarycenterHyperboloid(benchmark::State& state) {
    Rng rng(2);
    const Space s = Space::hyperboloid(static_cast<int>(state.range(0)));
    const DiscreteMeasure nu = random_measure(s, 16, rng);
    for (auto _ : state) benchmark::DoNotOptimize(barycenter(nu));
}
BENCHMARK(BM_BarycenterHyperboloid)->Arg(2)->Arg(8);

void BM_W1(benchmark::State& state) {
    Rng rng(3);
    const Space s = Space::metric_tree(MetricTree::tripod());
    const auto n = static_cast<std::size_t>(state.range(0));
    const DiscreteMeasure mu = random_measure(s, n, rng), nu = random_measure(s, n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(w1(mu, nu));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_W1)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_DualCertificate(benchmark::State& state) {
    Rng rng(4);
    const Space s = Space::euclidean(2);
    const auto n = static_cast<std::size_t>(state.range(0));
    const TransportResult r = w1(random_measure(s, n, rng), random_measure(s, n, rng));
    for (auto _ : state) benchmark::DoNotOptimize(dual_certificate(r.coupling));
}
BENCHMARK(BM_DualCertificate)->Arg(8)->Arg(32);

void BM_FubiniReport(benchmark::State& state) {
    Rng rng(5);
    const auto n = static_cast<std::size_t>(state.range(0));
    const ProductMMSpace dom(random_mm_space(n, rng), random_mm_space(n, rng));
    const MapTable f = random_map(dom, Space::metric_tree(MetricTree::tripod()), rng);
    for (auto _ : state) benchmark::DoNotOptimize(fubini_report(f));
}
BENCHMARK(BM_FubiniReport)->Arg(4)->Arg(8)->Arg(16);

void BM_GraphGap(benchmark::State& state) {
    const GraphMM g = GraphMM::hypercube(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(graph_gap(g));
}
BENCHMARK(BM_GraphGap)->DenseRange(3, 7, 2);

void BM_ObsVarLowerBound(benchmark::State& state) {
    const MMSpace x = GraphMM::cycle(static_cast<std::size_t>(state.range(0))).mm();
    const Space t = Space::metric_tree(MetricTree::tripod());
    for (auto _ : state) benchmark::DoNotOptimize(obsvar_lower_bound(x, t, 2.0, 1, 7));
}
BENCHMARK(BM_ObsVarLowerBound)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
