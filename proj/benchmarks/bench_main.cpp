#include <benchmark/benchmark.h>

#include "xpm/analytic.hpp"
#include "xpm/config.hpp"
#include "xpm/steady.hpp"
#include "xpm/sweep.hpp"

using namespace xpm;

namespace {

SystemParams eit() { return make_system1(Case::EIT, 0.1, 3.55, 5.0, {0.4, 2.0, 2.4}); }

} // namespace

static void BM_ClosedFormSignal(benchmark::State& state) {
    const auto p = eit();
    for (auto _ : state) benchmark::DoNotOptimize(signal_coherence_s1(p));
}
BENCHMARK(BM_ClosedFormSignal);

static void BM_BuildLiouvillian(benchmark::State& state) {
    const auto p = eit();
    for (auto _ : state) benchmark::DoNotOptimize(build_liouvillian(p));
}
BENCHMARK(BM_BuildLiouvillian);

static void BM_SteadyState(benchmark::State& state) {
    const auto l = build_liouvillian(eit());
    for (auto _ : state) benchmark::DoNotOptimize(steady_state(l));
}
BENCHMARK(BM_SteadyState)->Unit(benchmark::kMicrosecond);

// 401-point coupling sweep, analytic and Lindblad, threads from the argument
static void BM_Sweep401(benchmark::State& state) {
    auto spec = load_settings(XPM_CONFIG_DIR "/fig4.toml").sweep;
    spec.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec));
    state.SetItemsProcessed(state.iterations() * spec.range.points);
}
BENCHMARK(BM_Sweep401)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
