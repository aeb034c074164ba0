#include "hdlss/classifiers.hpp"
#include "hdlss/harness.hpp"

#include <benchmark/benchmark.h>

using namespace hdlss;

static void BM_SamplePair(benchmark::State& state) {
    const PopulationPair pair = make_setting("X");
    const Index p = state.range(0);
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sample_pair(pair, p, 20, 20, seed++));
    state.SetItemsProcessed(state.iterations() * 40 * p);
}
BENCHMARK(BM_SamplePair)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_FitGeometry(benchmark::State& state) {
    const LabeledData data = sample_pair(make_setting("V"), state.range(0), 20, 20, 3);
    for (auto _ : state) benchmark::DoNotOptimize(fit_geometry(data));
}
BENCHMARK(BM_FitGeometry)->Arg(1000)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

static void BM_RidgeDirection(benchmark::State& state) {
    const TrainedGeometry g = fit_geometry(sample_pair(make_setting("V"), 10000, 20, 20, 4));
    const IndexSetD D = index_set_D(make_setting("V"), 20);
    for (auto _ : state) benchmark::DoNotOptimize(projected_ridge(g, -30.0, D));
}
BENCHMARK(BM_RidgeDirection)->Unit(benchmark::kMicrosecond);

static void BM_SmdpFit(benchmark::State& state) {
    const LabeledData data = sample_pair(make_setting("X"), 10000, 20, 20, 5);
    SmdpOptions opt;
    opt.K = static_cast<int>(state.range(0));
    opt.m = 4;
    opt.m1 = 3;
    opt.m2 = 3;
    for (auto _ : state) benchmark::DoNotOptimize(smdp_fit(data.X, 20, 20, opt));
}
BENCHMARK(BM_SmdpFit)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_LimitReport(benchmark::State& state) {
    const PopulationPair pair = make_setting("IX");
    const LabeledData data = sample_pair(pair, 2000, 20, 20, 6);
    const ScoreSummary s = score_summary(pair, data);
    for (auto _ : state) benchmark::DoNotOptimize(limit_report(s));
}
BENCHMARK(BM_LimitReport)->Unit(benchmark::kMicrosecond);

static void BM_ExperimentRep(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.setting = "IX";
    cfg.pair = make_setting("IX");
    cfg.p = 10000;
    cfg.reps = 1;
    cfg.threads = 1;
    cfg.n_test = 500;
    cfg.rules = parse_rules("mdp,bmdp,bprd:hat1,bprd:hat2");
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_experiment(cfg));
        ++cfg.seed;
    }
}
BENCHMARK(BM_ExperimentRep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
