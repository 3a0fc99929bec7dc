#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wowbench/calibration.hpp"
#include "wowbench/consistency.hpp"
#include "wowbench/normalization.hpp"
#include "wowbench/plan.hpp"
#include "wowbench/trajectory.hpp"

namespace {

using namespace wowbench;

Trajectory make_trajectory(int n, std::uint32_t seed) {
    std::mt19937 rng(seed);
    Trajectory t;
    t.points.reserve(static_cast<size_t>(n));
    double x = 0, y = 0;
    for (int i = 0; i < n; ++i) {
        x += static_cast<double>(rng() % 100) / 50.0 - 1.0;
        y += static_cast<double>(rng() % 100) / 50.0 - 1.0;
        t.points.push_back({x, y});
    }
    return t;
}

Frame make_frame(int w, int h, std::uint32_t seed) {
    std::mt19937 rng(seed);
    Frame f;
    f.width = w;
    f.height = h;
    f.channels = 3;
    f.data.resize(static_cast<size_t>(w) * h * 3);
    for (auto& v : f.data) v = static_cast<std::uint8_t>(rng() % 256);
    return f;
}

void BM_dtw(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Trajectory a = make_trajectory(n, 1);
    const Trajectory b = make_trajectory(n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dtw(a, b).total);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_dtw)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_frechet(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Trajectory a = make_trajectory(n, 3);
    const Trajectory b = make_trajectory(n, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(frechet(a, b));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_frechet)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_resample(benchmark::State& state) {
    const Trajectory t = make_trajectory(256, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(resample(t, 512).points.size());
    }
}
BENCHMARK(BM_resample);

void BM_desirability(benchmark::State& state) {
    MetricSpec spec;
    spec.direction = Direction::LIB;
    spec.anchor_low = 0;
    spec.anchor_high = 2000;
    spec.family = Family::LogitT;
    spec.theta = 0.7;
    double x = 0.0;
    for (auto _ : state) {
        x += 1.0;
        if (x > 2100.0) x = 0.0;
        benchmark::DoNotOptimize(desirability(x, spec, 1e-6).value);
    }
}
BENCHMARK(BM_desirability);

void BM_ssim(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const Frame a = make_frame(side, side, 6);
    const Frame b = make_frame(side, side, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ssim(a, b));
    }
}
BENCHMARK(BM_ssim)->Arg(64)->Arg(256);

void BM_score_plan(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<PlanNode> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < n; ++i) {
        nodes.push_back({"n" + std::to_string(i), "act" + std::to_string(i % 7)});
        if (i > 0 && i % 3 != 0) {
            edges.emplace_back("n" + std::to_string(i - 1), "n" + std::to_string(i));
        }
    }
    const PlanDag dag = PlanDag::build(std::move(nodes), edges);
    PredictedPlan pred;
    std::mt19937 rng(8);
    for (int i = 0; i < n; ++i) pred.steps.push_back("act" + std::to_string(rng() % 9));
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_plan(pred, dag).s_plan);
    }
}
BENCHMARK(BM_score_plan)->Range(8, 128);

void BM_calibrate_metric(benchmark::State& state) {
    std::mt19937 rng(9);
    std::vector<CalibrationSample> samples;
    for (int i = 0; i < 200; ++i) {
        const double x = static_cast<double>(rng() % 10000) / 10000.0;
        samples.push_back({x, 100.0 * x * x + static_cast<double>(rng() % 100) / 50.0});
    }
    const auto grid = default_grid(Family::Gamma);
    for (auto _ : state) {
        benchmark::DoNotOptimize(calibrate_metric(samples, Family::Gamma, grid, 5, 42).theta_star);
    }
}
BENCHMARK(BM_calibrate_metric);

}  // namespace

BENCHMARK_MAIN();
