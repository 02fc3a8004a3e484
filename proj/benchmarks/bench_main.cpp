/*
 * Copyright 2026 The trendprep Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "trendprep/cluster.hpp"
#include "trendprep/denoise.hpp"
#include "trendprep/detrend.hpp"
#include "trendprep/evalstats.hpp"
#include "trendprep/forecast.hpp"
#include "trendprep/random.hpp"
#include "trendprep/synthgen.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace trendprep;

Vector noisy_series(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Vector y(n);
    for (std::size_t t = 0; t < n; ++t) y[t] = 50.0 + 20.0 * std::sin(0.12 * t) + 5.0 * rng.normal();
    return y;
}

void BM_SmoothingSpline(benchmark::State& state) {
    const auto y = noisy_series(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(fit_smoothing_spline(y, 0.5));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SmoothingSpline)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oN);

void BM_DenoiseSeries(benchmark::State& state) {
    const auto y = noisy_series(1000, 2);
    const DenoiseModel model{"k", 0.5, 0.0, true};
    for (auto _ : state) benchmark::DoNotOptimize(denoise_series(y, model));
}
BENCHMARK(BM_DenoiseSeries);

void BM_LambdaGridSearch(benchmark::State& state) {
    const auto y = noisy_series(700, 3);
    for (auto _ : state) benchmark::DoNotOptimize(grid_search_lambda(y));
}
BENCHMARK(BM_LambdaGridSearch);

void BM_WardCluster(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(4);
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) d(i, j) = d(j, i) = 2.0 * rng.uniform();
    }
    for (auto _ : state) benchmark::DoNotOptimize(ward_cluster(d));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WardCluster)->RangeMultiplier(2)->Range(16, 512)->Complexity();

void BM_AdfTest(benchmark::State& state) {
    Rng rng(5);
    Vector y(250);
    double s = 0.0;
    for (auto& v : y) v = (s += rng.normal());
    for (auto _ : state) benchmark::DoNotOptimize(adf_test(y, AdfVariant::linear));
}
BENCHMARK(BM_AdfTest);

void BM_FitArimax(benchmark::State& state) {
    const auto y = noisy_series(104, 6);
    const auto x = noisy_series(105, 7);
    const ExogColumns cols{x};
    for (auto _ : state) benchmark::DoNotOptimize(fit_arimax(y, cols, 1));
}
BENCHMARK(BM_FitArimax);

void BM_FitArgo(benchmark::State& state) {
    const auto y = noisy_series(200, 8);
    const auto x = noisy_series(201, 9);
    const ExogColumns cols{x};
    for (auto _ : state) benchmark::DoNotOptimize(fit_argo(y, cols, 0));
}
BENCHMARK(BM_FitArgo)->Unit(benchmark::kMillisecond);

void BM_WilcoxonExact(benchmark::State& state) {
    Rng rng(10);
    Vector d(static_cast<std::size_t>(state.range(0)));
    for (auto& v : d) v = rng.normal() - 0.2;
    for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_signed_rank(d, WilcoxonMethod::exact));
}
BENCHMARK(BM_WilcoxonExact)->Arg(12)->Arg(25);

void BM_SampleDownload(benchmark::State& state) {
    WorldConfig c;
    c.weeks = 520;
    c.num_keywords = 50;
    const auto world = generate_world(c);
    const auto day = world.dates.back() + std::chrono::days{7};
    for (auto _ : state) benchmark::DoNotOptimize(sample_download(world, day));
}
BENCHMARK(BM_SampleDownload)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
