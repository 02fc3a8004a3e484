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

#include "test_util.hpp"

#include "trendprep/random.hpp"
#include "trendprep/synthgen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

namespace trendprep {
namespace {

using std::chrono::days;

WorldConfig small_config(std::size_t weeks = 120) {
    WorldConfig c;
    c.weeks = weeks;
    c.num_keywords = 12;
    return c;
}

TEST(Hypergeometric, MatchesExactPmf) {
    Rng rng(91);
    const std::uint64_t N = 60, K = 25, n = 18;
    std::map<std::uint64_t, int> counts;
    const int draws = 40000;
    for (int i = 0; i < draws; ++i) ++counts[sample_hypergeometric(rng, N, K, n)];
    // chi-square over the support against the pmf from binomial coefficients
    auto choose = [](double a, double b) {
        return std::exp(std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1));
    };
    double chi2 = 0;
    int cells = 0;
    for (std::uint64_t k = 0; k <= n; ++k) {
        const double p = choose(K, k) * choose(N - K, n - k) / choose(N, n);
        if (p * draws < 5) continue;
        chi2 += std::pow(counts[k] - p * draws, 2) / (p * draws);
        ++cells;
    }
    // 0.999 quantile of chi-square with <= 15 df is below 38
    EXPECT_LT(chi2, 38.0) << cells << " cells";
}

TEST(Hypergeometric, DegenerateCases) {
    Rng rng(92);
    EXPECT_EQ(sample_hypergeometric(rng, 100, 0, 40), 0u);
    EXPECT_EQ(sample_hypergeometric(rng, 100, 100, 40), 40u);
    EXPECT_EQ(sample_hypergeometric(rng, 100, 37, 100), 37u);
    EXPECT_THROW(sample_hypergeometric(rng, 10, 11, 3), InputError);
    EXPECT_THROW(sample_hypergeometric(rng, 10, 3, 11), InputError);
}

TEST(World, DeterministicAndWithinPopulation) {
    const auto a = generate_world(small_config());
    const auto b = generate_world(small_config());
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(world_to_json(a), world_to_json(b));
    for (const auto& k : a.counts) {
        for (std::size_t t = 0; t < k.size(); ++t) EXPECT_LE(k[t], a.population[t]);
    }
    auto other = small_config();
    other.seed += 1;
    EXPECT_NE(generate_world(other).counts, a.counts);
}

TEST(World, FamiliesFollowTheirDefinitions) {
    WorldConfig c = small_config(300);
    c.keywords = {KeywordSpec{.name = "flat", .base = 500},
                  KeywordSpec{.name = "lin", .family = TrendFamily::linear, .base = 500, .slope = 3.0,
                              .noise_scale = 20}};
    const auto w = generate_world(c);
    for (auto v : w.counts[0]) EXPECT_EQ(v, 500u);
    const auto& lin = w.counts[1];
    EXPECT_NEAR((static_cast<double>(lin.back()) - static_cast<double>(lin.front())) / 299.0, 3.0, 0.2);
}

TEST(World, InfeasibleConfigIsRejected) {
    WorldConfig c = small_config();
    c.keywords = {KeywordSpec{.name = "huge", .base = 2e6}};
    EXPECT_THROW(generate_world(c), InputError);
    c = small_config();
    c.sample_size = 2'000'000;
    EXPECT_THROW(generate_world(c), InputError);
    c = small_config();
    c.start = Date{std::chrono::year{2020} / std::chrono::January / 6};
    EXPECT_THROW(generate_world(c), InputError);
}

TEST(Download, CensusReproducesTheLatentRatio) {
    WorldConfig c = small_config(60);
    c.population = 1e5;
    c.sample_size = 100000;
    c.privacy_threshold = 0;
    const auto w = generate_world(c);
    const auto panel = sample_download(w, w.dates.back() + days(7));
    for (std::size_t i = 0; i < w.counts.size(); ++i) {
        double peak = 0;
        for (std::size_t t = 0; t < 60; ++t) peak = std::max(peak, double(w.counts[i][t]) / w.population[t]);
        for (std::size_t t = 0; t < 60; ++t) {
            const double ratio = double(w.counts[i][t]) / w.population[t];
            EXPECT_EQ(panel.values[i][t], std::round(100 * ratio / peak));
        }
    }
}

TEST(Download, SameDaySamePanelAndPeakIsHundred) {
    const auto w = generate_world(small_config());
    const auto day = w.dates.back() + days(7);
    const auto a = sample_download(w, day);
    EXPECT_EQ(a, sample_download(w, day));
    EXPECT_NE(a.values, sample_download(w, day + days(1)).values);
    a.validate_reported();
    for (const auto& v : a.values) {
        if (*std::max_element(v.begin(), v.end()) > 0) {
            EXPECT_EQ(*std::max_element(v.begin(), v.end()), 100.0);
        }
    }
}

TEST(Download, SubThresholdSeriesIsAllZero) {
    WorldConfig c = small_config(80);
    // expected sample count 1e5 * 50 / 1e6 = 5, threshold 30
    c.keywords = {KeywordSpec{.name = "tiny", .base = 50}};
    c.privacy_threshold = 30;
    const auto w = generate_world(c);
    const auto panel = sample_download(w, w.dates.back() + days(7));
    for (double v : panel.values[0]) EXPECT_EQ(v, 0.0);
}

TEST(Download, SampleMeanConvergesToLatentRatio) {
    WorldConfig c = small_config(10);
    c.keywords = {KeywordSpec{.name = "k", .base = 3000, .seasonal_amplitude = 0.5}};
    const auto w = generate_world(c);
    const int reps = 400;
    std::vector<double> sum(10, 0.0);
    for (int r = 0; r < reps; ++r) {
        const auto k = sample_counts(w, w.counts[0], w.dates.back() + days(7 + r), "k");
        for (std::size_t t = 0; t < 10; ++t) sum[t] += double(k[t]) / w.sample_size;
    }
    for (std::size_t t = 0; t < 10; ++t) {
        const double N = w.population[t], K = w.counts[0][t], n = w.sample_size;
        const double p = K / N;
        const double var = n * p * (1 - p) * (N - n) / (N - 1) / (n * n);
        EXPECT_NEAR(sum[t] / reps, p, 3 * std::sqrt(var / reps));
    }
}

TEST(Download, RelativeVarianceShrinksWithVolume) {
    WorldConfig c = small_config(30);
    c.keywords = {KeywordSpec{.name = "low", .base = 400}, KeywordSpec{.name = "high", .base = 4000}};
    c.privacy_threshold = 0;
    const auto w = generate_world(c);
    auto rel_var = [&](std::size_t i) {
        double acc = 0;
        for (int r = 0; r < 100; ++r) {
            const auto k = sample_counts(w, w.counts[i], w.dates.back() + days(7 + r), w.components[i].name);
            for (std::size_t t = 0; t < 30; ++t) {
                const double ratio = (double(k[t]) / w.sample_size) / (double(w.counts[i][t]) / w.population[t]);
                acc += (ratio - 1) * (ratio - 1);
            }
        }
        return acc / 3000;
    };
    EXPECT_GT(rel_var(0), 5 * rel_var(1));
}

TEST(Download, ZeroFractionGrowsWithThreshold) {
    const auto w = generate_world(small_config(200));
    const auto day = w.dates.back() + days(7);
    std::vector<double> prev(w.counts.size(), 0.0);
    for (double factor : {1.0, 1.5, 3.0, 10.0, 100.0}) {
        const auto shifted = regime_shift(w, w.dates.front(), factor);
        const auto panel = sample_download(shifted, day);
        for (std::size_t i = 0; i < panel.values.size(); ++i) {
            const double zf = zero_fraction(panel.values[i]);
            EXPECT_GE(zf, prev[i]);
            prev[i] = zf;
        }
    }
}

TEST(Union, Examples) {
    WorldConfig c = small_config(5);
    c.keywords = {KeywordSpec{.name = "a", .family = TrendFamily::linear, .base = 100, .slope = 10},
                  KeywordSpec{.name = "b", .base = 150},
                  KeywordSpec{.name = "c", .family = TrendFamily::linear, .base = 300, .slope = -40}};
    c.default_overlap = 0.2;
    const auto w = generate_world(c);
    // a: 100 110 120 130 140; b: 150; c: 300 260 220 180 140
    const std::vector<std::uint64_t> expected{
        static_cast<std::uint64_t>(std::llround(550 - 0.2 * (100 + 100 + 150))),
        static_cast<std::uint64_t>(std::llround(520 - 0.2 * (110 + 110 + 150))),
        static_cast<std::uint64_t>(std::llround(490 - 0.2 * (120 + 120 + 150))),
        static_cast<std::uint64_t>(std::llround(460 - 0.2 * (130 + 130 + 150))),
        static_cast<std::uint64_t>(std::llround(430 - 0.2 * (140 + 140 + 140)))};
    const std::vector<std::string> abc{"a", "b", "c"};
    EXPECT_EQ(union_volume(w, abc), expected);

    c.default_overlap = 0.0;
    const auto disjoint = generate_world(c);
    const auto sum = union_volume(disjoint, abc);
    for (std::size_t t = 0; t < 5; ++t) {
        EXPECT_EQ(sum[t], disjoint.counts[0][t] + disjoint.counts[1][t] + disjoint.counts[2][t]);
    }
    const std::vector<std::string> twice{"b", "b"};
    EXPECT_EQ(union_volume(disjoint, twice), disjoint.counts[1]);

    // four identical members fully overlapping: 4K - 6K < 0
    c.keywords = {KeywordSpec{.name = "p", .base = 100}, KeywordSpec{.name = "q", .base = 100},
                  KeywordSpec{.name = "r", .base = 100}, KeywordSpec{.name = "s", .base = 100}};
    c.default_overlap = 1.0;
    const std::vector<std::string> pqrs{"p", "q", "r", "s"};
    EXPECT_THROW(union_volume(generate_world(c), pqrs), InputError);
}

TEST(RegimeShift, Examples) {
    const auto w = generate_world(small_config(150));
    const auto day = w.dates.back() + days(7);
    EXPECT_EQ(sample_download(regime_shift(w, w.dates[50], 1.0), day), sample_download(w, day));
    EXPECT_EQ(sample_download(regime_shift(w, w.dates.back() + days(7), 5.0), day),
              sample_download(w, day));
    EXPECT_THROW(regime_shift(w, w.dates[10], 0.5), InputError);
    EXPECT_THROW(regime_shift(w, w.dates.front() - days(7), 2.0), InputError);
}

TEST(RegimeShift, CalibratesFortyPercentMoreZeros) {
    WorldConfig c = small_config(400);
    c.keywords = {KeywordSpec{.name = "ref", .base = 140, .seasonal_amplitude = 0.6, .noise_scale = 30}};
    const auto w = generate_world(c);
    const auto day = w.dates.back() + days(7);
    const auto shift_at = w.dates[200];
    auto zeros_after = [&](double factor) {
        const auto v = sample_download(regime_shift(w, shift_at, factor), day).values[0];
        return static_cast<double>(std::count(v.begin() + 200, v.end(), 0.0));
    };
    const double before = zeros_after(1.0);
    ASSERT_GT(before, 10.0);
    double lo = 1.0, hi = 4.0;
    ASSERT_GE(zeros_after(hi), 1.4 * before);
    for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (lo + hi);
        (zeros_after(mid) < 1.4 * before ? lo : hi) = mid;
    }
    // sampled counts are integers, so the zero count moves in steps
    EXPECT_GE(zeros_after(hi), 1.4 * before);
    EXPECT_LT(zeros_after(lo), 1.4 * before);
    EXPECT_LT(hi - lo, 1e-6);
}

TEST(Target, DrivenByLatentCounts) {
    WorldConfig c = small_config(200);
    c.keywords = {KeywordSpec{.name = "d", .base = 1000, .seasonal_amplitude = 0.5}};
    const auto w = generate_world(c);
    TargetSpec spec;
    spec.drivers = {"d"};
    spec.weights = {5.0};
    spec.noise_sd = 0.0;
    const auto y = generate_target(w, spec);
    double m = 0;
    for (auto v : w.counts[0]) m += double(v) / 200;
    for (std::size_t t = 0; t < 200; ++t) EXPECT_NEAR(y[t], 10.0 + 5.0 * w.counts[0][t] / m, 1e-9);
    spec.weights = {};
    EXPECT_THROW(generate_target(w, spec), InputError);
}

TEST(WorldJson, RoundTripAndFieldErrors) {
    WorldConfig c = small_config();
    c.overlaps = {{"term_000", "term_001", 0.3}};
    c.keywords = {KeywordSpec{.name = "x", .family = TrendFamily::quadratic, .quadratic = 0.01}};
    const auto text = world_config_to_json(c);
    EXPECT_EQ(world_config_to_json(world_config_from_json(text)), text);
    try {
        world_config_from_json(R"({"privacy_threshold": -1})");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("privacy_threshold"), std::string::npos);
    }
    EXPECT_THROW(world_config_from_json(R"({"bogus": 1})"), InputError);
    EXPECT_THROW(world_config_from_json("{"), InputError);
}

TEST(Replicates, ConsecutiveDays) {
    const auto w = generate_world(small_config(60));
    const auto reps = sample_replicates(w, 3);
    ASSERT_EQ(reps.size(), 3u);
    EXPECT_EQ(reps[0].download_date, w.dates.back() + days(7));
    EXPECT_EQ(reps[2].download_date, w.dates.back() + days(9));
}

}  // namespace
}  // namespace trendprep
