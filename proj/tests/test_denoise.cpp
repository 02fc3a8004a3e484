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

#include "trendprep/denoise.hpp"
#include "trendprep/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace trendprep {
namespace {

using testing::Dense;

// Penalized normal equations with the roughness matrix K = Q R^-1 Q' of a
// natural cubic spline on unit-spaced knots: f = (I + lambda K)^-1 y.
struct DenseSpline {
    std::vector<double> f;
    std::vector<double> gamma;  // interior second derivatives
};

Dense roughness(std::size_t n, Dense* q_out = nullptr, Dense* r_out = nullptr) {
    Dense q = testing::zeros(n, n - 2);
    Dense r = testing::zeros(n - 2, n - 2);
    for (std::size_t j = 0; j + 2 < n; ++j) {
        q[j][j] = 1.0;
        q[j + 1][j] = -2.0;
        q[j + 2][j] = 1.0;
        r[j][j] = 2.0 / 3.0;
        if (j + 3 < n) r[j][j + 1] = r[j + 1][j] = 1.0 / 6.0;
    }
    const auto rinv = testing::inverse_dense(r);
    Dense k = testing::zeros(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t i = 0; i + 2 < n; ++i) {
                for (std::size_t j = 0; j + 2 < n; ++j) k[a][b] += q[a][i] * rinv[i][j] * q[b][j];
            }
        }
    }
    if (q_out) *q_out = q;
    if (r_out) *r_out = r;
    return k;
}

DenseSpline dense_spline(const std::vector<double>& y, double lambda) {
    const auto n = y.size();
    Dense q, r;
    auto a = roughness(n, &q, &r);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] *= lambda;
        a[i][i] += 1.0;
    }
    DenseSpline s;
    s.f = testing::solve_dense(a, y);
    std::vector<double> qtf(n - 2, 0.0);
    for (std::size_t j = 0; j + 2 < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) qtf[j] += q[i][j] * s.f[i];
    }
    s.gamma = testing::solve_dense(r, qtf);
    return s;
}

double dense_next(const DenseSpline& s) {
    const auto n = s.f.size();
    const double slope = s.f[n - 1] - s.f[n - 2] + s.gamma.back() / 6.0;
    return s.f[n - 1] + slope;
}

std::vector<double> random_vector(Rng& rng, std::size_t n) {
    std::vector<double> y(n);
    for (auto& v : y) v = 10.0 * rng.normal();
    return y;
}

TEST(Spline, MatchesDenseOracle) {
    Rng rng(21);
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t n = 4 + rng.below(9);
        const double lambda = 0.1 + 1.9 * rng.uniform();
        const auto y = random_vector(rng, n);
        const auto fit = fit_smoothing_spline(y, lambda);
        const auto ref = dense_spline(y, lambda);
        ASSERT_EQ(fit.fitted_values.size(), n);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fit.fitted_values[i], ref.f[i], 1e-8);
        EXPECT_EQ(fit.second_derivatives.front(), 0.0);
        EXPECT_EQ(fit.second_derivatives.back(), 0.0);
        for (std::size_t i = 0; i + 2 < n; ++i) {
            EXPECT_NEAR(fit.second_derivatives[i + 1], ref.gamma[i], 1e-8);
        }
    }
}

TEST(Spline, ObjectiveMatchesDenseRoughness) {
    Rng rng(22);
    const auto y = random_vector(rng, 9);
    const auto f = random_vector(rng, 9);
    const auto k = roughness(9);
    double pen = 0, rss = 0;
    for (std::size_t i = 0; i < 9; ++i) {
        rss += (y[i] - f[i]) * (y[i] - f[i]);
        for (std::size_t j = 0; j < 9; ++j) pen += f[i] * k[i][j] * f[j];
    }
    EXPECT_NEAR(spline_objective(y, f, 0.7), rss + 0.7 * pen, 1e-9 * (rss + pen));
}

TEST(Spline, FitBeatsRandomCandidates) {
    Rng rng(23);
    for (int inst = 0; inst < 20; ++inst) {
        const auto y = random_vector(rng, 15);
        const auto fit = fit_smoothing_spline(y, 0.8);
        const double best = spline_objective(y, fit.fitted_values, 0.8);
        for (int c = 0; c < 20; ++c) {
            auto f = fit.fitted_values;
            for (auto& v : f) v += 0.1 * rng.normal();
            EXPECT_LE(best, spline_objective(y, f, 0.8));
        }
    }
}

TEST(Spline, LambdaLimits) {
    Rng rng(24);
    const auto y = random_vector(rng, 12);
    const auto stiff = fit_smoothing_spline(y, 1e9);
    Dense x;
    for (std::size_t t = 0; t < 12; ++t) x.push_back({1.0, static_cast<double>(t)});
    const auto line = testing::least_squares_normal(x, y);
    for (std::size_t t = 0; t < 12; ++t) {
        const double ref = line[0] + line[1] * t;
        EXPECT_NEAR(stiff.fitted_values[t], ref, 1e-4 * std::max(1.0, std::abs(ref)));
    }
    const auto loose = fit_smoothing_spline(y, 1e-9);
    for (std::size_t t = 0; t < 12; ++t) EXPECT_NEAR(loose.fitted_values[t], y[t], 1e-6);
}

TEST(Spline, RejectsBadInput) {
    EXPECT_THROW(fit_smoothing_spline(std::vector<double>{1, 2, 3}, 1.0), InputError);
    EXPECT_THROW(fit_smoothing_spline(std::vector<double>{1, 2, 3, 4}, 0.0), InputError);
}

TEST(Spline, SmoothnessDecreasesWithLambda) {
    Rng rng(25);
    const auto y = random_vector(rng, 30);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
        const auto f = fit_smoothing_spline(y, lambda).fitted_values;
        double rough = 0;
        for (std::size_t t = 2; t < f.size(); ++t) {
            const double d2 = f[t] - 2 * f[t - 1] + f[t - 2];
            rough += d2 * d2;
        }
        EXPECT_LE(rough, prev * (1 + 1e-12));
        prev = rough;
    }
}

TEST(OneStep, LineAndConstant) {
    std::vector<double> line(10), flat(10, 4.5);
    for (std::size_t t = 0; t < 10; ++t) line[t] = 3.0 - 0.7 * t;
    for (double lambda : {0.1, 1.0, 2.0}) {
        EXPECT_NEAR(one_step_predict(fit_smoothing_spline(line, lambda)), 3.0 - 0.7 * 10, 1e-9);
        EXPECT_NEAR(one_step_predict(fit_smoothing_spline(flat, lambda)), 4.5, 1e-9);
    }
}

TEST(OneStep, SineSegmentMatchesOracle) {
    std::vector<double> y(8);
    for (std::size_t t = 0; t < 8; ++t) y[t] = std::sin(0.6 * t);
    EXPECT_NEAR(one_step_predict(fit_smoothing_spline(y, 0.5)), dense_next(dense_spline(y, 0.5)),
                1e-9);
}

TEST(WindowWeights, AreTheLinearFunctionals) {
    Rng rng(26);
    const auto w = spline_window_weights(20, 0.37);
    const auto y = random_vector(rng, 20);
    const auto fit = fit_smoothing_spline(y, 0.37);
    double last = 0, next = 0;
    for (std::size_t i = 0; i < 20; ++i) {
        last += w.last_fitted[i] * y[i];
        next += w.one_step[i] * y[i];
    }
    EXPECT_NEAR(last, fit.fitted_values.back(), 1e-9);
    EXPECT_NEAR(next, one_step_predict(fit), 1e-9);
}

TEST(Grid, DefaultGrid) {
    const auto g = default_lambda_grid();
    ASSERT_EQ(g.size(), 20u);
    EXPECT_NEAR(g.front(), 0.1, 1e-15);
    EXPECT_NEAR(g.back(), 2.0, 1e-15);
    for (std::size_t i = 2; i < g.size(); ++i) {
        EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
    }
}

TEST(Grid, Examples) {
    std::vector<double> line(60);
    for (std::size_t t = 0; t < 60; ++t) line[t] = 5.0 + 0.25 * t;
    EXPECT_DOUBLE_EQ(grid_search_lambda(line).lambda_star, 0.1);
    EXPECT_NEAR(grid_search_lambda(line).train_rmse, 0.0, 1e-9);

    const std::vector<double> one{0.7};
    EXPECT_DOUBLE_EQ(grid_search_lambda(line, 20, one).lambda_star, 0.7);
    EXPECT_THROW(grid_search_lambda(std::span<const double>(line.data(), 21)), InputError);

    Rng rng(27);
    int at_max = 0;
    for (int seed = 0; seed < 25; ++seed) {
        std::vector<double> y(150);
        for (auto& v : y) v = 50.0 + rng.normal();
        at_max += grid_search_lambda(y).lambda_star == default_lambda_grid().back();
    }
    EXPECT_GT(at_max, 12);
}

TEST(Grid, DeterministicForGridOrder) {
    Rng rng(28);
    const auto y = random_vector(rng, 80);
    const auto a = grid_search_lambda(y);
    const auto b = grid_search_lambda(y);
    EXPECT_EQ(a.lambda_star, b.lambda_star);
    EXPECT_EQ(a.train_rmse, b.train_rmse);
}

TEST(DenoiseSeries, ConstantAndWarmUp) {
    const std::vector<double> flat(40, 3.0);
    const DenoiseModel m{"k", 1.0, 0.0, true};
    const auto out = denoise_series(flat, m);
    for (double v : out) EXPECT_NEAR(v, 3.0, 1e-12);

    Rng rng(29);
    const auto y = random_vector(rng, 40);
    const auto d = denoise_series(y, m, 20);
    for (std::size_t t = 0; t < 19; ++t) EXPECT_EQ(d[t], y[t]);
    const std::vector<double> window(y.begin() + 10, y.begin() + 30);
    EXPECT_NEAR(d[29], fit_smoothing_spline(window, 1.0).fitted_values.back(), 1e-9);
}

TEST(DenoiseSeries, FutureMutationChangesNothingEarlier) {
    Rng rng(30);
    const DenoiseModel m{"k", 0.5, 0.0, true};
    for (int trial = 0; trial < 50; ++trial) {
        auto y = random_vector(rng, 60);
        const auto base = denoise_series(y, m);
        const auto t = rng.below(59);
        for (std::size_t s = t + 1; s < 60; ++s) y[s] += 100.0 * rng.normal();
        const auto mutated = denoise_series(y, m);
        for (std::size_t s = 0; s <= t; ++s) ASSERT_EQ(base[s], mutated[s]);
    }
}

TEST(Gate, Examples) {
    const auto none = gate_noisy({{"a", 1, 2.0, false}, {"b", 1, 2.0, false}});
    EXPECT_FALSE(none[0].is_noisy || none[1].is_noisy);
    const auto three = gate_noisy({{"a", 1, 1.0, false}, {"b", 1, 2.0, false}, {"c", 1, 3.0, false}});
    EXPECT_FALSE(three[0].is_noisy);
    EXPECT_FALSE(three[1].is_noisy);
    EXPECT_TRUE(three[2].is_noisy);
}

TEST(Gate, FlagsAboutHalf) {
    Rng rng(31);
    for (std::size_t n : {7u, 20u, 101u, 1155u}) {
        std::vector<DenoiseModel> models;
        for (std::size_t i = 0; i < n; ++i) models.push_back({"k", 1, rng.uniform(), false});
        std::size_t flagged = 0;
        for (const auto& m : gate_noisy(models)) flagged += m.is_noisy;
        EXPECT_GE(flagged + 1, n / 2);
        EXPECT_LE(flagged, (n + 1) / 2);
    }
}

TEST(DenoisePanel, SmoothsOnlyNoisySeries) {
    Rng rng(32);
    std::vector<Vector> values;
    for (int k = 0; k < 6; ++k) {
        Vector v(120);
        for (std::size_t t = 0; t < 120; ++t) v[t] = 50 + 10 * std::sin(0.1 * t) + k * rng.normal();
        values.push_back(v);
    }
    const auto panel = testing::make_panel({"k0", "k1", "k2", "k3", "k4", "k5"}, values);
    DenoiseOptions opt;
    opt.train_len = 80;
    const auto r = denoise_panel(panel, opt);
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_GE(r.models[k].lambda_star, 0.1 - 1e-12);
        EXPECT_LE(r.models[k].lambda_star, 2.0 + 1e-12);
        if (!r.models[k].is_noisy) {
            EXPECT_EQ(r.panel.values[k], panel.values[k]);
        }
    }
    EXPECT_TRUE(r.models[5].is_noisy);
    EXPECT_FALSE(r.models[0].is_noisy);
    std::ostringstream out;
    write_denoise_report(out, r.models);
    EXPECT_EQ(out.str().rfind("keyword,lambda_star,train_rmse,is_noisy\n", 0), 0u);
}

TEST(MovingAverage, TrailingMean) {
    const std::vector<double> y{1, 2, 3, 4, 5};
    EXPECT_EQ(moving_average_filter(y, 2), (Vector{1, 1.5, 2.5, 3.5, 4.5}));
}

}  // namespace
}  // namespace trendprep
