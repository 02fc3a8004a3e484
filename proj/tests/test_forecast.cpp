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

#include "trendprep/forecast.hpp"
#include "trendprep/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace trendprep {
namespace {

using testing::Lcg;

// ARMA(1,1) errors around a drift plus an I(1) regressor. The reference
// values below come from an independent scipy least_squares minimization of
// the same conditional sum of squares (e_0 = 0, residuals from the second
// differenced row on).
struct ArimaxCase {
    Vector y;  // 104 target weeks
    Vector x;  // 105 exog weeks
};

ArimaxCase arimax_case() {
    const std::size_t W = 104;
    Lcg g(42);
    Vector e(W + 1), dx(W + 1);
    for (auto& v : e) v = g.noise();
    for (auto& v : dx) v = g.noise();
    Vector u(W + 1, 0.0), x(W + 1), y(W + 1);
    double sx = 0, sy = 0;
    for (std::size_t s = 0; s <= W; ++s) {
        if (s > 0) u[s] = 0.5 * u[s - 1] + e[s] + 0.3 * e[s - 1];
        x[s] = (sx += dx[s]);
        y[s] = (sy += 0.1 + 0.8 * dx[s] + u[s]);
    }
    y.pop_back();
    return {y, x};
}

TEST(Arimax, MatchesIndependentCssMinimizer) {
    const auto c = arimax_case();
    const ExogColumns x{c.x};
    const double expected[] = {32.55052522207243, 32.90983399675302, 33.237113571426605};
    for (int h = 0; h < 3; ++h) {
        const auto fit = fit_arimax(c.y, x, h);
        EXPECT_TRUE(fit.converged);
        EXPECT_FALSE(fit.fallback);
        // the objective is flat near the optimum: css agrees to 1e-8 while
        // parameters move in the sixth digit
        EXPECT_NEAR(fit.phi, 0.384960836287943, 1e-5);
        EXPECT_NEAR(fit.theta, 0.25312044554655877, 1e-5);
        EXPECT_NEAR(fit.intercept, 0.3072320909557713, 1e-5);
        ASSERT_EQ(fit.beta.size(), 1u);
        EXPECT_NEAR(fit.beta[0], 0.9356434175267697, 1e-5);
        EXPECT_NEAR(fit.css, 28.11560786105591, 1e-8);
        EXPECT_NEAR(fit.forecast, expected[h], 1e-5);
    }
}

TEST(Arimax, LineContinuesExactly) {
    Vector y(104);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = 3.0 + 0.75 * t;
    for (int h = 0; h <= 3; ++h) {
        EXPECT_NEAR(fit_arimax(y, {}, h).forecast, 3.0 + 0.75 * (104 + h), 1e-6);
    }
}

TEST(Arimax, ConstantSeries) {
    const Vector y(104, 7.0);
    const Vector x(105, 1.5);
    for (int h = 0; h <= 3; ++h) {
        EXPECT_NEAR(fit_arimax(y, {x}, h).forecast, 7.0, 1e-9);
        EXPECT_NEAR(fit_sarimax(y, {x}, h).forecast, 7.0, 1e-9);
    }
}

TEST(Arimax, RandomWalkForecastIsNearlyTheLastValue) {
    Rng rng(61);
    double bias = 0, spread = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        Vector y(104);
        double s = 0;
        for (auto& v : y) v = (s += rng.normal());
        const double err = fit_arimax(y, {}, 0).forecast - y.back();
        bias += err;
        spread += err * err;
    }
    EXPECT_LT(std::abs(bias / reps), 0.1);
    EXPECT_LT(std::sqrt(spread / reps), 0.5);
}

TEST(Arimax, InformativeExogBeatsNoExog) {
    Rng rng(62);
    const std::size_t n = 200;
    Vector y(n), dy(n);
    double s = 0;
    for (std::size_t t = 0; t < n; ++t) y[t] = (s += (dy[t] = rng.normal()));
    // exog at week t carries the change of week t, which the target reveals a week later
    Vector x(n);
    double sx = 0;
    for (std::size_t t = 0; t < n; ++t) x[t] = (sx += dy[t]);
    double with = 0, without = 0;
    for (std::size_t t = 120; t < n; ++t) {
        const std::span<const double> yw(y.data() + t - 104, 104);
        const std::span<const double> xw(x.data() + t - 104, 105);
        with += std::pow(fit_arimax(yw, {xw}, 0).forecast - y[t], 2);
        without += std::pow(fit_arimax(yw, {}, 0).forecast - y[t], 2);
    }
    EXPECT_LT(with, 0.1 * without);
}

TEST(Sarimax, PeriodicExtension) {
    Rng rng(63);
    Vector season(52);
    for (auto& v : season) v = 10.0 + rng.normal();
    Vector y(156);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = season[t % 52];
    for (int h = 0; h <= 3; ++h) {
        EXPECT_NEAR(fit_sarimax(y, {}, h).forecast, season[(156 + h) % 52], 1e-6);
    }
}

TEST(Arimax, RejectsShortWindows) {
    EXPECT_THROW(fit_arimax(Vector(5, 1.0), {}, 0), InputError);
    EXPECT_THROW(fit_sarimax(Vector(54, 1.0), {}, 0), InputError);
}

TEST(Lasso, SatisfiesKkt) {
    Rng rng(64);
    const std::size_t n = 80, p = 12;
    Matrix X(n, p);
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) X(i, j) = rng.normal() * (1 + j);
        y[i] = 2.0 + 1.5 * X(i, 0) - 0.3 * X(i, 3) + rng.normal();
    }
    // standardized scale (population sd) for the KKT check
    Vector mean(p, 0), sd(p, 0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) mean[j] += X(i, j) / n;
        for (std::size_t i = 0; i < n; ++i) sd[j] += std::pow(X(i, j) - mean[j], 2) / n;
        sd[j] = std::sqrt(sd[j]);
    }
    for (double penalty : {0.01, 0.1, 0.5}) {
        const auto fit = fit_lasso(X, y, penalty);
        Vector r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = y[i] - fit.intercept;
            for (std::size_t j = 0; j < p; ++j) r[i] -= fit.coefficients[j] * X(i, j);
        }
        double rsum = 0;
        for (double v : r) rsum += v;
        EXPECT_NEAR(rsum / n, 0.0, 1e-9);
        for (std::size_t j = 0; j < p; ++j) {
            double g = 0;
            for (std::size_t i = 0; i < n; ++i) g += (X(i, j) - mean[j]) / sd[j] * r[i];
            g /= n;
            if (fit.coefficients[j] != 0.0) {
                EXPECT_NEAR(g, penalty * (fit.coefficients[j] > 0 ? 1 : -1), 1e-6);
            } else {
                EXPECT_LE(std::abs(g), penalty + 1e-6);
            }
        }
    }
    const auto zero = fit_lasso(X, y, 0.0);
    testing::Dense xd;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row{1.0};
        for (std::size_t j = 0; j < p; ++j) row.push_back(X(i, j));
        xd.push_back(row);
    }
    const auto ols_ref = testing::least_squares_normal(xd, y);
    for (std::size_t j = 0; j < p; ++j) EXPECT_NEAR(zero.coefficients[j], ols_ref[j + 1], 1e-6);
}

TEST(Argo, InfinitePenaltyGivesTrainingMean) {
    Rng rng(65);
    Vector y(200);
    for (auto& v : y) v = 5 + rng.normal();
    ArgoOptions opt;
    opt.penalty = 1e12;
    for (int h = 0; h <= 2; ++h) {
        const auto fit = fit_argo(y, {}, h, opt);
        double m = 0;
        for (std::size_t t = 200 - 104; t < 200; ++t) m += y[t];
        EXPECT_NEAR(fit.forecast, m / 104, 1e-12);
        for (double c : fit.coefficients) EXPECT_EQ(c, 0.0);
    }
}

TEST(Argo, SeasonalLagDominates) {
    Rng rng(66);
    Vector y(400);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = (t >= 52 ? 0.9 * y[t - 52] : 10.0 * std::sin(t * 0.12)) + 0.3 * rng.normal();
    }
    const auto fit = fit_argo(y, {}, 0);
    ASSERT_EQ(fit.coefficients.size(), 52u);
    EXPECT_GT(fit.coefficients[51], 0.6);
    EXPECT_LT(fit.coefficients[51], 1.1);
    for (std::size_t l = 0; l < 51; ++l) EXPECT_LT(std::abs(fit.coefficients[l]), 0.2);
}

TEST(Argo, PerfectExogColumn) {
    Rng rng(67);
    const std::size_t n = 260;
    for (int h = 0; h <= 1; ++h) {
        Vector y(n + 5), x(n + 5, 0.0);
        for (auto& v : y) v = rng.normal();
        for (std::size_t s = 0; s + h < y.size(); ++s) x[s] = y[s + h];
        const std::size_t t = n;
        const auto fit = fit_argo(std::span<const double>(y.data(), t),
                                  {std::span<const double>(x.data(), t + 1)}, h);
        EXPECT_NEAR(fit.coefficients.back(), 1.0, 0.05);
        EXPECT_NEAR(fit.forecast, y[t + h], 0.1);
    }
}

TEST(Argo, WithinBandOfOlsAutoregression) {
    Rng rng(68);
    std::vector<double> ratio;
    for (int rep = 0; rep < 5; ++rep) {
        Vector y(420);
        for (std::size_t t = 0; t < y.size(); ++t) {
            y[t] = (t >= 1 ? 0.5 * y[t - 1] : 0) + (t >= 52 ? 0.3 * y[t - 52] : 0) + rng.normal();
        }
        double argo = 0, ar = 0;
        for (std::size_t t = 380; t < 420; t += 2) {
            const std::span<const double> hist(y.data(), t);
            argo += std::pow(fit_argo(hist, {}, 0).forecast - y[t], 2);
            testing::Dense xd;
            std::vector<double> resp;
            for (std::size_t s = t - 104; s < t; ++s) {
                std::vector<double> row{1.0};
                for (std::size_t l = 1; l <= 52; ++l) row.push_back(y[s - l]);
                xd.push_back(row);
                resp.push_back(y[s]);
            }
            const auto b = testing::least_squares_normal(xd, resp);
            double f = b[0];
            for (std::size_t l = 1; l <= 52; ++l) f += b[l] * y[t - l];
            ar += std::pow(f - y[t], 2);
        }
        ratio.push_back(argo / ar);
    }
    EXPECT_LT(median(ratio), 1.5);
}

TEST(Argo, RejectsDegenerateWindow) {
    const Vector y(200, 3.0);
    EXPECT_THROW(fit_argo(y, {}, 0), NumericalError);
    EXPECT_THROW(fit_argo(Vector(100, 1.0), {}, 0), InputError);
}

BacktestData backtest_data(std::uint64_t seed, std::size_t n = 200) {
    Rng rng(seed);
    BacktestData d;
    d.location = "L1";
    Vector x(n), y(n);
    double level = 10;
    for (std::size_t t = 0; t < n; ++t) {
        level = 0.8 * level + 2.0 + rng.normal();
        x[t] = level + 0.3 * rng.normal();
        y[t] = 2.0 * level + 0.5 * rng.normal();
        d.dates.push_back(testing::sunday(2018, 1, 7) + std::chrono::days{7 * static_cast<int>(t)});
    }
    d.target = y;
    d.variants.push_back({"raw", {"x"}, {x}});
    return d;
}

ModelRegistry all_models() {
    ModelRegistry m;
    for (const char* id : {"arimax", "sarimax", "argo", "persistence"}) m[id] = make_builtin_model(id);
    return m;
}

TEST(Backtest, SingleWeekGivesSingleRow) {
    const auto data = backtest_data(71);
    const std::vector<ForecastTask> tasks{{"L1", 0, 104, "raw", "arimax"}};
    const auto traces = run_backtest(data, tasks, all_models(), 180, 181);
    ASSERT_EQ(traces.size(), 1u);
    ASSERT_EQ(traces[0].y_hat.size(), 1u);
    EXPECT_EQ(traces[0].dates[0], data.dates[180]);
    EXPECT_EQ(traces[0].y_true[0], data.target[180]);
}

TEST(Backtest, PersistencePluginMatchesOracle) {
    const auto data = backtest_data(72);
    ModelRegistry models = all_models();
    models["lastvalue"] = std::make_shared<SubprocessModel>(
        "lastvalue", "awk -F, 'NR > 2 && $2 != \"\" { v = $2 } END { print v }'");
    std::vector<ForecastTask> tasks;
    for (int h = 0; h <= 2; ++h) tasks.push_back({"L1", h, 104, "raw", "lastvalue"});
    const auto traces = run_backtest(data, tasks, models, 170, 180);
    for (const auto& tr : traces) {
        for (std::size_t i = 0; i < tr.y_hat.size(); ++i) {
            const std::size_t d = 170 + i;
            EXPECT_EQ(tr.flags[i], "");
            // origin t = d - h sees the target through t - 1
            EXPECT_EQ(tr.y_hat[i], parse_double(format_double(data.target[d - tr.horizon - 1])));
        }
    }
}

TEST(Backtest, PluginDesignLayout) {
    const auto data = backtest_data(73, 10);
    ForecastOrigin o;
    o.target = std::span<const double>(data.target.data(), 3);
    o.exog = {std::span<const double>(data.variants[0].columns[0].data(), 4)};
    o.dates = std::span<const Date>(data.dates.data(), 4);
    o.exog_names = {"x"};
    o.horizon = 1;
    o.train_window = 2;
    const SubprocessModel rolling("p", "cat");
    const auto text = rolling.design_csv(o);
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0], "horizon,1");
    EXPECT_EQ(lines[1], "date,target,x");
    EXPECT_EQ(lines[2].substr(0, 10), format_date(data.dates[1]));
    EXPECT_EQ(lines[4], format_date(data.dates[3]) + ",," + format_double(data.variants[0].columns[0][3]));
    const SubprocessModel expanding("p", "cat", true);
    const auto full = expanding.design_csv(o);
    EXPECT_EQ(std::count(full.begin(), full.end(), '\n'), 6);
}

TEST(Backtest, FailuresAreRecordedAndTheRunContinues) {
    const auto data = backtest_data(74);
    ModelRegistry models = all_models();
    models["broken"] = std::make_shared<SubprocessModel>("broken", "echo nope");
    const std::vector<ForecastTask> tasks{{"L1", 0, 104, "raw", "broken"},
                                          {"L1", 0, 104, "raw", "persistence"}};
    const auto traces = run_backtest(data, tasks, models, 190, 193);
    ASSERT_EQ(traces.size(), 2u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_TRUE(std::isnan(traces[0].y_hat[i]));
        EXPECT_EQ(traces[0].flags[i].rfind("error: ", 0), 0u);
        EXPECT_FALSE(std::isnan(traces[1].y_hat[i]));
    }
}

TEST(Backtest, ValidatesPreconditions) {
    const auto data = backtest_data(75);
    const std::vector<ForecastTask> early{{"L1", 0, 104, "raw", "argo"}};
    EXPECT_THROW(run_backtest(data, early, all_models(), 120, 130), InputError);
    const std::vector<ForecastTask> unknown{{"L1", 0, 104, "raw", "nope"}};
    EXPECT_THROW(run_backtest(data, unknown, all_models(), 180, 181), InputError);
    const std::vector<ForecastTask> short_window{{"L1", 0, 40, "raw", "arimax"}};
    EXPECT_THROW(run_backtest(data, short_window, all_models(), 180, 181), InputError);
}

TEST(Backtest, ThreadCountDoesNotChangeTraces) {
    const auto data = backtest_data(76);
    std::vector<ForecastTask> tasks;
    for (const char* m : {"arimax", "argo", "persistence"}) {
        for (int h = 0; h <= 1; ++h) {
            tasks.push_back({"L1", h, 104, "raw", m});
            tasks.push_back({"L1", h, 104, kNoExog, m});
        }
    }
    const auto one = run_backtest(data, tasks, all_models(), 185, 195, 1);
    const auto four = run_backtest(data, tasks, all_models(), 185, 195, 4);
    ASSERT_EQ(one.size(), four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].model_id, tasks[i].model_id);
        for (std::size_t j = 0; j < one[i].y_hat.size(); ++j) EXPECT_EQ(one[i].y_hat[j], four[i].y_hat[j]);
    }
}

TEST(Backtest, FutureRowsDoNotLeakIntoForecasts) {
    const auto data = backtest_data(77);
    Rng rng(78);
    for (const char* m : {"arimax", "sarimax", "argo", "persistence"}) {
        for (int trial = 0; trial < 4; ++trial) {
            const int h = static_cast<int>(rng.below(4));
            const std::size_t d = 175 + rng.below(20);
            const std::size_t t = d - h;
            const std::vector<ForecastTask> tasks{{"L1", h, 104, "raw", m}};
            const auto base = run_backtest(data, tasks, all_models(), d, d + 1);
            auto mutated = data;
            for (std::size_t s = t; s < mutated.target.size(); ++s) mutated.target[s] = 0.0;
            for (std::size_t s = t + 1; s < mutated.target.size(); ++s) {
                mutated.variants[0].columns[0][s] = 0.0;
            }
            const auto after = run_backtest(mutated, tasks, all_models(), d, d + 1);
            EXPECT_EQ(base[0].y_hat[0], after[0].y_hat[0]) << m << " h=" << h;
        }
    }
}

TEST(Backtest, TraceCsvRoundTrip) {
    const auto data = backtest_data(79);
    ModelRegistry models = all_models();
    models["broken"] = std::make_shared<SubprocessModel>("broken", "false");
    const std::vector<ForecastTask> tasks{{"L1", 1, 104, "raw", "arimax"},
                                          {"L1", 1, 104, "raw", "broken"}};
    for (const auto& tr : run_backtest(data, tasks, models, 190, 194)) {
        std::ostringstream out;
        write_trace_csv(out, tr);
        EXPECT_EQ(out.str().rfind("date,y_true,y_hat,flags\n", 0), 0u);
        const auto back = parse_trace_csv(out.str());
        ASSERT_EQ(back.dates, tr.dates);
        EXPECT_EQ(back.y_true, tr.y_true);
        for (std::size_t i = 0; i < tr.y_hat.size(); ++i) {
            if (std::isnan(tr.y_hat[i])) {
                EXPECT_TRUE(std::isnan(back.y_hat[i]));
            } else {
                EXPECT_EQ(back.y_hat[i], tr.y_hat[i]);
            }
        }
        EXPECT_EQ(back.flags, tr.flags);
    }
}

}  // namespace
}  // namespace trendprep
