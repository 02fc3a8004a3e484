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

#pragma once

#include "trendprep/ingest.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trendprep {

/// Deterministic terms in the unit-root regression
///   dy_t = mu + a t + b t^2 + gamma y_{t-1} + sum_i phi_i dy_{t-i} + e_t.
enum class AdfVariant { constant, linear, quadratic };

std::string to_string(AdfVariant v);

struct AdfResult {
    AdfVariant variant = AdfVariant::constant;
    double gamma_hat = 0.0;
    double t_stat = 0.0;
    double critical_value = 0.0;  // at the requested alpha
    bool reject = false;          // t_stat < critical_value
    std::size_t lag_order = 0;
    std::size_t nobs = 0;
};

/// Single regression at a fixed number of lagged differences, using
/// observations t = first_obs..n-1 (first_obs >= lags + 1).
AdfResult adf_regression(std::span<const double> y, AdfVariant variant, std::size_t lags,
                         std::optional<std::size_t> first_obs = std::nullopt);

/// Schwert upper bound floor(12 (n/100)^{1/4}).
std::size_t adf_max_lag(std::size_t n);

/// Left-tailed ADF test. Lag order minimizes AIC over 0..adf_max_lag(n) on
/// a common sample, then the chosen model is refit on its full sample.
/// `alpha` must be 0.01, 0.05 or 0.10.
AdfResult adf_test(std::span<const double> y, AdfVariant variant, double alpha = 0.05,
                   std::optional<std::size_t> fixed_lag = std::nullopt);

/// Critical value for `nobs` regression observations. Constant and linear
/// variants use MacKinnon (2010) response surfaces; the quadratic variant
/// uses the simulated table in adf_quadratic_critical_values.csv.
double adf_critical_value(AdfVariant variant, std::size_t nobs, double alpha = 0.05);

/// One row of the simulated quadratic-trend table.
struct AdfTableRow {
    std::size_t sample_size = 0;
    std::size_t nobs = 0;
    double cv01 = 0.0;
    double cv05 = 0.0;
    double cv10 = 0.0;
};

/// Embedded table and the parameters that generated it.
std::span<const AdfTableRow> adf_quadratic_table();
inline constexpr std::uint64_t kAdfTableSeed = 20240127;
inline constexpr std::size_t kAdfTableReplications = 50000;

/// Simulates the quadratic-variant Dickey-Fuller null distribution for one
/// sample size (random walks, no lag augmentation).
AdfTableRow simulate_quadratic_critical_values(std::size_t sample_size,
                                               std::size_t replications,
                                               std::uint64_t seed);

enum class TrendAction { none, linear, quadratic, difference };

std::string to_string(TrendAction a);

struct TrendDecision {
    std::string keyword;
    TrendAction action = TrendAction::none;
    // present iff action is linear or quadratic; beta only for quadratic
    std::optional<double> mu;
    std::optional<double> alpha;
    std::optional<double> beta;
    double t_stat = 0.0;  // statistic of the last test run in the cascade
    double train_r2 = 0.0;
};

/// constant reject -> none, else linear reject -> linear, else quadratic
/// reject -> quadratic, else difference. Trend coefficients are OLS on the
/// training rows with t = 0, 1, ...
TrendDecision classify_trend(std::span<const double> y_train, double alpha = 0.05);

/// Removes the trend from every row using training-only coefficients.
/// `difference` returns n-1 values.
Vector apply_detrend(std::span<const double> y_full, const TrendDecision& decision,
                     std::size_t train_len);

/// 1 - SSE/SST clamped to [0,1].
double trend_r2(std::span<const double> y, std::span<const double> fitted_trend);

/// R^2 of an OLS polynomial trend of `degree` fit to y.
double polynomial_trend_r2(std::span<const double> y, std::size_t degree,
                           std::size_t first_index = 0);

struct TrendReportRow {
    TrendDecision decision;
    double r2_before = 0.0;
    double r2_after = 0.0;
};

struct DetrendResult {
    SeriesPanel panel;
    std::vector<TrendReportRow> rows;
    bool dropped_first_week = false;
};

/// Classifies every series on the first `train_len` rows and transforms the
/// whole history. When any series is differenced the first week is dropped
/// from the whole panel to keep one date grid.
DetrendResult detrend_panel(const SeriesPanel& panel, std::size_t train_len, double alpha = 0.05);

/// `keyword,action,mu,alpha,beta,t_stat,r2_before,r2_after`
void write_trend_report(std::ostream& out, std::span<const TrendReportRow> rows);

/// `sample_size,nobs,cv01,cv05,cv10` with a seed comment line.
void write_adf_table_csv(std::ostream& out, std::span<const AdfTableRow> rows,
                         std::uint64_t seed, std::size_t replications);
std::vector<AdfTableRow> parse_adf_table_csv(std::string_view text);

}  // namespace trendprep
