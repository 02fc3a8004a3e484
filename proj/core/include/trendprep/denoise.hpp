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

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trendprep {

/// Natural cubic smoothing spline on unit-spaced knots 0..n-1.
struct SplineFit {
    Vector fitted_values;
    double lambda = 0.0;
    Vector second_derivatives;  // zero at both ends
};

/// Minimizes sum (y_t - f_t)^2 + lambda * int f''(t)^2 dt over natural cubic
/// splines with a knot at every observation. Reinsch form: the pentadiagonal
/// system (R + lambda Q'Q) gamma = Q'y is factored in O(n).
SplineFit fit_smoothing_spline(std::span<const double> y, double lambda);

/// Penalized objective of an arbitrary natural cubic spline through `f`
/// (its second derivatives follow from interpolation).
double spline_objective(std::span<const double> y, std::span<const double> f, double lambda);

/// The spline's value one step past the last knot; natural splines continue
/// linearly beyond their boundary knots.
double one_step_predict(const SplineFit& fit);

/// Linear functionals of y for a fixed window length and lambda:
/// last fitted value and one-step prediction. Both are computed through the
/// Reinsch solver applied to unit vectors.
struct SplineWindowWeights {
    Vector last_fitted;
    Vector one_step;
};

SplineWindowWeights spline_window_weights(std::size_t window, double lambda);

/// 20 log-spaced values over [0.1, 2].
std::vector<double> default_lambda_grid();

struct LambdaSearch {
    double lambda_star = 0.0;
    double train_rmse = 0.0;
};

/// Rolling one-step-ahead RMSE for every lambda on the grid; the minimizer
/// wins and near-ties (relative 1e-9) go to the smaller lambda.
LambdaSearch grid_search_lambda(std::span<const double> y_train, std::size_t window = 20,
                                std::span<const double> grid = {});

struct DenoiseModel {
    std::string keyword;
    double lambda_star = 0.0;
    double train_rmse = 0.0;
    bool is_noisy = false;
};

/// Causal rolling smoother: output[t] is the last fitted value of a spline
/// on y[t-window+1..t]. The first window-1 values pass through.
Vector denoise_series(std::span<const double> y, const DenoiseModel& model,
                      std::size_t window = 20, std::optional<std::size_t> train_len = std::nullopt);

/// Flags series whose training RMSE is strictly above the median.
std::vector<DenoiseModel> gate_noisy(std::vector<DenoiseModel> models);

/// Trailing moving average with the same warm-up passthrough.
Vector moving_average_filter(std::span<const double> y, std::size_t window = 20);

struct DenoiseOptions {
    std::size_t window = 20;
    std::vector<double> grid = default_lambda_grid();
    std::optional<std::size_t> train_len;
};

struct DenoiseResult {
    SeriesPanel panel;
    std::vector<DenoiseModel> models;
};

/// Per-series lambda search on training rows, median gate, then causal
/// smoothing of the noisy series only.
DenoiseResult denoise_panel(const SeriesPanel& panel, const DenoiseOptions& options = {});

/// `keyword,lambda_star,train_rmse,is_noisy`
void write_denoise_report(std::ostream& out, std::span<const DenoiseModel> models);

}  // namespace trendprep
