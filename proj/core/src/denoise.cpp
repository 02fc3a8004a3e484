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

#include "trendprep/denoise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

namespace trendprep {

namespace {

// Symmetric positive-definite pentadiagonal system held as three bands:
// diag[i] = A(i,i), off1[i] = A(i,i+1), off2[i] = A(i,i+2). Solved in place
// with an LDL' factorization.
class PentadiagonalSolver {
public:
    PentadiagonalSolver(Vector diag, Vector off1, Vector off2)
        : d_(std::move(diag)), e_(std::move(off1)), f_(std::move(off2)) {
        const auto m = d_.size();
        // L has unit diagonal, sub-diagonals l1 (i+1,i) and l2 (i+2,i).
        l1_.assign(m, 0.0);
        l2_.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double di = d_[i];
            if (i >= 1) {
                di -= l1_[i - 1] * l1_[i - 1] * d_[i - 1];
            }
            if (i >= 2) {
                di -= l2_[i - 2] * l2_[i - 2] * d_[i - 2];
            }
            if (!(di > 0.0)) {
                throw NumericalError("smoothing spline system is not positive definite");
            }
            d_[i] = di;
            if (i + 1 < m) {
                double v = e_[i];
                if (i >= 1) {
                    v -= l2_[i - 1] * d_[i - 1] * l1_[i - 1];
                }
                l1_[i] = v / di;
            }
            if (i + 2 < m) {
                l2_[i] = f_[i] / di;
            }
        }
    }

    Vector solve(Vector b) const {
        const auto m = d_.size();
        for (std::size_t i = 0; i < m; ++i) {
            if (i >= 1) {
                b[i] -= l1_[i - 1] * b[i - 1];
            }
            if (i >= 2) {
                b[i] -= l2_[i - 2] * b[i - 2];
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            b[i] /= d_[i];
        }
        for (std::size_t i = m; i-- > 0;) {
            if (i + 1 < m) {
                b[i] -= l1_[i] * b[i + 1];
            }
            if (i + 2 < m) {
                b[i] -= l2_[i] * b[i + 2];
            }
        }
        return b;
    }

private:
    Vector d_, e_, f_;
    Vector l1_, l2_;
};

// Second derivatives of the natural cubic interpolant through f (unit knots):
// R gamma = Q'f with R tridiagonal (2/3, 1/6).
Vector interpolant_second_derivatives(std::span<const double> f) {
    const auto n = f.size();
    Vector gamma(n, 0.0);
    if (n < 3) {
        return gamma;
    }
    const auto m = n - 2;
    Vector rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
        rhs[j] = f[j] - 2.0 * f[j + 1] + f[j + 2];
    }
    PentadiagonalSolver solver(Vector(m, 2.0 / 3.0), Vector(m, 1.0 / 6.0), Vector(m, 0.0));
    const auto g = solver.solve(std::move(rhs));
    std::copy(g.begin(), g.end(), gamma.begin() + 1);
    return gamma;
}

}  // namespace

SplineFit fit_smoothing_spline(std::span<const double> y, double lambda) {
    const auto n = y.size();
    if (n < 4) {
        throw InputError("smoothing spline needs at least 4 observations");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InputError("smoothing parameter must be positive");
    }
    const auto m = n - 2;
    // R + lambda Q'Q for unit spacing.
    Vector diag(m, 2.0 / 3.0 + 6.0 * lambda);
    Vector off1(m, 1.0 / 6.0 - 4.0 * lambda);
    Vector off2(m, lambda);
    PentadiagonalSolver solver(std::move(diag), std::move(off1), std::move(off2));

    Vector qty(m);
    for (std::size_t j = 0; j < m; ++j) {
        qty[j] = y[j] - 2.0 * y[j + 1] + y[j + 2];
    }
    const Vector gamma = solver.solve(std::move(qty));

    SplineFit fit;
    fit.lambda = lambda;
    fit.fitted_values.assign(y.begin(), y.end());
    // f = y - lambda Q gamma
    for (std::size_t j = 0; j < m; ++j) {
        fit.fitted_values[j] -= lambda * gamma[j];
        fit.fitted_values[j + 1] += 2.0 * lambda * gamma[j];
        fit.fitted_values[j + 2] -= lambda * gamma[j];
    }
    fit.second_derivatives.assign(n, 0.0);
    std::copy(gamma.begin(), gamma.end(), fit.second_derivatives.begin() + 1);
    return fit;
}

double spline_objective(std::span<const double> y, std::span<const double> f, double lambda) {
    if (y.size() != f.size()) {
        throw InputError("spline_objective: length mismatch");
    }
    const auto gamma = interpolant_second_derivatives(f);
    double rss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        rss += (y[i] - f[i]) * (y[i] - f[i]);
    }
    // f'' is linear on each unit interval: int = (a^2 + ab + b^2) / 3.
    double penalty = 0.0;
    for (std::size_t i = 0; i + 1 < gamma.size(); ++i) {
        const double a = gamma[i];
        const double b = gamma[i + 1];
        penalty += (a * a + a * b + b * b) / 3.0;
    }
    return rss + lambda * penalty;
}

double one_step_predict(const SplineFit& fit) {
    const auto n = fit.fitted_values.size();
    const double fn = fit.fitted_values[n - 1];
    const double slope =
        (fn - fit.fitted_values[n - 2]) + fit.second_derivatives[n - 2] / 6.0;
    return fn + slope;
}

SplineWindowWeights spline_window_weights(std::size_t window, double lambda) {
    SplineWindowWeights w;
    w.last_fitted.resize(window);
    w.one_step.resize(window);
    Vector basis(window, 0.0);
    for (std::size_t i = 0; i < window; ++i) {
        basis[i] = 1.0;
        const auto fit = fit_smoothing_spline(basis, lambda);
        w.last_fitted[i] = fit.fitted_values.back();
        w.one_step[i] = one_step_predict(fit);
        basis[i] = 0.0;
    }
    return w;
}

std::vector<double> default_lambda_grid() {
    constexpr std::size_t points = 20;
    std::vector<double> grid(points);
    const double lo = std::log(0.1);
    const double hi = std::log(2.0);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (points - 1));
    }
    grid.front() = 0.1;
    grid.back() = 2.0;
    return grid;
}

LambdaSearch grid_search_lambda(std::span<const double> y_train, std::size_t window,
                                std::span<const double> grid) {
    const auto fallback = default_lambda_grid();
    if (grid.empty()) {
        grid = fallback;
    }
    if (window < 4) {
        throw InputError("denoising window must hold at least 4 observations");
    }
    if (y_train.size() < window + 2) {
        throw InputError("training series of length " + std::to_string(y_train.size()) +
                         " is shorter than window + 2 = " + std::to_string(window + 2));
    }
    const auto positions = y_train.size() - window;
    double scale = 0.0;
    for (double v : y_train) {
        scale = std::max(scale, std::abs(v));
    }
    LambdaSearch best{std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::infinity()};
    for (double lambda : grid) {
        const auto w = spline_window_weights(window, lambda);
        double sse = 0.0;
        for (std::size_t s = 0; s < positions; ++s) {
            double pred = 0.0;
            for (std::size_t i = 0; i < window; ++i) {
                pred += w.one_step[i] * y_train[s + i];
            }
            const double e = y_train[s + window] - pred;
            sse += e * e;
        }
        const double rmse = std::sqrt(sse / static_cast<double>(positions));
        const bool first = std::isinf(best.train_rmse);
        const double tol = 1e-9 * std::max(rmse, first ? rmse : best.train_rmse) + 1e-10 * scale;
        if (first || rmse < best.train_rmse - tol) {
            best = {lambda, rmse};
        } else if (std::abs(rmse - best.train_rmse) <= tol && lambda < best.lambda_star) {
            best = {lambda, rmse};
        }
    }
    return best;
}

Vector denoise_series(std::span<const double> y, const DenoiseModel& model, std::size_t window,
                      std::optional<std::size_t> train_len) {
    if (window > y.size()) {
        throw InputError("denoising window longer than the series");
    }
    if (train_len && *train_len >= y.size()) {
        throw InputError("training length must be shorter than the series");
    }
    Vector out(y.begin(), y.end());
    const auto w = spline_window_weights(window, model.lambda_star);
    for (std::size_t t = window - 1; t < y.size(); ++t) {
        const auto start = t + 1 - window;
        double v = 0.0;
        for (std::size_t i = 0; i < window; ++i) {
            v += w.last_fitted[i] * y[start + i];
        }
        out[t] = v;
    }
    return out;
}

std::vector<DenoiseModel> gate_noisy(std::vector<DenoiseModel> models) {
    if (models.empty()) {
        throw InputError("gate_noisy needs at least one model");
    }
    std::vector<double> rmse;
    rmse.reserve(models.size());
    for (const auto& m : models) {
        rmse.push_back(m.train_rmse);
    }
    const double med = median(std::move(rmse));
    for (auto& m : models) {
        m.is_noisy = m.train_rmse > med;
    }
    return models;
}

Vector moving_average_filter(std::span<const double> y, std::size_t window) {
    if (window == 0 || window > y.size()) {
        throw InputError("moving-average window must lie in [1, series length]");
    }
    Vector out(y.begin(), y.end());
    double sum = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        sum += y[t];
        if (t >= window) {
            sum -= y[t - window];
        }
        if (t + 1 >= window) {
            out[t] = sum / static_cast<double>(window);
        }
    }
    return out;
}

DenoiseResult denoise_panel(const SeriesPanel& panel, const DenoiseOptions& options) {
    const auto train_len = options.train_len.value_or(panel.num_weeks());
    if (train_len > panel.num_weeks()) {
        throw InputError("training length exceeds the panel");
    }
    std::vector<DenoiseModel> models;
    for (std::size_t k = 0; k < panel.num_keywords(); ++k) {
        const std::span<const double> train(panel.values[k].data(), train_len);
        const auto search = grid_search_lambda(train, options.window, options.grid);
        models.push_back({panel.keywords[k], search.lambda_star, search.train_rmse, false});
    }
    DenoiseResult result;
    result.models = gate_noisy(std::move(models));
    result.panel = panel;
    for (std::size_t k = 0; k < panel.num_keywords(); ++k) {
        if (result.models[k].is_noisy) {
            result.panel.values[k] = denoise_series(panel.values[k], result.models[k], options.window);
        }
    }
    return result;
}

void write_denoise_report(std::ostream& out, std::span<const DenoiseModel> models) {
    out << "keyword,lambda_star,train_rmse,is_noisy\n";
    for (const auto& m : models) {
        out << csv_field(m.keyword) << ',' << format_double(m.lambda_star) << ','
            << format_double(m.train_rmse) << ',' << (m.is_noisy ? "true" : "false") << '\n';
    }
}

}  // namespace trendprep
