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

#include "trendprep/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trendprep {

namespace {

struct Standardized {
    Matrix X;           // standardized, constant columns zeroed
    Vector means;
    Vector scales;      // 0 marks an excluded column
    double y_mean = 0.0;
    Vector y_centered;
};

Standardized standardize(const Matrix& X, std::span<const double> y,
                         std::span<const std::size_t> rows) {
    const auto n = rows.size();
    const auto p = X.cols();
    Standardized s;
    s.X = Matrix(n, p);
    s.means.assign(p, 0.0);
    s.scales.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (auto r : rows) {
            m += X(r, j);
        }
        m /= static_cast<double>(n);
        double ss = 0.0;
        for (auto r : rows) {
            ss += (X(r, j) - m) * (X(r, j) - m);
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        s.means[j] = m;
        s.scales[j] = sd > 1e-12 * std::max(1.0, std::abs(m)) ? sd : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s.X(i, j) = s.scales[j] > 0.0 ? (X(rows[i], j) - m) / s.scales[j] : 0.0;
        }
    }
    double ym = 0.0;
    for (auto r : rows) {
        ym += y[r];
    }
    s.y_mean = ym / static_cast<double>(n);
    s.y_centered.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.y_centered[i] = y[rows[i]] - s.y_mean;
    }
    return s;
}

// Covariance-update coordinate descent: with G = X'X/n and c = X'y/n the
// partial residual correlation of column j is c_j - (Gb)_j + G_jj b_j, so an
// update costs O(p) and a sweep without changes O(p).
struct Gram {
    Matrix G;
    Vector c;
};

Gram gram(const Matrix& X, std::span<const double> y) {
    const auto n = X.rows();
    const auto p = X.cols();
    Gram g{Matrix(p, p), Vector(p, 0.0)};
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k <= j; ++k) {
            double v = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                v += X(i, j) * X(i, k);
            }
            g.G(j, k) = g.G(k, j) = v * inv_n;
        }
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v += X(i, j) * y[i];
        }
        g.c[j] = v * inv_n;
    }
    return g;
}

// Minimizes (1/2n)||y - Xb||^2 + penalty ||b||_1 from the warm start `b`.
// Sweeps the active set to convergence, then checks every column.
void coordinate_descent(const Gram& g, double penalty, Vector& b, double tolerance) {
    const auto p = g.c.size();
    Vector Gb(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        if (b[k] != 0.0) {
            for (std::size_t j = 0; j < p; ++j) {
                Gb[j] += g.G(j, k) * b[k];
            }
        }
    }
    auto update = [&](std::size_t j) {
        const double gjj = g.G(j, j);
        if (gjj <= 0.0) {
            b[j] = 0.0;
            return 0.0;
        }
        const double rho = g.c[j] - Gb[j] + gjj * b[j];
        const double updated = std::copysign(std::max(std::abs(rho) - penalty, 0.0), rho) / gjj;
        const double delta = updated - b[j];
        if (delta == 0.0) {
            return 0.0;
        }
        for (std::size_t k = 0; k < p; ++k) {
            Gb[k] += g.G(k, j) * delta;
        }
        b[j] = updated;
        return std::abs(delta) * std::sqrt(gjj);
    };
    for (int round = 0; round < 1000; ++round) {
        double full_change = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            full_change = std::max(full_change, update(j));
        }
        if (full_change < tolerance) {
            return;
        }
        std::vector<std::size_t> active;
        for (std::size_t j = 0; j < p; ++j) {
            if (b[j] != 0.0) {
                active.push_back(j);
            }
        }
        for (int sweep = 0; sweep < 100000; ++sweep) {
            double change = 0.0;
            for (auto j : active) {
                change = std::max(change, update(j));
            }
            if (change < tolerance) {
                break;
            }
        }
    }
}

// Largest scaled coefficient step tolerated at convergence, relative to the
// response's standard deviation.
double tolerance_for(std::span<const double> y_centered, double relative) {
    double ss = 0.0;
    for (double v : y_centered) {
        ss += v * v;
    }
    return relative * std::max(std::sqrt(ss / static_cast<double>(y_centered.size())), 1e-300);
}

// glmnet's default: a sweep is converged once G_jj * delta_j^2 < 1e-7 var(y).
constexpr double kArgoTolerance = 3.1622776601683794e-4;
constexpr double kLassoTolerance = 1e-10;

double max_penalty(const Matrix& X, std::span<const double> y) {
    double best = 0.0;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < X.rows(); ++i) {
            dot += X(i, j) * y[i];
        }
        best = std::max(best, std::abs(dot) / static_cast<double>(X.rows()));
    }
    return best;
}

double predict(const Standardized& s, const Vector& b, std::span<const double> x) {
    double v = s.y_mean;
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (s.scales[j] > 0.0) {
            v += b[j] * (x[j] - s.means[j]) / s.scales[j];
        }
    }
    return v;
}

}  // namespace

LassoFit fit_lasso(const Matrix& X, std::span<const double> y, double penalty) {
    if (X.rows() != y.size() || X.rows() < 2) {
        throw InputError("lasso: design/response mismatch");
    }
    if (!(penalty >= 0.0)) {
        throw InputError("lasso penalty must be non-negative");
    }
    std::vector<std::size_t> rows(X.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = i;
    }
    const auto s = standardize(X, y, rows);
    Vector b(X.cols(), 0.0);
    if (std::isfinite(penalty)) {
        coordinate_descent(gram(s.X, s.y_centered), penalty, b, tolerance_for(s.y_centered, kLassoTolerance));
    }
    LassoFit fit;
    fit.coefficients.assign(X.cols(), 0.0);
    fit.intercept = s.y_mean;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        if (s.scales[j] > 0.0) {
            fit.coefficients[j] = b[j] / s.scales[j];
            fit.intercept -= fit.coefficients[j] * s.means[j];
        }
    }
    return fit;
}

ArgoFit fit_argo(std::span<const double> y_history, const ExogColumns& x_history, int horizon,
                 const ArgoOptions& options) {
    if (horizon < 0) {
        throw InputError("horizon must be non-negative");
    }
    const auto t = y_history.size();  // origin week
    const auto h = static_cast<std::size_t>(horizon);
    const auto L = options.lags;
    const auto R = options.train_rows;
    if (t < R + L + h) {
        throw InputError("ARGO needs " + std::to_string(R + L + h) + " weeks of target history, got " +
                         std::to_string(t));
    }
    for (const auto& col : x_history) {
        if (col.size() != t + 1) {
            throw InputError("exog columns must cover the target history plus the current week");
        }
    }
    if (options.folds < 2 || options.folds > R) {
        throw InputError("ARGO fold count must lie in [2, train_rows]");
    }

    // origins s = t-h-R .. t-h-1, response y_{s+h}
    const auto p = L + x_history.size();
    Matrix X(R, p);
    Vector y(R);
    const auto first = t - h - R;
    for (std::size_t r = 0; r < R; ++r) {
        const auto s = first + r;
        y[r] = y_history[s + h];
        for (std::size_t l = 1; l <= L; ++l) {
            X(r, l - 1) = y_history[s - l];
        }
        for (std::size_t c = 0; c < x_history.size(); ++c) {
            X(r, L + c) = x_history[c][s];
        }
    }
    if (!pearson(y, y)) {
        throw NumericalError("ARGO training window has a constant target");
    }
    Vector x_new(p);
    for (std::size_t l = 1; l <= L; ++l) {
        x_new[l - 1] = y_history[t - l];
    }
    for (std::size_t c = 0; c < x_history.size(); ++c) {
        x_new[L + c] = x_history[c][t];
    }

    std::vector<std::size_t> all_rows(R);
    for (std::size_t i = 0; i < R; ++i) {
        all_rows[i] = i;
    }
    const auto full = standardize(X, y, all_rows);
    const auto full_gram = gram(full.X, full.y_centered);
    const double tol = tolerance_for(full.y_centered, kArgoTolerance);

    double penalty = 0.0;
    Vector b(p, 0.0);
    if (options.penalty) {
        penalty = *options.penalty;
        if (std::isfinite(penalty)) {
            coordinate_descent(full_gram, penalty, b, tol);
        }
    } else {
        const double top = max_penalty(full.X, full.y_centered);
        std::vector<double> path(options.path_length);
        for (std::size_t k = 0; k < path.size(); ++k) {
            const double frac = path.size() == 1 ? 0.0
                                                 : static_cast<double>(k) /
                                                       static_cast<double>(path.size() - 1);
            path[k] = top * std::pow(options.path_ratio, frac);
        }
        std::vector<double> cv_error(path.size(), 0.0);
        for (std::size_t f = 0; f < options.folds; ++f) {
            const auto lo = f * R / options.folds;
            const auto hi = (f + 1) * R / options.folds;
            std::vector<std::size_t> train;
            for (std::size_t i = 0; i < R; ++i) {
                if (i < lo || i >= hi) {
                    train.push_back(i);
                }
            }
            const auto s = standardize(X, y, train);
            const auto g = gram(s.X, s.y_centered);
            Vector bf(p, 0.0);
            for (std::size_t k = 0; k < path.size(); ++k) {
                coordinate_descent(g, path[k], bf, tol);
                for (std::size_t i = lo; i < hi; ++i) {
                    const double e = y[i] - predict(s, bf, X.row(i));
                    cv_error[k] += e * e;
                }
            }
        }
        std::size_t best = 0;
        for (std::size_t k = 1; k < path.size(); ++k) {
            if (cv_error[k] < cv_error[best] * (1.0 - 1e-12)) {
                best = k;
            }
        }
        penalty = path[best];
        // warm-start down the path to the chosen penalty
        for (std::size_t k = 0; k <= best; ++k) {
            coordinate_descent(full_gram, path[k], b, tol);
        }
    }

    ArgoFit fit;
    fit.penalty = penalty;
    fit.forecast = predict(full, b, x_new);
    fit.coefficients.assign(p, 0.0);
    fit.intercept = full.y_mean;
    for (std::size_t j = 0; j < p; ++j) {
        if (full.scales[j] > 0.0) {
            fit.coefficients[j] = b[j] / full.scales[j];
            fit.intercept -= fit.coefficients[j] * full.means[j];
        }
    }
    return fit;
}

}  // namespace trendprep
