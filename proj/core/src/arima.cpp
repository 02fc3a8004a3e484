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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace trendprep {

namespace {

// Differenced regression with ARMA(1,1) errors:
//   w_s = c + beta' z_s + u_s,   u_s = phi u_{s-1} + e_s + theta e_{s-1}
// where w and z are lag-d differences of y and x. Parameters are ordered
// (phi, theta, c, beta...).
class DifferencedArma {
public:
    DifferencedArma(std::span<const double> y, const ExogColumns& x, std::size_t lag)
        : lag_(lag) {
        const auto W = y.size();
        for (std::size_t s = lag; s < W; ++s) {
            w_.push_back(y[s] - y[s - lag]);
        }
        for (const auto& col : x) {
            Vector z;
            for (std::size_t s = lag; s < W; ++s) {
                z.push_back(col[s] - col[s - lag]);
            }
            // constant differenced regressors are collinear with c
            if (pearson(z, z)) {
                columns_.push_back(std::move(z));
                used_.push_back(true);
            } else {
                used_.push_back(false);
            }
        }
    }

    std::size_t num_params() const { return 3 + columns_.size(); }
    std::size_t rows() const { return w_.size(); }
    const std::vector<bool>& used() const { return used_; }

    double regression(const Vector& p, std::size_t s) const {
        double v = p[2];
        for (std::size_t k = 0; k < columns_.size(); ++k) {
            v += p[3 + k] * columns_[k][s];
        }
        return v;
    }

    // Residuals e_1..e_{m-1} (e_0 = 0 by conditioning) and their Jacobian.
    double residuals(const Vector& p, Eigen::VectorXd* e_out, Eigen::MatrixXd* jac,
                     double* u_last = nullptr, double* e_last = nullptr) const {
        const auto m = w_.size();
        const auto np = num_params();
        const double phi = p[0];
        const double theta = p[1];
        if (e_out) {
            e_out->resize(static_cast<Eigen::Index>(m - 1));
        }
        if (jac) {
            jac->resize(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(np));
        }
        Vector de_prev(np, 0.0);
        Vector de(np, 0.0);
        double u_prev = w_[0] - regression(p, 0);
        double e_prev = 0.0;
        double css = 0.0;
        for (std::size_t s = 1; s < m; ++s) {
            const double u = w_[s] - regression(p, s);
            const double e = u - phi * u_prev - theta * e_prev;
            if (jac) {
                de[0] = -u_prev - theta * de_prev[0];
                de[1] = -e_prev - theta * de_prev[1];
                de[2] = -1.0 + phi - theta * de_prev[2];
                for (std::size_t k = 0; k < columns_.size(); ++k) {
                    de[3 + k] = -columns_[k][s] + phi * columns_[k][s - 1] - theta * de_prev[3 + k];
                }
                for (std::size_t j = 0; j < np; ++j) {
                    (*jac)(static_cast<Eigen::Index>(s - 1), static_cast<Eigen::Index>(j)) = de[j];
                }
                std::swap(de, de_prev);
            }
            if (e_out) {
                (*e_out)[static_cast<Eigen::Index>(s - 1)] = e;
            }
            css += e * e;
            u_prev = u;
            e_prev = e;
        }
        if (u_last) {
            *u_last = u_prev;
        }
        if (e_last) {
            *e_last = e_prev;
        }
        return css;
    }

    Vector ols_start() const {
        const auto m = w_.size();
        const auto k = 1 + columns_.size();
        Matrix X(m, k);
        for (std::size_t s = 0; s < m; ++s) {
            X(s, 0) = 1.0;
            for (std::size_t j = 0; j < columns_.size(); ++j) {
                X(s, 1 + j) = columns_[j][s];
            }
        }
        Vector p(num_params(), 0.0);
        try {
            const auto fit = ols(X, w_);
            std::copy(fit.coefficients.begin(), fit.coefficients.end(), p.begin() + 2);
        } catch (const NumericalError&) {
            p[2] = mean(w_);
        }
        return p;
    }

private:
    std::size_t lag_;
    Vector w_;
    std::vector<Vector> columns_;
    std::vector<bool> used_;
};

ArimaxFit fit_differenced(std::span<const double> y, const ExogColumns& x, int horizon,
                          std::size_t lag, const ArimaOptions& options) {
    const auto W = y.size();
    if (horizon < 0) {
        throw InputError("horizon must be non-negative");
    }
    if (W < lag + 8) {
        throw InputError("window of " + std::to_string(W) + " weeks too short for lag-" +
                         std::to_string(lag) + " differencing");
    }
    for (const auto& col : x) {
        if (col.size() != W + 1) {
            throw InputError("exog columns must cover the target window plus the current week");
        }
    }
    const DifferencedArma model(y, x, lag);
    if (model.rows() <= model.num_params() + 2) {
        throw InputError("too few differenced observations for the ARIMAX parameters");
    }

    Vector p = model.ols_start();
    ArimaxFit fit;
    Eigen::VectorXd e;
    Eigen::MatrixXd J;
    double css = model.residuals(p, &e, &J);
    const double scale = std::max(1.0, css);
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        fit.iterations = iter + 1;
        if (css <= 1e-24 * scale) {
            fit.converged = true;
            break;
        }
        const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-e);
        if (!step.allFinite()) {
            break;
        }
        double t = 1.0;
        bool improved = false;
        Vector trial(p.size());
        double trial_css = css;
        for (int halving = 0; halving < 30; ++halving) {
            for (std::size_t j = 0; j < p.size(); ++j) {
                trial[j] = p[j] + t * step[static_cast<Eigen::Index>(j)];
            }
            trial[0] = std::clamp(trial[0], -options.bound, options.bound);
            trial[1] = std::clamp(trial[1], -options.bound, options.bound);
            trial_css = model.residuals(trial, nullptr, nullptr);
            if (trial_css <= css) {
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if (!improved) {
            // no descent direction left: stationary point
            fit.converged = true;
            break;
        }
        const double change = css - trial_css;
        p = trial;
        css = model.residuals(p, &e, &J);
        if (change <= options.tolerance * std::max(css, 1e-300) ||
            t * step.norm() <= options.tolerance) {
            fit.converged = true;
            break;
        }
    }
    if (!fit.converged) {
        fit.fallback = true;
        p = model.ols_start();
    }

    double u_last = 0.0;
    double e_last = 0.0;
    fit.css = model.residuals(p, nullptr, nullptr, &u_last, &e_last);
    fit.phi = p[0];
    fit.theta = p[1];
    fit.intercept = p[2];

    // map fitted betas back onto the caller's columns
    Vector beta_full(x.size(), 0.0);
    {
        std::size_t k = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (model.used()[j]) {
                beta_full[j] = p[3 + k++];
            }
        }
    }
    fit.beta = beta_full;

    // Recursion over target weeks W..W+h (relative to the window start).
    const auto H = static_cast<std::size_t>(horizon);
    Vector path(y.begin(), y.end());
    double u_hat = 0.0;
    for (std::size_t j = 0; j <= H; ++j) {
        const auto idx = W + j;
        u_hat = j == 0 ? fit.phi * u_last + fit.theta * e_last : fit.phi * u_hat;
        double reg = fit.intercept;
        for (std::size_t c = 0; c < x.size(); ++c) {
            const double current = x[c][std::min(idx, W)];
            const double lagged = x[c][std::min(idx - lag, W)];
            reg += beta_full[c] * (current - lagged);
        }
        path.push_back(path[idx - lag] + reg + u_hat);
    }
    fit.forecast = path.back();
    return fit;
}

}  // namespace

ArimaxFit fit_arimax(std::span<const double> y_window, const ExogColumns& x_window, int horizon,
                     const ArimaOptions& options) {
    return fit_differenced(y_window, x_window, horizon, 1, options);
}

ArimaxFit fit_sarimax(std::span<const double> y_window, const ExogColumns& x_window, int horizon,
                      std::size_t season, const ArimaOptions& options) {
    if (season < 2) {
        throw InputError("seasonal period must be at least 2");
    }
    return fit_differenced(y_window, x_window, horizon, season, options);
}

}  // namespace trendprep
