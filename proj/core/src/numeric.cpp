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

#include "trendprep/numeric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace trendprep {

double mean(std::span<const double> x) {
    if (x.empty()) {
        throw InputError("mean of empty series");
    }
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x, std::size_t ddof) {
    if (x.size() <= ddof) {
        throw InputError("variance needs more observations than ddof");
    }
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m) * (v - m);
    }
    return ss / static_cast<double>(x.size() - ddof);
}

double stddev(std::span<const double> x, std::size_t ddof) {
    return std::sqrt(variance(x, ddof));
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw InputError("pearson: length mismatch");
    }
    if (x.size() < 2) {
        return std::nullopt;
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // Relative guard: round-off in a constant series leaves sxx ~ 1e-30 * n.
    const double scale_x = std::max(1.0, mx * mx) * static_cast<double>(x.size());
    const double scale_y = std::max(1.0, my * my) * static_cast<double>(y.size());
    if (sxx <= 1e-24 * scale_x || syy <= 1e-24 * scale_y) {
        return std::nullopt;
    }
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

double median(std::vector<double> x) {
    return quantile(std::move(x), 0.5);
}

double quantile(std::vector<double> x, double q) {
    if (x.empty()) {
        throw InputError("quantile of empty sample");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw InputError("quantile level must lie in [0,1]");
    }
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return x[lo] + (x[hi] - x[lo]) * frac;
}

OlsFit ols(const Matrix& design, std::span<const double> y) {
    const auto n = design.rows();
    const auto k = design.cols();
    if (y.size() != n) {
        throw InputError("ols: design/response length mismatch");
    }
    if (n < k || k == 0) {
        throw NumericalError("ols: fewer observations than regressors");
    }
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
        design.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    Eigen::Map<const Eigen::VectorXd> Y(y.data(), static_cast<Eigen::Index>(n));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (static_cast<std::size_t>(qr.rank()) < k) {
        throw NumericalError("ols: singular design matrix");
    }
    const Eigen::VectorXd beta = qr.solve(Y);
    const Eigen::VectorXd resid = Y - X * beta;

    OlsFit fit;
    fit.nobs = n;
    fit.rank = k;
    fit.rss = resid.squaredNorm();
    fit.coefficients.assign(beta.data(), beta.data() + k);
    fit.standard_errors.assign(k, std::numeric_limits<double>::quiet_NaN());
    if (n > k) {
        const double sigma2 = fit.rss / static_cast<double>(n - k);
        // (X'X)^{-1} = P R^{-1} R^{-T} P^T
        const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(static_cast<Eigen::Index>(k),
                                                              static_cast<Eigen::Index>(k))
                                      .triangularView<Eigen::Upper>();
        const Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(
            Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
        const Eigen::VectorXd diag_perm = (Rinv * Rinv.transpose()).diagonal();
        const auto& perm = qr.colsPermutation().indices();
        for (std::size_t j = 0; j < k; ++j) {
            fit.standard_errors[static_cast<std::size_t>(perm[static_cast<Eigen::Index>(j)])] =
                std::sqrt(sigma2 * diag_perm[static_cast<Eigen::Index>(j)]);
        }
    }
    return fit;
}

Matrix polynomial_design(std::size_t first, std::size_t rows, std::size_t degree) {
    Matrix X(rows, degree + 1);
    for (std::size_t i = 0; i < rows; ++i) {
        const double t = static_cast<double>(first + i);
        double p = 1.0;
        for (std::size_t d = 0; d <= degree; ++d) {
            X(i, d) = p;
            p *= t;
        }
    }
    return X;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || text.empty()) {
        throw InputError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace trendprep
