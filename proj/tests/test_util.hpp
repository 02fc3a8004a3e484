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
#include "trendprep/numeric.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace trendprep::testing {

/// 32-bit LCG with a sum-of-uniforms noise draw. Kept trivially portable so
/// reference values computed outside C++ reproduce the same inputs.
class Lcg {
public:
    explicit Lcg(std::uint32_t seed) : s_(seed) {}
    double uniform() {
        s_ = 1664525u * s_ + 1013904223u;
        return (static_cast<double>(s_) + 0.5) / 4294967296.0;
    }
    double noise() { return uniform() + uniform() + uniform() + uniform() - 2.0; }

private:
    std::uint32_t s_;
};

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t r, std::size_t c) { return Dense(r, std::vector<double>(c, 0.0)); }

/// Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(Dense a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        }
        if (a[p][k] == 0.0) throw std::runtime_error("singular");
        std::swap(a[p], a[k]);
        std::swap(b[p], b[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

inline Dense inverse_dense(const Dense& a) {
    const std::size_t n = a.size();
    Dense inv = zeros(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        const auto col = solve_dense(a, e);
        for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
    }
    return inv;
}

/// Normal equations for y ~ X with an explicit design.
inline std::vector<double> least_squares_normal(const Dense& x, const std::vector<double>& y) {
    const std::size_t p = x.front().size();
    Dense xtx = zeros(p, p);
    std::vector<double> xty(p, 0.0);
    for (std::size_t r = 0; r < x.size(); ++r) {
        for (std::size_t i = 0; i < p; ++i) {
            xty[i] += x[r][i] * y[r];
            for (std::size_t j = 0; j < p; ++j) xtx[i][j] += x[r][i] * x[r][j];
        }
    }
    return solve_dense(xtx, xty);
}

inline double naive_pearson(const std::vector<double>& a, const std::vector<double>& b,
                            std::size_t n) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline Date sunday(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

/// Panel on consecutive Sundays from 2020-01-05.
inline SeriesPanel make_panel(std::vector<std::string> keywords, std::vector<Vector> values,
                              std::string location = "XX") {
    SeriesPanel p;
    p.location = std::move(location);
    p.keywords = std::move(keywords);
    p.values = std::move(values);
    const std::size_t weeks = p.values.empty() ? 0 : p.values.front().size();
    for (std::size_t t = 0; t < weeks; ++t) {
        p.dates.push_back(sunday(2020, 1, 5) + std::chrono::days{7 * static_cast<int>(t)});
    }
    p.download_date = weeks ? p.dates.back() + std::chrono::days{6} : sunday(2020, 1, 4);
    return p;
}

}  // namespace trendprep::testing
