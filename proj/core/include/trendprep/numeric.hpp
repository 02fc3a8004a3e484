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

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trendprep {

using Vector = std::vector<double>;

/// Bad input, bad configuration or a violated precondition.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (singular system, no convergence, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix. Deliberately minimal; heavy lifting is done
/// inside the library against Eigen.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double mean(std::span<const double> x);

/// Sample variance with `ddof` degrees of freedom removed.
double variance(std::span<const double> x, std::size_t ddof = 1);
double stddev(std::span<const double> x, std::size_t ddof = 1);

/// Pearson correlation; empty when either input has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Median, midpoint of the middle two for even counts.
double median(std::vector<double> x);

/// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> x, double q);

/// Ordinary least squares y ~ X (no implicit intercept).
struct OlsFit {
    Vector coefficients;
    Vector standard_errors;
    double rss = 0.0;
    std::size_t nobs = 0;
    std::size_t rank = 0;
};

/// Throws NumericalError when X is rank deficient.
OlsFit ols(const Matrix& design, std::span<const double> y);

/// Polynomial trend design [1, t, t^2, ...] over global indices
/// first..first+rows-1.
Matrix polynomial_design(std::size_t first, std::size_t rows, std::size_t degree);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Strict decimal parse; throws InputError on trailing junk.
double parse_double(std::string_view text);

}  // namespace trendprep
