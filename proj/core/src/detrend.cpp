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

#include "trendprep/detrend.hpp"

#include "trendprep/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace trendprep {

namespace {

std::size_t deterministic_terms(AdfVariant v) {
    switch (v) {
        case AdfVariant::constant:
            return 1;
        case AdfVariant::linear:
            return 2;
        case AdfVariant::quadratic:
            return 3;
    }
    return 1;
}

int alpha_index(double alpha) {
    if (std::abs(alpha - 0.01) < 1e-12) {
        return 0;
    }
    if (std::abs(alpha - 0.05) < 1e-12) {
        return 1;
    }
    if (std::abs(alpha - 0.10) < 1e-12) {
        return 2;
    }
    throw InputError("ADF critical values exist for alpha in {0.01, 0.05, 0.10} only");
}

// MacKinnon (2010), one I(1) variable: tau = b0 + b1/T + b2/T^2 + b3/T^3.
constexpr double kMacKinnonConstant[3][4] = {
    {-3.43035, -6.5393, -16.786, -79.433},
    {-2.86154, -2.8903, -4.234, -40.040},
    {-2.56677, -1.5384, -2.809, 0.0},
};
constexpr double kMacKinnonLinear[3][4] = {
    {-3.95877, -9.0531, -28.428, -134.155},
    {-3.41049, -4.3904, -9.036, -45.374},
    {-3.12705, -2.5856, -3.925, -22.380},
};

double response_surface(const double (&b)[4], double nobs) {
    return b[0] + b[1] / nobs + b[2] / (nobs * nobs) + b[3] / (nobs * nobs * nobs);
}

// Quadratic in 1/T through the three simulated table points.
double quadratic_from_table(std::size_t nobs, int which) {
    const auto table = adf_quadratic_table();
    double x[3];
    double y[3];
    for (int i = 0; i < 3; ++i) {
        const auto& row = table[static_cast<std::size_t>(i)];
        x[i] = 1.0 / static_cast<double>(row.nobs);
        y[i] = which == 0 ? row.cv01 : which == 1 ? row.cv05 : row.cv10;
    }
    const double u = 1.0 / static_cast<double>(nobs);
    double out = 0.0;
    for (int i = 0; i < 3; ++i) {
        double basis = 1.0;
        for (int j = 0; j < 3; ++j) {
            if (j != i) {
                basis *= (u - x[j]) / (x[i] - x[j]);
            }
        }
        out += y[i] * basis;
    }
    return out;
}

struct AdfDesign {
    Matrix X;
    Vector dy;
};

// Rows t = first..n-1 of [y_{t-1}, 1, (t), (t^2), dy_{t-1}, ..., dy_{t-lags}].
AdfDesign adf_design(std::span<const double> y, std::size_t det, std::size_t lags,
                     std::size_t first) {
    const auto rows = y.size() - first;
    AdfDesign d{Matrix(rows, 1 + det + lags), Vector(rows)};
    for (std::size_t r = 0; r < rows; ++r) {
        const auto t = first + r;
        const double tt = static_cast<double>(t);
        d.dy[r] = y[t] - y[t - 1];
        std::size_t c = 0;
        d.X(r, c++) = y[t - 1];
        d.X(r, c++) = 1.0;
        if (det >= 2) {
            d.X(r, c++) = tt;
        }
        if (det >= 3) {
            d.X(r, c++) = tt * tt;
        }
        for (std::size_t i = 1; i <= lags; ++i) {
            d.X(r, c++) = y[t - i] - y[t - i - 1];
        }
    }
    return d;
}

Vector polynomial_fit_values(std::span<const double> y, std::size_t degree,
                             std::size_t first_index, Vector* coefficients = nullptr) {
    const auto X = polynomial_design(first_index, y.size(), degree);
    const auto fit = ols(X, y);
    Vector fitted(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t d = 0; d <= degree; ++d) {
            fitted[i] += X(i, d) * fit.coefficients[d];
        }
    }
    if (coefficients) {
        *coefficients = fit.coefficients;
    }
    return fitted;
}

}  // namespace

std::string to_string(AdfVariant v) {
    switch (v) {
        case AdfVariant::constant:
            return "constant";
        case AdfVariant::linear:
            return "linear";
        case AdfVariant::quadratic:
            return "quadratic";
    }
    return "?";
}

std::string to_string(TrendAction a) {
    switch (a) {
        case TrendAction::none:
            return "none";
        case TrendAction::linear:
            return "linear";
        case TrendAction::quadratic:
            return "quadratic";
        case TrendAction::difference:
            return "difference";
    }
    return "?";
}

std::size_t adf_max_lag(std::size_t n) {
    return static_cast<std::size_t>(
        std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

double adf_critical_value(AdfVariant variant, std::size_t nobs, double alpha) {
    const int idx = alpha_index(alpha);
    if (nobs < 10) {
        throw InputError("too few observations for ADF critical values");
    }
    const double t = static_cast<double>(nobs);
    switch (variant) {
        case AdfVariant::constant:
            return response_surface(kMacKinnonConstant[idx], t);
        case AdfVariant::linear:
            return response_surface(kMacKinnonLinear[idx], t);
        case AdfVariant::quadratic:
            return quadratic_from_table(nobs, idx);
    }
    return 0.0;
}

AdfResult adf_regression(std::span<const double> y, AdfVariant variant, std::size_t lags,
                         std::optional<std::size_t> first_obs) {
    const auto n = y.size();
    const auto first = first_obs.value_or(lags + 1);
    if (first < lags + 1) {
        throw InputError("first observation leaves no room for the lagged differences");
    }
    const auto det = deterministic_terms(variant);
    const auto k = 1 + det + lags;
    if (first >= n || n - first <= k + 1) {
        throw InputError("series too short for an ADF regression with " + std::to_string(lags) +
                         " lags");
    }
    const auto design = adf_design(y, det, lags, first);
    const auto fit = ols(design.X, design.dy);
    AdfResult res;
    res.variant = variant;
    res.gamma_hat = fit.coefficients[0];
    res.t_stat = fit.coefficients[0] / fit.standard_errors[0];
    res.lag_order = lags;
    res.nobs = design.dy.size();
    return res;
}

AdfResult adf_test(std::span<const double> y, AdfVariant variant, double alpha,
                   std::optional<std::size_t> fixed_lag) {
    const auto n = y.size();
    if (n < 30) {
        throw InputError("ADF test needs at least 30 observations");
    }
    if (!pearson(y, y)) {
        throw InputError("ADF test on a zero-variance series");
    }
    std::size_t lag = 0;
    if (fixed_lag) {
        lag = *fixed_lag;
    } else {
        auto max_lag = adf_max_lag(n);
        const auto det = deterministic_terms(variant);
        // keep at least twice as many observations as regressors
        while (max_lag > 0 && n - max_lag - 1 < 2 * (1 + det + max_lag)) {
            --max_lag;
        }
        double best_aic = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p <= max_lag; ++p) {
            const auto first = max_lag + 1;
            const auto k = 1 + det + p;
            const auto design = adf_design(y, det, p, first);
            const auto fit = ols(design.X, design.dy);
            const double nobs = static_cast<double>(design.dy.size());
            const double aic =
                nobs * std::log(std::max(fit.rss, 1e-300) / nobs) + 2.0 * static_cast<double>(k);
            if (aic < best_aic - 1e-12) {
                best_aic = aic;
                lag = p;
            }
        }
    }
    auto res = adf_regression(y, variant, lag);
    res.critical_value = adf_critical_value(variant, res.nobs, alpha);
    res.reject = res.t_stat < res.critical_value;
    return res;
}

AdfTableRow simulate_quadratic_critical_values(std::size_t sample_size,
                                               std::size_t replications, std::uint64_t seed) {
    if (replications < 100) {
        throw InputError("need at least 100 replications");
    }
    std::vector<double> stats;
    stats.reserve(replications);
    Vector y(sample_size);
    for (std::size_t r = 0; r < replications; ++r) {
        Rng rng(derive_seed(seed, {sample_size, r}));
        double level = 0.0;
        for (auto& v : y) {
            level += rng.normal();
            v = level;
        }
        stats.push_back(adf_regression(y, AdfVariant::quadratic, 0).t_stat);
    }
    AdfTableRow row;
    row.sample_size = sample_size;
    row.nobs = sample_size - 1;
    row.cv01 = quantile(stats, 0.01);
    row.cv05 = quantile(stats, 0.05);
    row.cv10 = quantile(std::move(stats), 0.10);
    return row;
}

double trend_r2(std::span<const double> y, std::span<const double> fitted_trend) {
    if (y.size() != fitted_trend.size()) {
        throw InputError("trend_r2: length mismatch");
    }
    if (!pearson(y, y)) {
        throw InputError("trend_r2: zero-variance series");
    }
    const double m = mean(y);
    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sse += (y[i] - fitted_trend[i]) * (y[i] - fitted_trend[i]);
        sst += (y[i] - m) * (y[i] - m);
    }
    return std::clamp(1.0 - sse / sst, 0.0, 1.0);
}

double polynomial_trend_r2(std::span<const double> y, std::size_t degree,
                           std::size_t first_index) {
    if (!pearson(y, y)) {
        return 0.0;
    }
    return trend_r2(y, polynomial_fit_values(y, degree, first_index));
}

TrendDecision classify_trend(std::span<const double> y_train, double alpha) {
    TrendDecision d;
    const auto constant = adf_test(y_train, AdfVariant::constant, alpha);
    d.t_stat = constant.t_stat;
    if (constant.reject) {
        d.action = TrendAction::none;
    } else {
        const auto linear = adf_test(y_train, AdfVariant::linear, alpha);
        d.t_stat = linear.t_stat;
        if (linear.reject) {
            d.action = TrendAction::linear;
        } else {
            const auto quadratic = adf_test(y_train, AdfVariant::quadratic, alpha);
            d.t_stat = quadratic.t_stat;
            d.action = quadratic.reject ? TrendAction::quadratic : TrendAction::difference;
        }
    }
    const std::size_t degree = d.action == TrendAction::quadratic ? 2 : 1;
    Vector coef;
    const auto fitted = polynomial_fit_values(y_train, degree, 0, &coef);
    d.train_r2 = trend_r2(y_train, fitted);
    if (d.action == TrendAction::linear || d.action == TrendAction::quadratic) {
        d.mu = coef[0];
        d.alpha = coef[1];
        if (degree == 2) {
            d.beta = coef[2];
        }
    }
    return d;
}

Vector apply_detrend(std::span<const double> y_full, const TrendDecision& decision,
                     std::size_t train_len) {
    if (train_len < 10) {
        throw InputError("detrending needs at least 10 training rows");
    }
    if (train_len > y_full.size()) {
        throw InputError("training length exceeds the series");
    }
    switch (decision.action) {
        case TrendAction::none:
            return Vector(y_full.begin(), y_full.end());
        case TrendAction::linear:
        case TrendAction::quadratic: {
            if (!decision.mu || !decision.alpha ||
                (decision.action == TrendAction::quadratic && !decision.beta)) {
                throw InputError("trend decision for '" + decision.keyword +
                                 "' lacks its coefficients");
            }
            const double b = decision.beta.value_or(0.0);
            Vector out(y_full.size());
            for (std::size_t i = 0; i < y_full.size(); ++i) {
                const double t = static_cast<double>(i);
                out[i] = y_full[i] - (*decision.mu + *decision.alpha * t + b * t * t);
            }
            return out;
        }
        case TrendAction::difference: {
            Vector out;
            out.reserve(y_full.size() - 1);
            for (std::size_t i = 1; i < y_full.size(); ++i) {
                out.push_back(y_full[i] - y_full[i - 1]);
            }
            return out;
        }
    }
    return {};
}

DetrendResult detrend_panel(const SeriesPanel& panel, std::size_t train_len, double alpha) {
    if (train_len > panel.num_weeks()) {
        throw InputError("training length exceeds the panel");
    }
    DetrendResult result;
    std::vector<Vector> transformed;
    for (std::size_t k = 0; k < panel.num_keywords(); ++k) {
        const std::span<const double> train(panel.values[k].data(), train_len);
        TrendDecision d;
        try {
            d = classify_trend(train, alpha);
        } catch (const std::exception& e) {
            throw InputError("detrend: keyword '" + panel.keywords[k] + "': " + e.what());
        }
        d.keyword = panel.keywords[k];
        auto out = apply_detrend(panel.values[k], d, train_len);
        const std::size_t degree = d.action == TrendAction::quadratic ? 2 : 1;
        TrendReportRow row;
        row.decision = d;
        row.r2_before = d.train_r2;
        if (d.action == TrendAction::difference) {
            row.r2_after = polynomial_trend_r2(std::span<const double>(out.data(), train_len - 1),
                                               degree, 1);
        } else {
            row.r2_after =
                polynomial_trend_r2(std::span<const double>(out.data(), train_len), degree, 0);
        }
        if (d.action == TrendAction::difference) {
            result.dropped_first_week = true;
        }
        result.rows.push_back(std::move(row));
        transformed.push_back(std::move(out));
    }
    result.panel.location = panel.location;
    result.panel.download_date = panel.download_date;
    result.panel.keywords = panel.keywords;
    const std::size_t skip = result.dropped_first_week ? 1 : 0;
    result.panel.dates.assign(panel.dates.begin() + static_cast<std::ptrdiff_t>(skip),
                              panel.dates.end());
    for (auto& v : transformed) {
        if (v.size() == panel.num_weeks() && skip == 1) {
            v.erase(v.begin());
        }
        result.panel.values.push_back(std::move(v));
    }
    return result;
}

void write_trend_report(std::ostream& out, std::span<const TrendReportRow> rows) {
    out << "keyword,action,mu,alpha,beta,t_stat,r2_before,r2_after\n";
    const auto opt = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    for (const auto& r : rows) {
        const auto& d = r.decision;
        out << csv_field(d.keyword) << ',' << to_string(d.action) << ',' << opt(d.mu) << ','
            << opt(d.alpha) << ',' << opt(d.beta) << ',' << format_double(d.t_stat) << ','
            << format_double(r.r2_before) << ',' << format_double(r.r2_after) << '\n';
    }
}

void write_adf_table_csv(std::ostream& out, std::span<const AdfTableRow> rows,
                         std::uint64_t seed, std::size_t replications) {
    out << "# quadratic-trend Dickey-Fuller critical values; random walks with N(0,1) steps, "
           "no lag augmentation\n";
    out << "# seed=" << seed << " replications=" << replications << '\n';
    out << "sample_size,nobs,cv01,cv05,cv10\n";
    for (const auto& r : rows) {
        out << r.sample_size << ',' << r.nobs << ',' << format_double(r.cv01) << ','
            << format_double(r.cv05) << ',' << format_double(r.cv10) << '\n';
    }
}

std::vector<AdfTableRow> parse_adf_table_csv(std::string_view text) {
    std::vector<AdfTableRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header) {
            header = true;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 5) {
            throw InputError("ADF table row must have 5 fields");
        }
        rows.push_back({static_cast<std::size_t>(parse_double(f[0])),
                        static_cast<std::size_t>(parse_double(f[1])), parse_double(f[2]),
                        parse_double(f[3]), parse_double(f[4])});
    }
    return rows;
}

}  // namespace trendprep
