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

#include "trendprep/evalstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

#include "json.hpp"

namespace trendprep {

double mse(std::span<const double> y_true, std::span<const double> y_hat) {
    if (y_true.size() != y_hat.size()) {
        throw InputError("mse: length mismatch (" + std::to_string(y_true.size()) + " vs " +
                         std::to_string(y_hat.size()) + ")");
    }
    if (y_true.empty()) {
        throw InputError("mse: empty input");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double e = y_true[i] - y_hat[i];
        s += e * e;
    }
    return s / static_cast<double>(y_true.size());
}

double relative_efficiency(double mse_model, double mse_baseline) {
    if (!(mse_baseline > 0.0)) {
        throw InputError("relative efficiency needs a positive baseline MSE");
    }
    return mse_model / mse_baseline;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> d, WilcoxonMethod method) {
    std::vector<double> nz;
    for (double v : d) {
        if (!std::isfinite(v)) {
            throw InputError("wilcoxon: non-finite difference");
        }
        if (v != 0.0) {
            nz.push_back(v);
        }
    }
    if (nz.empty()) {
        throw InputError("wilcoxon: all differences are zero");
    }
    const auto n = nz.size();
    if (n < 5) {
        throw InputError("wilcoxon: needs at least 5 nonzero differences, got " +
                         std::to_string(n));
    }

    // Doubled mid-ranks of |d| are integers.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(nz[a]) < std::abs(nz[b]); });
    std::vector<std::size_t> rank2(n);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(nz[order[j + 1]]) == std::abs(nz[order[i]])) {
            ++j;
        }
        const auto t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k <= j; ++k) {
            rank2[order[k]] = i + j + 2;
        }
        i = j + 1;
    }
    std::size_t w2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (nz[i] > 0) {
            w2 += rank2[i];
        }
    }

    WilcoxonResult r;
    r.n = n;
    r.statistic = static_cast<double>(w2) / 2.0;
    const bool exact = method == WilcoxonMethod::exact ||
                       (method == WilcoxonMethod::automatic && n <= kWilcoxonExactMax);
    r.exact = exact;
    if (exact) {
        if (n > 62) {
            throw InputError("wilcoxon: exact null limited to 62 differences");
        }
        // counts[s] = number of sign vectors with doubled statistic s.
        const std::size_t total = std::accumulate(rank2.begin(), rank2.end(), std::size_t{0});
        std::vector<double> counts(total + 1, 0.0);
        counts[0] = 1.0;
        std::size_t reach = 0;
        for (auto rk : rank2) {
            reach += rk;
            for (std::size_t s = reach; s >= rk; --s) {
                counts[s] += counts[s - rk];
                if (s == rk) {
                    break;
                }
            }
        }
        double below = 0.0;
        for (std::size_t s = 0; s <= w2; ++s) {
            below += counts[s];
        }
        r.p_value = std::ldexp(below, -static_cast<int>(n));
    } else {
        const auto nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
        const double z = (r.statistic - mean + 0.5) / std::sqrt(var);
        r.p_value = std::min(1.0, normal_cdf(z));
    }
    return r;
}

std::vector<std::optional<double>> snr_log_ratio(std::span<const Vector> raw_replicates,
                                                 std::span<const Vector> denoised_replicates,
                                                 double eps) {
    if (raw_replicates.size() < 3 || denoised_replicates.size() < 3) {
        throw InputError("SNR ratio needs at least 3 replicates");
    }
    const auto T = raw_replicates.front().size();
    for (const auto* set : {&raw_replicates, &denoised_replicates}) {
        for (const auto& r : *set) {
            if (r.size() != T) {
                throw InputError("SNR ratio: replicates differ in length");
            }
        }
    }
    auto snr = [&](std::span<const Vector> reps, std::size_t t) -> std::optional<double> {
        Vector x;
        x.reserve(reps.size());
        for (const auto& r : reps) {
            x.push_back(r[t]);
        }
        const double m = mean(x);
        const double s = stddev(x, 1);
        if (s < eps || m <= 0.0) {
            return std::nullopt;
        }
        return m / s;
    };
    std::vector<std::optional<double>> out(T);
    for (std::size_t t = 0; t < T; ++t) {
        const auto a = snr(raw_replicates, t);
        const auto b = snr(denoised_replicates, t);
        if (a && b) {
            out[t] = std::log(*b / *a);
        }
    }
    return out;
}

std::vector<std::vector<std::optional<double>>> snr_log_ratio(const ReplicateStore& raw,
                                                              const ReplicateStore& denoised,
                                                              double eps) {
    if (raw.panels.size() < 3 || denoised.panels.size() < 3) {
        throw InputError("SNR ratio needs at least 3 replicates");
    }
    const auto& ref = raw.panels.front();
    for (const auto* store : {&raw, &denoised}) {
        for (const auto& p : store->panels) {
            if (p.dates != ref.dates || p.keywords != ref.keywords) {
                throw InputError("SNR ratio: stores do not share dates and keywords");
            }
        }
    }
    std::vector<std::vector<std::optional<double>>> out;
    for (std::size_t k = 0; k < ref.num_keywords(); ++k) {
        std::vector<Vector> a, b;
        for (const auto& p : raw.panels) {
            a.push_back(p.values[k]);
        }
        for (const auto& p : denoised.panels) {
            b.push_back(p.values[k]);
        }
        out.push_back(snr_log_ratio(a, b, eps));
    }
    return out;
}

double bartlett_long_run_variance(std::span<const double> x, std::size_t truncation) {
    if (x.empty()) {
        throw InputError("long-run variance of an empty series");
    }
    const double m = mean(x);
    const auto n = x.size();
    auto autocov = [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t t = k; t < n; ++t) {
            s += (x[t] - m) * (x[t - k] - m);
        }
        return s / static_cast<double>(n);
    };
    double v = autocov(0);
    for (std::size_t k = 1; k <= truncation && k < n; ++k) {
        const double w = 1.0 - static_cast<double>(k) / static_cast<double>(truncation + 1);
        v += 2.0 * w * autocov(k);
    }
    return v;
}

Vector fluctuation_statistic(std::span<const double> loss_a, std::span<const double> loss_b,
                             std::size_t window, double eps) {
    if (loss_a.size() != loss_b.size()) {
        throw InputError("fluctuation statistic: loss series differ in length");
    }
    if (window < 2 || window > loss_a.size()) {
        throw InputError("fluctuation window of " + std::to_string(window) +
                         " weeks does not fit a series of " + std::to_string(loss_a.size()));
    }
    Vector diff(loss_a.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = loss_a[i] - loss_b[i];
    }
    const auto q = static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(window))));
    const double sw = std::sqrt(static_cast<double>(window));
    Vector path;
    path.reserve(diff.size() - window + 1);
    for (std::size_t j = 0; j + window <= diff.size(); ++j) {
        const std::span<const double> seg(diff.data() + j, window);
        const double var = std::max(bartlett_long_run_variance(seg, q), eps);
        path.push_back(sw * mean(seg) / std::sqrt(var));
    }
    return path;
}

bool is_peak_week(Date d) {
    const std::chrono::year_month_day ymd{d};
    const unsigned m = static_cast<unsigned>(ymd.month());
    return m == 12 || m == 1;
}

std::string to_string(SeasonFilter s) {
    switch (s) {
        case SeasonFilter::all: return "all";
        case SeasonFilter::peak: return "peak";
        case SeasonFilter::off: return "off";
    }
    return "all";
}

SeasonFilter parse_season_filter(std::string_view s) {
    if (s == "all") return SeasonFilter::all;
    if (s == "peak") return SeasonFilter::peak;
    if (s == "off") return SeasonFilter::off;
    throw InputError("season must be all, peak or off, got '" + std::string(s) + "'");
}

std::vector<MarkerRule> default_marker_rules() {
    return {{"*", kNoExog}, {"†", "raw"}, {"‡", "topics"}};
}

BacktestReport build_report(std::span<const ForecastTrace> traces, std::uint64_t seed,
                            SeasonFilter season, std::span<const MarkerRule> rules,
                            double alpha) {
    const auto default_rules = default_marker_rules();
    if (rules.empty()) {
        rules = default_rules;
    }
    BacktestReport report;
    report.seed = seed;
    report.season = to_string(season);

    using Key = std::tuple<std::string, std::string, int, std::string>;  // loc, model, h, variant
    std::map<Key, double> mse_of;
    for (const auto& tr : traces) {
        ReportRow row;
        row.location = tr.location;
        row.horizon = tr.horizon;
        row.model = tr.model_id;
        row.exog_variant = tr.exog_variant;
        Vector a, b;
        for (std::size_t i = 0; i < tr.dates.size(); ++i) {
            if (season != SeasonFilter::all &&
                is_peak_week(tr.dates[i]) != (season == SeasonFilter::peak)) {
                continue;
            }
            if (!std::isfinite(tr.y_hat[i])) {
                ++row.failures;
                continue;
            }
            a.push_back(tr.y_true[i]);
            b.push_back(tr.y_hat[i]);
        }
        row.n = a.size();
        row.mse = a.empty() ? std::numeric_limits<double>::quiet_NaN() : mse(a, b);
        const Key key{row.location, row.model, row.horizon, row.exog_variant};
        if (mse_of.contains(key)) {
            throw InputError("duplicate trace for " + row.location + "/" + row.model + "/h" +
                             std::to_string(row.horizon) + "/" + row.exog_variant);
        }
        mse_of[key] = row.mse;
        report.rows.push_back(std::move(row));
    }
    for (auto& row : report.rows) {
        const auto it = mse_of.find({row.location, row.model, row.horizon, kNoExog});
        if (it != mse_of.end() && std::isfinite(row.mse) && it->second > 0.0) {
            row.re = relative_efficiency(row.mse, it->second);
        }
    }

    // Summary cells in order of first appearance.
    std::vector<std::tuple<std::string, int, std::string>> cells;
    std::vector<std::string> locations;
    for (const auto& row : report.rows) {
        const auto cell = std::make_tuple(row.model, row.horizon, row.exog_variant);
        if (row.exog_variant != kNoExog &&
            std::find(cells.begin(), cells.end(), cell) == cells.end()) {
            cells.push_back(cell);
        }
        if (std::find(locations.begin(), locations.end(), row.location) == locations.end()) {
            locations.push_back(row.location);
        }
    }
    for (const auto& [model, h, variant] : cells) {
        SummaryCell c;
        c.model = model;
        c.horizon = h;
        c.exog_variant = variant;
        Vector re;
        for (const auto& row : report.rows) {
            if (row.model == model && row.horizon == h && row.exog_variant == variant && row.re) {
                re.push_back(*row.re);
            }
        }
        c.locations = re.size();
        if (!re.empty()) {
            c.median_re = quantile(re, 0.5);
            c.q1 = quantile(re, 0.25);
            c.q3 = quantile(re, 0.75);
        } else {
            c.median_re = c.q1 = c.q3 = std::numeric_limits<double>::quiet_NaN();
        }
        for (const auto& rule : rules) {
            if (rule.reference == variant) {
                continue;
            }
            Vector d;
            bool present = false;
            for (const auto& loc : locations) {
                const auto ref = mse_of.find({loc, model, h, rule.reference});
                const auto own = mse_of.find({loc, model, h, variant});
                if (ref == mse_of.end() || own == mse_of.end()) {
                    continue;
                }
                present = true;
                if (std::isfinite(ref->second) && std::isfinite(own->second)) {
                    d.push_back(own->second - ref->second);
                }
            }
            if (!present) {
                continue;
            }
            std::optional<double> p;
            const auto nonzero = std::count_if(d.begin(), d.end(), [](double v) { return v != 0; });
            if (nonzero >= 5) {
                p = wilcoxon_signed_rank(d).p_value;
            }
            if (p && *p < alpha) {
                c.markers += rule.marker;
            }
            c.p_values.emplace_back(rule.marker, p);
        }
        report.summary.push_back(std::move(c));
    }
    return report;
}

void write_report_csv(std::ostream& out, const BacktestReport& report) {
    out << "# seed=" << report.seed << " season=" << report.season << '\n';
    out << "location,horizon,model,exog_variant,n,failures,mse,re\n";
    for (const auto& r : report.rows) {
        out << csv_field(r.location) << ',' << r.horizon << ',' << csv_field(r.model) << ','
            << csv_field(r.exog_variant) << ',' << r.n << ',' << r.failures << ','
            << (std::isfinite(r.mse) ? format_double(r.mse) : "") << ','
            << (r.re ? format_double(*r.re) : "") << '\n';
    }
}

std::string report_summary_json(const BacktestReport& report) {
    using nlohmann::ordered_json;
    auto num = [](double v) -> ordered_json {
        return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
    };
    ordered_json j;
    j["seed"] = report.seed;
    j["season"] = report.season;
    j["cells"] = ordered_json::array();
    for (const auto& c : report.summary) {
        ordered_json cell;
        cell["model"] = c.model;
        cell["horizon"] = c.horizon;
        cell["exog_variant"] = c.exog_variant;
        cell["locations"] = c.locations;
        cell["median_re"] = num(c.median_re);
        cell["q1"] = num(c.q1);
        cell["q3"] = num(c.q3);
        ordered_json p = ordered_json::object();
        for (const auto& [marker, value] : c.p_values) {
            p[marker] = value ? num(*value) : ordered_json(nullptr);
        }
        cell["p_values"] = p;
        cell["markers"] = c.markers;
        j["cells"].push_back(cell);
    }
    return j.dump(2) + "\n";
}

}  // namespace trendprep
