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

#include "trendprep/forecast.hpp"
#include "trendprep/ingest.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trendprep {

double mse(std::span<const double> y_true, std::span<const double> y_hat);

double relative_efficiency(double mse_model, double mse_baseline);

enum class WilcoxonMethod { automatic, exact, normal };

struct WilcoxonResult {
    double p_value = 1.0;
    double statistic = 0.0;  // sum of ranks of the positive differences
    std::size_t n = 0;       // nonzero differences
    bool exact = false;
};

/// One-sided signed-rank test of "median difference < 0". Zeros are dropped
/// and ties get mid-ranks. `automatic` enumerates the null for n <= 25 and
/// uses the normal approximation (continuity and tie corrected) above.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> d,
                                    WilcoxonMethod method = WilcoxonMethod::automatic);

inline constexpr std::size_t kWilcoxonExactMax = 25;

/// log[(mean/sd of denoised) / (mean/sd of raw)] at each week, over
/// replicates of one series. Weeks with sd < eps or mean <= 0 in either set
/// are empty.
std::vector<std::optional<double>> snr_log_ratio(std::span<const Vector> raw_replicates,
                                                 std::span<const Vector> denoised_replicates,
                                                 double eps = 1e-9);

/// Per keyword of the stores, in keyword order.
std::vector<std::vector<std::optional<double>>> snr_log_ratio(const ReplicateStore& raw,
                                                              const ReplicateStore& denoised,
                                                              double eps = 1e-9);

/// Rolling mean loss differential a - b over `window` weeks divided by its
/// Bartlett HAC standard error (truncation floor(window^(1/3))); the
/// variance is floored at `eps`. Element j covers weeks j..j+window-1.
Vector fluctuation_statistic(std::span<const double> loss_a, std::span<const double> loss_b,
                             std::size_t window = 24, double eps = 1e-9);

/// Bartlett-kernel long-run variance of a demeaned series.
double bartlett_long_run_variance(std::span<const double> x, std::size_t truncation);

enum class SeasonFilter { all, peak, off };

/// Peak season is December and January.
bool is_peak_week(Date d);

struct ReportRow {
    std::string location;
    int horizon = 0;
    std::string model;
    std::string exog_variant;
    std::size_t n = 0;
    std::size_t failures = 0;
    double mse = 0.0;
    std::optional<double> re;  // empty when no baseline or a failed cell
};

/// Comparison behind one significance marker: variant MSEs against the
/// `reference` variant's MSEs, paired by location.
struct MarkerRule {
    std::string marker;
    std::string reference;
};

/// `*` against the no-exog baseline, a dagger against raw, a double dagger
/// against topic-only data when present.
std::vector<MarkerRule> default_marker_rules();

struct SummaryCell {
    std::string model;
    int horizon = 0;
    std::string exog_variant;
    std::size_t locations = 0;
    double median_re = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    std::vector<std::pair<std::string, std::optional<double>>> p_values;  // by marker
    std::string markers;
};

struct BacktestReport {
    std::uint64_t seed = 0;
    std::string season = "all";
    std::vector<ReportRow> rows;
    std::vector<SummaryCell> summary;
};

/// MSE per trace over the weeks passing `season`; RE against the trace of
/// the same location, model and horizon with exog variant `kNoExog`.
/// Weeks with a failed forecast are left out of that cell's MSE and counted.
BacktestReport build_report(std::span<const ForecastTrace> traces, std::uint64_t seed,
                            SeasonFilter season = SeasonFilter::all,
                            std::span<const MarkerRule> rules = {}, double alpha = 0.05);

/// `location,horizon,model,exog_variant,n,failures,mse,re`, preceded by a
/// `# seed=` comment line.
void write_report_csv(std::ostream& out, const BacktestReport& report);

/// Table-1-shaped summary.
std::string report_summary_json(const BacktestReport& report);

std::string to_string(SeasonFilter s);
SeasonFilter parse_season_filter(std::string_view s);

}  // namespace trendprep
