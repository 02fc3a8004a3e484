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

#include "trendprep/cluster.hpp"
#include "trendprep/config.hpp"
#include "trendprep/denoise.hpp"
#include "trendprep/detrend.hpp"
#include "trendprep/evalstats.hpp"
#include "trendprep/forecast.hpp"
#include "trendprep/select.hpp"
#include "trendprep/triage.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trendprep {

struct StageFlags {
    bool skip_cluster = false;  // also skips triage
    bool skip_denoise = false;
    bool skip_detrend = false;
};

/// "raw", "clustering", "denoising" or "detrending" (cumulative stages).
StageFlags stages_for_variant(std::string_view variant);

/// Weeks before the split date, or floor(train_fraction * weeks).
std::size_t training_weeks(std::span<const Date> dates, const PipelineConfig& config);

struct PreprocessResult {
    SeriesPanel panel;        // after the last stage run
    std::size_t train_len = 0;  // training rows of `panel`
    std::size_t first_week = 0;  // offset of panel.dates[0] in the input grid
    std::optional<TriagePlan> triage;
    std::optional<ClusterPlan> clusters;
    Vector combined_zero_fractions;  // per cluster, training rows
    std::vector<DenoiseModel> denoise;
    std::vector<TrendReportRow> trends;
    std::optional<PredictorSet> predictors;
    SeriesPanel selected;  // selected predictors only; empty without a target
};

/// triage -> cluster -> combine -> denoise -> detrend -> select. Every
/// parameter is estimated on the first `train_len` rows. `target` must be
/// aligned to `panel.dates`. Stage failures are rethrown as InputError
/// prefixed with the stage name.
PreprocessResult preprocess_panel(const SeriesPanel& panel, std::size_t train_len,
                                  const PipelineConfig& config, StageFlags flags,
                                  const UnionSampler& sampler = {},
                                  std::optional<std::span<const double>> target = std::nullopt);

/// Combined series whose training zero share exceeds this are flagged in
/// the combine report.
inline constexpr double kCombinedZeroFlag = 0.30;

/// Writes the stage reports of `result` into `dir`.
void write_stage_reports(const std::filesystem::path& dir, const PreprocessResult& result,
                         std::uint64_t seed, const std::string& location);

/// Sampler re-querying the simulated world for cluster unions.
UnionSampler world_union_sampler(const LatentWorld& world, Date download_date);

struct LocationBacktest {
    std::vector<ForecastTrace> traces;
    std::map<std::string, PreprocessResult> variants;
};

/// Preprocesses every configured variant, then backtests every
/// (model, horizon, variant) cell plus the no-exog baseline over the weeks
/// after the training split.
LocationBacktest backtest_location(const SeriesPanel& panel, std::span<const double> target,
                                   const PipelineConfig& config, const ModelRegistry& models,
                                   const UnionSampler& sampler = {});

/// Built-in models named in config.models plus configured plug-ins.
ModelRegistry build_registry(const PipelineConfig& config);

/// Target file: `date,value` or `date,location,value`.
std::map<std::string, std::pair<std::vector<Date>, Vector>> parse_target_csv(
    std::string_view text);

/// Values of `target` on `dates`; throws naming the first missing week.
Vector align_target(const std::pair<std::vector<Date>, Vector>& target,
                    std::span<const Date> dates);

/// `location,model,exog_variant,horizon,date,y_true,y_hat,flags` after a
/// `# seed=` line.
void write_traces_csv(std::ostream& out, std::span<const ForecastTrace> traces,
                      std::uint64_t seed);
std::vector<ForecastTrace> parse_traces_csv(std::string_view text,
                                            std::uint64_t* seed = nullptr);

/// config.world with its seed replaced by the root seed.
WorldConfig effective_world(const PipelineConfig& config);

/// Subcommands. Each returns the process exit code.
int cmd_synth(const PipelineConfig& config, const std::filesystem::path& out_dir);
/// A file whose stem is a YYYY-MM-DD date takes it as its download date.
int cmd_ingest(std::span<const std::string> files, const std::string& location,
               const std::filesystem::path& out_file);
int cmd_preprocess(const PipelineConfig& config, const std::filesystem::path& panels_file,
                   StageFlags flags, const std::optional<std::filesystem::path>& target_file,
                   const std::filesystem::path& out_dir);
int cmd_backtest(const PipelineConfig& config, const std::filesystem::path& panels_file,
                 const std::filesystem::path& target_file, const std::filesystem::path& out_dir);
int cmd_report(const std::filesystem::path& traces_file, SeasonFilter season,
               const std::filesystem::path& out_dir, std::size_t fluctuation_window = 24);

}  // namespace trendprep
