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

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trendprep {

struct RankedPredictor {
    std::string keyword;
    std::optional<double> correlation;  // empty for zero-variance series
};

/// Keywords by descending |r| with the target over the first `train_len`
/// rows (ties by keyword); zero-variance series go last.
std::vector<RankedPredictor> rank_by_target_correlation(const SeriesPanel& panel,
                                                        std::span<const double> target,
                                                        std::size_t train_len);

struct CollinearDrop {
    std::string dropped;
    std::string kept;
    double correlation = 0.0;
};

struct PredictorSet {
    std::vector<std::string> keywords;
    std::vector<double> target_correlations;
    std::vector<CollinearDrop> dropped_collinear;
};

/// Greedy walk down the ranking keeping a keyword only if |r| with every
/// kept keyword is <= threshold; stops at `cap`.
PredictorSet prune_collinear(std::span<const RankedPredictor> ranked, const SeriesPanel& panel,
                             std::size_t train_len, double threshold = 0.95, std::size_t cap = 10);

struct SelectOptions {
    double collinearity_threshold = 0.95;
    std::size_t cap = 10;
};

PredictorSet select_predictors(const SeriesPanel& panel, std::span<const double> target,
                               std::size_t train_len, const SelectOptions& options = {});

/// `rank,keyword,target_correlation,status,collinear_with`
void write_predictors_csv(std::ostream& out, const PredictorSet& set);

}  // namespace trendprep
