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

#include "trendprep/select.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace trendprep {

std::vector<RankedPredictor> rank_by_target_correlation(const SeriesPanel& panel,
                                                        std::span<const double> target,
                                                        std::size_t train_len) {
    if (train_len < 30) {
        throw InputError("predictor selection needs at least 30 training rows");
    }
    if (target.size() < train_len || panel.num_weeks() < train_len) {
        throw InputError("target or panel shorter than the training window");
    }
    const auto y = target.first(train_len);
    if (!pearson(y, y)) {
        throw InputError("target has zero variance over the training rows");
    }
    std::vector<RankedPredictor> ranked;
    for (std::size_t k = 0; k < panel.num_keywords(); ++k) {
        const std::span<const double> x(panel.values[k].data(), train_len);
        ranked.push_back({panel.keywords[k], pearson(x, y)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedPredictor& a, const RankedPredictor& b) {
        if (a.correlation.has_value() != b.correlation.has_value()) {
            return a.correlation.has_value();
        }
        if (a.correlation && b.correlation) {
            const double ra = std::abs(*a.correlation);
            const double rb = std::abs(*b.correlation);
            if (ra != rb) {
                return ra > rb;
            }
        }
        return a.keyword < b.keyword;
    });
    return ranked;
}

PredictorSet prune_collinear(std::span<const RankedPredictor> ranked, const SeriesPanel& panel,
                             std::size_t train_len, double threshold, std::size_t cap) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw InputError("collinearity threshold must lie in (0,1)");
    }
    if (cap < 1) {
        throw InputError("predictor cap must be at least 1");
    }
    PredictorSet set;
    std::vector<std::span<const double>> kept_series;
    for (const auto& cand : ranked) {
        if (set.keywords.size() >= cap) {
            break;
        }
        if (!cand.correlation) {
            continue;
        }
        const auto x = panel.series(cand.keyword).first(train_len);
        bool ok = true;
        for (std::size_t i = 0; i < kept_series.size(); ++i) {
            const auto r = pearson(x, kept_series[i]);
            if (r && std::abs(*r) > threshold) {
                set.dropped_collinear.push_back({cand.keyword, set.keywords[i], *r});
                ok = false;
                break;
            }
        }
        if (ok) {
            set.keywords.push_back(cand.keyword);
            set.target_correlations.push_back(*cand.correlation);
            kept_series.push_back(x);
        }
    }
    return set;
}

PredictorSet select_predictors(const SeriesPanel& panel, std::span<const double> target,
                               std::size_t train_len, const SelectOptions& options) {
    const auto ranked = rank_by_target_correlation(panel, target, train_len);
    return prune_collinear(ranked, panel, train_len, options.collinearity_threshold, options.cap);
}

void write_predictors_csv(std::ostream& out, const PredictorSet& set) {
    out << "rank,keyword,target_correlation,status,collinear_with\n";
    for (std::size_t i = 0; i < set.keywords.size(); ++i) {
        out << i + 1 << ',' << csv_field(set.keywords[i]) << ','
            << format_double(set.target_correlations[i]) << ",selected,\n";
    }
    for (const auto& d : set.dropped_collinear) {
        out << ',' << csv_field(d.dropped) << ",,dropped," << csv_field(d.kept) << '\n';
    }
}

}  // namespace trendprep
