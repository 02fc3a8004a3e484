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
#include "trendprep/synthgen.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trendprep {

struct PluginSpec {
    std::string id;
    std::string command;
    bool expanding_window = false;
};

/// Every tunable of the pipeline. Defaults are the method's published
/// settings where one exists.
struct PipelineConfig {
    std::uint64_t seed = 20240127;

    double dedup_threshold = 0.99;
    double zero_low = 0.30;
    double zero_high = 0.99;

    std::size_t cluster_cap = 30;
    double dominance = 0.40;
    CombineMode combine = CombineMode::simulated_union;

    std::vector<double> lambda_grid;  // empty means 20 log-spaced values over [0.1, 2]
    std::size_t denoise_window = 20;

    double adf_alpha = 0.05;

    double collinearity_threshold = 0.95;
    std::size_t predictor_cap = 10;

    std::string split_date;  // first test week; empty uses train_fraction
    double train_fraction = 0.7;

    std::vector<int> horizons = {0, 1, 2, 3};
    std::vector<std::string> models = {"arimax", "sarimax", "argo"};
    std::vector<PluginSpec> plugins;
    std::size_t train_window = 104;
    std::size_t threads = 1;
    std::vector<std::string> variants = {"raw", "clustering", "denoising", "detrending"};

    WorldConfig world;
    TargetSpec target;

    /// Throws InputError naming the first out-of-domain field.
    void validate() const;
};

PipelineConfig pipeline_config_from_json(std::string_view text);
std::string pipeline_config_to_json(const PipelineConfig& config);

/// Lines of `name = default  (source)` for --help.
std::string describe_defaults();

}  // namespace trendprep
