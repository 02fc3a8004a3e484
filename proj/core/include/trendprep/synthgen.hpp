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
#include "trendprep/random.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace trendprep {

enum class TrendFamily { flat, linear, quadratic, random_walk };

std::string to_string(TrendFamily f);
TrendFamily parse_trend_family(std::string_view s);

/// Latent weekly count of one keyword:
///
///     K_t = base * (1 + seasonal_t + loading * epidemic_t)
///         + slope * t + quadratic * t^2 + walk_t + noise_t
///
/// floored at 0 and rounded. seasonal_t = amplitude * cos(2 pi (t - phase) / 52),
/// walk_t has N(0, walk_scale^2) steps, noise_t ~ N(0, noise_scale^2).
struct KeywordSpec {
    std::string name;
    TrendFamily family = TrendFamily::flat;
    double base = 100.0;
    double slope = 0.0;
    double quadratic = 0.0;
    double walk_scale = 0.0;
    double seasonal_amplitude = 0.0;
    double seasonal_phase = 0.0;
    double epidemic_loading = 0.0;
    double noise_scale = 0.0;
};

/// Ranges for randomly drawn keywords.
struct KeywordPrior {
    double base_min = 20.0;  // log-uniform
    double base_max = 20000.0;
    double family_weights[4] = {0.4, 0.25, 0.15, 0.2};  // flat, linear, quadratic, walk
    double trend_strength = 1.0;  // trend change over the horizon, in units of base
    double seasonal_max = 0.4;
    double epidemic_probability = 0.5;
    double epidemic_max = 1.5;
    double noise_max = 0.15;  // in units of base
};

struct OverlapSpec {
    std::string a;
    std::string b;
    double fraction = 0.0;
};

struct WorldConfig {
    std::uint64_t seed = 20240127;
    std::string location = "SYN";
    Date start{std::chrono::year{2005} / std::chrono::January / 2};
    std::size_t weeks = 1000;
    std::size_t num_keywords = 200;
    double population = 1.0e6;       // N_0
    double population_growth = 0.0;  // relative growth per week
    std::uint64_t sample_size = 100000;
    double privacy_threshold = 10.0;  // minimum sampled count reported as nonzero
    std::size_t replicates = 27;
    double default_overlap = 0.0;
    std::vector<OverlapSpec> overlaps;
    KeywordPrior prior;
    std::vector<KeywordSpec> keywords;  // used verbatim when non-empty
};

/// Throws InputError naming the first out-of-domain field.
void validate_world_config(const WorldConfig& config);

/// Shared annual outbreak curve, zero outside winter.
Vector epidemic_curve(std::size_t weeks, Date start, std::uint64_t seed);

struct LatentWorld {
    WorldConfig config;
    std::vector<Date> dates;
    std::vector<std::uint64_t> population;       // N_t
    std::vector<std::vector<std::uint64_t>> counts;  // K_t per keyword
    std::vector<KeywordSpec> components;
    Vector epidemic;
    Vector privacy_threshold;  // per week
    std::uint64_t sample_size = 0;

    std::size_t index_of(std::string_view keyword) const;
    double overlap(std::string_view a, std::string_view b) const;
};

/// Deterministic in config.seed.
LatentWorld generate_world(const WorldConfig& config);

/// Exact hypergeometric draw: successes among `draws` taken without
/// replacement from `population` items of which `successes` are marked.
std::uint64_t sample_hypergeometric(Rng& rng, std::uint64_t population, std::uint64_t successes,
                                    std::uint64_t draws);

/// Sampled counts k_t for a latent series, stream keyed by (seed, date, key).
std::vector<std::uint64_t> sample_counts(const LatentWorld& world,
                                         std::span<const std::uint64_t> latent, Date download_date,
                                         std::string_view stream_key);

/// 0-100 index of sampled counts: zero below the week's threshold, then
/// round(100 r_t / max r) with r_t = (k_t/n) / (K_ref/N_ref) at the peak
/// week of the latent ratio.
Vector report_series(const LatentWorld& world, std::span<const std::uint64_t> latent,
                     std::span<const std::uint64_t> sampled);

/// One download of every keyword. Same date, same panel.
SeriesPanel sample_download(const LatentWorld& world, Date download_date);

/// `replicates` consecutive daily downloads starting the day after the
/// final week closes.
std::vector<SeriesPanel> sample_replicates(const LatentWorld& world, std::size_t replicates);

/// Sum of member counts minus pairwise overlaps o_ij * min(K_i, K_j).
std::vector<std::uint64_t> union_volume(const LatentWorld& world,
                                        std::span<const std::string> keywords);

/// Reported series of the "+"-combined query.
Vector sample_union(const LatentWorld& world, std::span<const std::string> keywords,
                    Date download_date);

/// Multiplies the threshold by `factor` from `date` onward.
LatentWorld regime_shift(const LatentWorld& world, Date date, double zero_inflation_factor);

/// Synthetic surveillance target driven by latent search activity:
///
///     y_t = intercept + sum_j weight_j * K_jt / mean(K_j) + e_t,
///     e_t = phi e_{t-1} + N(0, noise_sd^2)
struct TargetSpec {
    std::vector<std::string> drivers;
    std::vector<double> weights;
    double intercept = 10.0;
    double ar_phi = 0.6;
    double noise_sd = 1.0;
    std::uint64_t seed = 7;
};

Vector generate_target(const LatentWorld& world, const TargetSpec& spec);

/// JSON round-trip. Parsing rejects unknown keys and out-of-domain values
/// with the offending field named.
WorldConfig world_config_from_json(std::string_view text);
std::string world_config_to_json(const WorldConfig& config);

/// Latent components and counts for inspection.
std::string world_to_json(const LatentWorld& world);

}  // namespace trendprep
