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

#include "trendprep/config.hpp"
#include "trendprep/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace trendprep {

namespace {

using nlohmann::ordered_json;

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) {
        throw InputError(field + " " + what);
    }
}

void check_keys(const ordered_json& j, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
        throw InputError(where + " must be an object");
    }
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw InputError((where.empty() ? key : where + "." + key) +
                             " is not a recognized field");
        }
    }
}

template <class T>
void read(const ordered_json& j, const char* key, const std::string& where, T& out) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(where + "." + key + " has the wrong type");
    }
}

}  // namespace

void PipelineConfig::validate() const {
    require(dedup_threshold > 0.0 && dedup_threshold < 1.0, "triage.dedup_threshold",
            "must lie in (0,1)");
    require(zero_low > 0.0 && zero_low < 1.0, "triage.zero_low", "must lie in (0,1)");
    require(zero_high > zero_low && zero_high < 1.0, "triage.zero_high",
            "must lie in (zero_low,1)");
    require(cluster_cap >= 1, "cluster.k_cap", "must be at least 1");
    require(dominance > 0.0 && dominance <= 1.0, "cluster.dominance", "must lie in (0,1]");
    for (double l : lambda_grid) {
        require(std::isfinite(l) && l > 0.0, "denoise.lambda_grid", "values must be positive");
    }
    require(denoise_window >= 4, "denoise.window", "must be at least 4");
    require(adf_alpha == 0.01 || adf_alpha == 0.05 || adf_alpha == 0.10, "detrend.alpha",
            "must be 0.01, 0.05 or 0.10");
    require(collinearity_threshold > 0.0 && collinearity_threshold <= 1.0,
            "select.collinearity_threshold", "must lie in (0,1]");
    require(predictor_cap >= 1, "select.cap", "must be at least 1");
    if (!split_date.empty()) {
        try {
            parse_date(split_date);
        } catch (const InputError&) {
            throw InputError("split.date is not a YYYY-MM-DD date");
        }
    }
    require(train_fraction > 0.0 && train_fraction < 1.0, "split.train_fraction",
            "must lie in (0,1)");
    require(!horizons.empty(), "forecast.horizons", "must not be empty");
    for (int h : horizons) {
        require(h >= 0 && h <= 52, "forecast.horizons", "values must lie in [0,52]");
    }
    std::set<std::string> ids;
    for (const auto& m : models) {
        require(m == "arimax" || m == "sarimax" || m == "argo" || m == "persistence" ||
                    std::any_of(plugins.begin(), plugins.end(),
                                [&](const PluginSpec& p) { return p.id == m; }),
                "forecast.models", "has unknown model '" + m + "'");
        require(ids.insert(m).second, "forecast.models", "lists '" + m + "' twice");
    }
    for (const auto& p : plugins) {
        require(!p.id.empty() && !p.command.empty(), "forecast.plugins",
                "entries need an id and a command");
    }
    require(train_window >= kMinTrainWindow, "forecast.train_window", "must be at least 60");
    require(threads >= 1, "forecast.threads", "must be at least 1");
    for (const auto& v : variants) {
        require(v == "raw" || v == "clustering" || v == "denoising" || v == "detrending",
                "variants", "has unknown variant '" + v + "'");
    }
    validate_world_config(world);
    require(target.drivers.size() == target.weights.size() || target.weights.empty(),
            "target.weights", "must match target.drivers");
    require(std::abs(target.ar_phi) < 1.0, "target.ar_phi", "must lie in (-1,1)");
    require(target.noise_sd >= 0.0, "target.noise_sd", "must be nonnegative");
}

PipelineConfig pipeline_config_from_json(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "", {"seed", "triage", "cluster", "denoise", "detrend", "select", "split",
                       "forecast", "variants", "world", "target"});
    PipelineConfig c;
    read(j, "seed", "config", c.seed);
    if (j.contains("triage")) {
        const auto& s = j.at("triage");
        check_keys(s, "triage", {"dedup_threshold", "zero_low", "zero_high"});
        read(s, "dedup_threshold", "triage", c.dedup_threshold);
        read(s, "zero_low", "triage", c.zero_low);
        read(s, "zero_high", "triage", c.zero_high);
    }
    if (j.contains("cluster")) {
        const auto& s = j.at("cluster");
        check_keys(s, "cluster", {"k_cap", "dominance", "combine"});
        read(s, "k_cap", "cluster", c.cluster_cap);
        read(s, "dominance", "cluster", c.dominance);
        if (s.contains("combine")) {
            std::string m;
            read(s, "combine", "cluster", m);
            try {
                c.combine = parse_combine_mode(m);
            } catch (const InputError&) {
                throw InputError("cluster.combine must be ingested-combined, simulated-union "
                                 "or summed");
            }
        }
    }
    if (j.contains("denoise")) {
        const auto& s = j.at("denoise");
        check_keys(s, "denoise", {"lambda_grid", "window"});
        read(s, "lambda_grid", "denoise", c.lambda_grid);
        read(s, "window", "denoise", c.denoise_window);
    }
    if (j.contains("detrend")) {
        const auto& s = j.at("detrend");
        check_keys(s, "detrend", {"alpha"});
        read(s, "alpha", "detrend", c.adf_alpha);
    }
    if (j.contains("select")) {
        const auto& s = j.at("select");
        check_keys(s, "select", {"collinearity_threshold", "cap"});
        read(s, "collinearity_threshold", "select", c.collinearity_threshold);
        read(s, "cap", "select", c.predictor_cap);
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        check_keys(s, "split", {"date", "train_fraction"});
        read(s, "date", "split", c.split_date);
        read(s, "train_fraction", "split", c.train_fraction);
    }
    if (j.contains("forecast")) {
        const auto& s = j.at("forecast");
        check_keys(s, "forecast", {"horizons", "models", "plugins", "train_window", "threads"});
        read(s, "horizons", "forecast", c.horizons);
        read(s, "models", "forecast", c.models);
        read(s, "train_window", "forecast", c.train_window);
        read(s, "threads", "forecast", c.threads);
        if (s.contains("plugins")) {
            for (const auto& p : s.at("plugins")) {
                check_keys(p, "forecast.plugins[]", {"id", "command", "expanding_window"});
                PluginSpec spec;
                read(p, "id", "forecast.plugins[]", spec.id);
                read(p, "command", "forecast.plugins[]", spec.command);
                read(p, "expanding_window", "forecast.plugins[]", spec.expanding_window);
                c.plugins.push_back(spec);
            }
        }
    }
    read(j, "variants", "config", c.variants);
    if (j.contains("world")) {
        c.world = world_config_from_json(j.at("world").dump());
    }
    if (j.contains("target")) {
        const auto& s = j.at("target");
        check_keys(s, "target", {"drivers", "weights", "intercept", "ar_phi", "noise_sd", "seed"});
        read(s, "drivers", "target", c.target.drivers);
        read(s, "weights", "target", c.target.weights);
        read(s, "intercept", "target", c.target.intercept);
        read(s, "ar_phi", "target", c.target.ar_phi);
        read(s, "noise_sd", "target", c.target.noise_sd);
        read(s, "seed", "target", c.target.seed);
    }
    c.validate();
    return c;
}

std::string pipeline_config_to_json(const PipelineConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["triage"] = {{"dedup_threshold", c.dedup_threshold},
                   {"zero_low", c.zero_low},
                   {"zero_high", c.zero_high}};
    j["cluster"] = {{"k_cap", c.cluster_cap},
                    {"dominance", c.dominance},
                    {"combine", to_string(c.combine)}};
    j["denoise"] = {{"lambda_grid", c.lambda_grid}, {"window", c.denoise_window}};
    j["detrend"] = {{"alpha", c.adf_alpha}};
    j["select"] = {{"collinearity_threshold", c.collinearity_threshold},
                   {"cap", c.predictor_cap}};
    j["split"] = {{"date", c.split_date}, {"train_fraction", c.train_fraction}};
    ordered_json plugins = ordered_json::array();
    for (const auto& p : c.plugins) {
        plugins.push_back(
            {{"id", p.id}, {"command", p.command}, {"expanding_window", p.expanding_window}});
    }
    j["forecast"] = {{"horizons", c.horizons},
                     {"models", c.models},
                     {"plugins", plugins},
                     {"train_window", c.train_window},
                     {"threads", c.threads}};
    j["variants"] = c.variants;
    j["world"] = ordered_json::parse(world_config_to_json(c.world));
    j["target"] = {{"drivers", c.target.drivers},
                   {"weights", c.target.weights},
                   {"intercept", c.target.intercept},
                   {"ar_phi", c.target.ar_phi},
                   {"noise_sd", c.target.noise_sd},
                   {"seed", c.target.seed}};
    return j.dump(2) + "\n";
}

std::string describe_defaults() {
    const PipelineConfig c;
    std::ostringstream out;
    auto line = [&](const std::string& name, const std::string& value, const std::string& src) {
        out << "  " << name << " = " << value << "  (" << src << ")\n";
    };
    line("seed", std::to_string(c.seed), "root of every random stream");
    line("triage.dedup_threshold", "0.99", "method default: near-duplicate keyword correlation");
    line("triage.zero_low", "0.30", "method default: zero share above which keywords are clustered");
    line("triage.zero_high", "0.99", "method default: zero share above which keywords are discarded");
    line("cluster.k_cap", "30", "cap on the elbow search");
    line("cluster.dominance", "0.40", "share that triggers a second clustering round");
    line("cluster.combine", to_string(c.combine), "method default: clusters are re-queried with '+'");
    line("denoise.lambda_grid", "20 log-spaced values in [0.1, 2]", "method default: smoothing range");
    line("denoise.window", "20", "method default: rolling spline window in weeks");
    line("detrend.alpha", "0.05", "method default: ADF significance level");
    line("select.collinearity_threshold", "0.95", "pairwise |r| pruning limit");
    line("select.cap", "10", "predictors kept per location");
    line("split.train_fraction", "0.7", "used when split.date is empty");
    line("forecast.horizons", "0,1,2,3", "method default: nowcast to three weeks ahead");
    line("forecast.models", "arimax,sarimax,argo", "method default: statistical models");
    line("forecast.train_window", "104", "method default: two-year rolling window");
    line("forecast.threads", "1", "worker threads for the backtest");
    line("variants", "raw,clustering,denoising,detrending",
         "method default: cumulative preprocessing variants");
    line("world.num_keywords", std::to_string(c.world.num_keywords), "simulator size");
    line("world.weeks", std::to_string(c.world.weeks), "simulator length");
    line("world.replicates", std::to_string(c.world.replicates),
         "method default: replicate downloads for the noise analysis");
    line("world.sample_size", std::to_string(c.world.sample_size), "searches drawn per week");
    line("world.privacy_threshold", format_double(c.world.privacy_threshold),
         "sampled count below which 0 is reported");
    return out.str();
}

}  // namespace trendprep
