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

#include "trendprep/forecast.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace trendprep {

namespace {

std::span<const double> tail(std::span<const double> s, std::size_t n) {
    if (s.size() < n) {
        throw InputError("history of " + std::to_string(s.size()) + " weeks shorter than the " +
                         std::to_string(n) + "-week window");
    }
    return s.subspan(s.size() - n);
}

ExogColumns tail(const ExogColumns& cols, std::size_t n) {
    ExogColumns out;
    for (const auto& c : cols) {
        out.push_back(tail(c, n));
    }
    return out;
}

ForecastOutcome from_arima(const ArimaxFit& fit) {
    return {fit.forecast, fit.fallback ? "css_fallback" : ""};
}

}  // namespace

std::size_t ArimaxModel::min_history(int, std::size_t train_window) const {
    return train_window;
}

ForecastOutcome ArimaxModel::forecast(const ForecastOrigin& origin) const {
    const auto W = origin.train_window;
    return from_arima(fit_arimax(tail(origin.target, W), tail(origin.exog, W + 1), origin.horizon,
                                 options_));
}

std::size_t SarimaxModel::min_history(int, std::size_t train_window) const {
    return std::max(train_window, 2 * season_);
}

ForecastOutcome SarimaxModel::forecast(const ForecastOrigin& origin) const {
    const auto W = std::max(origin.train_window, 2 * season_);
    return from_arima(fit_sarimax(tail(origin.target, W), tail(origin.exog, W + 1), origin.horizon,
                                  season_, options_));
}

std::size_t ArgoModel::min_history(int horizon, std::size_t train_window) const {
    return train_window + options_.lags + static_cast<std::size_t>(horizon);
}

ForecastOutcome ArgoModel::forecast(const ForecastOrigin& origin) const {
    auto opts = options_;
    opts.train_rows = origin.train_window;
    const auto fit = fit_argo(origin.target, origin.exog, origin.horizon, opts);
    return {fit.forecast, ""};
}

ForecastOutcome PersistenceModel::forecast(const ForecastOrigin& origin) const {
    if (origin.target.empty()) {
        throw InputError("persistence needs at least one observed week");
    }
    return {origin.target.back(), ""};
}

std::string SubprocessModel::design_csv(const ForecastOrigin& origin) const {
    const auto t = origin.target.size();
    const auto start = expanding_ || origin.train_window >= t ? 0 : t - origin.train_window;
    std::ostringstream out;
    out << "horizon," << origin.horizon << '\n';
    out << "date,target";
    for (const auto& n : origin.exog_names) {
        out << ',' << csv_field(n);
    }
    out << '\n';
    for (std::size_t s = start; s <= t; ++s) {
        out << (s < origin.dates.size() ? format_date(origin.dates[s]) : std::to_string(s)) << ',';
        if (s < t) {
            out << format_double(origin.target[s]);
        }
        for (const auto& c : origin.exog) {
            out << ',' << format_double(c[s]);
        }
        out << '\n';
    }
    return out.str();
}

ForecastOutcome SubprocessModel::forecast(const ForecastOrigin& origin) const {
    char path[] = "/tmp/trendprep-design-XXXXXX";
    const int fd = ::mkstemp(path);
    if (fd < 0) {
        throw NumericalError("cannot create a temporary design file");
    }
    ::close(fd);
    {
        std::ofstream f(path);
        f << design_csv(origin);
    }
    const std::string cmd = command_ + " < '" + path + "'";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        std::remove(path);
        throw NumericalError("cannot start plug-in '" + command_ + "'");
    }
    std::string output;
    std::array<char, 256> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) {
        output += buf.data();
    }
    const int status = ::pclose(pipe);
    std::remove(path);
    if (status != 0) {
        throw NumericalError("plug-in '" + id_ + "' exited with status " + std::to_string(status));
    }
    const auto nl = output.find('\n');
    auto line = output.substr(0, nl);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
        line.pop_back();
    }
    try {
        return {parse_double(line), ""};
    } catch (const InputError&) {
        throw NumericalError("plug-in '" + id_ + "' returned '" + line + "'");
    }
}

std::unique_ptr<ForecastModel> make_builtin_model(std::string_view id) {
    if (id == "arimax") {
        return std::make_unique<ArimaxModel>();
    }
    if (id == "sarimax") {
        return std::make_unique<SarimaxModel>();
    }
    if (id == "argo") {
        return std::make_unique<ArgoModel>();
    }
    if (id == "persistence") {
        return std::make_unique<PersistenceModel>();
    }
    throw InputError("unknown model '" + std::string(id) + "'");
}

}  // namespace trendprep
