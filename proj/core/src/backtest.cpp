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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace trendprep {

std::vector<ForecastTrace> run_backtest(const BacktestData& data,
                                        std::span<const ForecastTask> tasks,
                                        const ModelRegistry& models, std::size_t test_begin,
                                        std::size_t test_end, std::size_t threads) {
    const auto n = data.target.size();
    if (data.dates.size() != n) {
        throw InputError("target and date grid differ in length");
    }
    if (test_begin >= test_end || test_end > n) {
        throw InputError("empty or out-of-range test period");
    }

    struct Job {
        const ForecastModel* model;
        const ExogVariant* variant;
    };
    std::vector<Job> jobs;
    for (const auto& task : tasks) {
        const auto it = models.find(task.model_id);
        if (it == models.end()) {
            throw InputError("no model registered as '" + task.model_id + "'");
        }
        const ExogVariant* variant = nullptr;
        if (task.exog_variant != kNoExog) {
            for (const auto& v : data.variants) {
                if (v.name == task.exog_variant) {
                    variant = &v;
                }
            }
            if (!variant) {
                throw InputError("unknown exog variant '" + task.exog_variant + "'");
            }
            for (const auto& c : variant->columns) {
                if (c.size() != n) {
                    throw InputError("exog variant '" + variant->name +
                                     "' is not aligned with the target");
                }
            }
        }
        if (task.horizon < 0) {
            throw InputError("negative horizon");
        }
        if (task.train_window < kMinTrainWindow) {
            throw InputError("train window of " + std::to_string(task.train_window) +
                             " weeks is below the minimum of " + std::to_string(kMinTrainWindow));
        }
        const auto need = it->second->min_history(task.horizon, task.train_window);
        if (test_begin < need + static_cast<std::size_t>(task.horizon)) {
            throw InputError("test period starts before " + task.model_id + " has " +
                             std::to_string(need) + " weeks of history");
        }
        jobs.push_back({it->second.get(), variant});
    }

    const auto weeks = test_end - test_begin;
    std::vector<ForecastTrace> traces(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        auto& tr = traces[i];
        tr.location = tasks[i].location.empty() ? data.location : tasks[i].location;
        tr.model_id = tasks[i].model_id;
        tr.exog_variant = tasks[i].exog_variant;
        tr.horizon = tasks[i].horizon;
        tr.dates.assign(data.dates.begin() + static_cast<std::ptrdiff_t>(test_begin),
                        data.dates.begin() + static_cast<std::ptrdiff_t>(test_end));
        tr.y_true.assign(data.target.begin() + static_cast<std::ptrdiff_t>(test_begin),
                         data.target.begin() + static_cast<std::ptrdiff_t>(test_end));
        tr.y_hat.assign(weeks, std::numeric_limits<double>::quiet_NaN());
        tr.flags.assign(weeks, "");
    }

    const auto total = tasks.size() * weeks;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const auto item = next.fetch_add(1);
            if (item >= total) {
                return;
            }
            const auto ti = item / weeks;
            const auto wi = item % weeks;
            const auto& task = tasks[ti];
            const auto d = test_begin + wi;
            const auto t = d - static_cast<std::size_t>(task.horizon);

            ForecastOrigin origin;
            origin.target = std::span<const double>(data.target.data(), t);
            origin.dates = std::span<const Date>(data.dates.data(), t + 1);
            origin.horizon = task.horizon;
            origin.train_window = task.train_window;
            if (jobs[ti].variant) {
                origin.exog_names = jobs[ti].variant->names;
                for (const auto& c : jobs[ti].variant->columns) {
                    origin.exog.emplace_back(c.data(), t + 1);
                }
            }
            try {
                const auto out = jobs[ti].model->forecast(origin);
                if (!std::isfinite(out.value)) {
                    throw NumericalError("non-finite forecast");
                }
                traces[ti].y_hat[wi] = out.value;
                traces[ti].flags[wi] = out.flags;
            } catch (const std::exception& e) {
                traces[ti].flags[wi] = std::string("error: ") + e.what();
            }
        }
    };
    const auto count = std::max<std::size_t>(1, std::min(threads, total));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < count; ++i) {
            pool.emplace_back(worker);
        }
    }
    return traces;
}

void write_trace_csv(std::ostream& out, const ForecastTrace& trace) {
    out << "date,y_true,y_hat,flags\n";
    for (std::size_t i = 0; i < trace.dates.size(); ++i) {
        out << format_date(trace.dates[i]) << ',' << format_double(trace.y_true[i]) << ','
            << (std::isfinite(trace.y_hat[i]) ? format_double(trace.y_hat[i]) : "") << ','
            << csv_field(trace.flags[i]) << '\n';
    }
}

ForecastTrace parse_trace_csv(std::string_view text) {
    ForecastTrace trace;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 4) {
            throw InputError("trace rows need 4 fields");
        }
        trace.dates.push_back(parse_date(f[0]));
        trace.y_true.push_back(parse_double(f[1]));
        trace.y_hat.push_back(f[2].empty() ? std::numeric_limits<double>::quiet_NaN()
                                           : parse_double(f[2]));
        trace.flags.push_back(f[3]);
    }
    return trace;
}

}  // namespace trendprep
