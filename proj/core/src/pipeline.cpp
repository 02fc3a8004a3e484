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

#include "trendprep/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace trendprep {

namespace fs = std::filesystem;

namespace {

SeriesPanel head(const SeriesPanel& panel, std::size_t rows) {
    SeriesPanel out = panel;
    out.dates.resize(rows);
    for (auto& v : out.values) {
        v.resize(rows);
    }
    return out;
}

template <class Fn>
void stage(const char* name, Fn&& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        throw InputError(std::string("stage ") + name + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("stage ") + name + ": " + e.what());
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw InputError("cannot write " + path.string());
    }
    return f;
}

void seed_line(std::ostream& out, std::uint64_t seed) { out << "# seed=" << seed << '\n'; }

/// First download of every location, in order of appearance.
std::vector<SeriesPanel> first_downloads(const std::vector<SeriesPanel>& panels) {
    std::vector<SeriesPanel> out;
    for (const auto& p : panels) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const SeriesPanel& q) { return q.location == p.location; });
        if (it == out.end()) {
            out.push_back(p);
        } else if (p.download_date < it->download_date) {
            *it = p;
        }
    }
    return out;
}

std::vector<SeriesPanel> read_panels(const fs::path& file) {
    auto panels = parse_panels_csv(read_file(file.string()));
    if (panels.empty()) {
        throw InputError(file.string() + " holds no panels");
    }
    for (const auto& p : panels) {
        if (p.num_keywords() == 0 || p.num_weeks() == 0) {
            throw InputError("empty panel for location '" + p.location + "'");
        }
    }
    return first_downloads(panels);
}

const std::pair<std::vector<Date>, Vector>& target_for(
    const std::map<std::string, std::pair<std::vector<Date>, Vector>>& targets,
    const std::string& location) {
    if (auto it = targets.find(location); it != targets.end()) {
        return it->second;
    }
    if (auto it = targets.find(""); it != targets.end()) {
        return it->second;
    }
    throw InputError("target file has no series for location '" + location + "'");
}

struct WorldCache {
    std::optional<LatentWorld> world;
    const LatentWorld& get(const PipelineConfig& config) {
        if (!world) {
            world = generate_world(effective_world(config));
        }
        return *world;
    }
};

UnionSampler sampler_for(const PipelineConfig& config, const SeriesPanel& panel,
                         WorldCache& cache) {
    if (config.combine != CombineMode::simulated_union) {
        return {};
    }
    const auto& world = cache.get(config);
    if (world.config.location != panel.location) {
        throw InputError("cluster.combine simulated-union needs a world for location '" +
                         panel.location + "', the configured world is '" +
                         world.config.location + "'");
    }
    return world_union_sampler(world, panel.download_date);
}

}  // namespace

StageFlags stages_for_variant(std::string_view variant) {
    if (variant == "raw") return {true, true, true};
    if (variant == "clustering") return {false, true, true};
    if (variant == "denoising") return {false, false, true};
    if (variant == "detrending") return {false, false, false};
    throw InputError("unknown variant '" + std::string(variant) + "'");
}

std::size_t training_weeks(std::span<const Date> dates, const PipelineConfig& config) {
    std::size_t n = 0;
    if (!config.split_date.empty()) {
        const Date split = parse_date(config.split_date);
        n = static_cast<std::size_t>(
            std::count_if(dates.begin(), dates.end(), [&](Date d) { return d < split; }));
    } else {
        n = static_cast<std::size_t>(std::floor(config.train_fraction *
                                                static_cast<double>(dates.size())));
    }
    if (n < 2 || n >= dates.size()) {
        throw InputError("split leaves " + std::to_string(n) + " training weeks out of " +
                         std::to_string(dates.size()));
    }
    return n;
}

WorldConfig effective_world(const PipelineConfig& config) {
    auto w = config.world;
    w.seed = config.seed;
    return w;
}

UnionSampler world_union_sampler(const LatentWorld& world, Date download_date) {
    return [&world, download_date](std::span<const std::string> keywords) {
        return sample_union(world, keywords, download_date);
    };
}

PreprocessResult preprocess_panel(const SeriesPanel& panel, std::size_t train_len,
                                  const PipelineConfig& config, StageFlags flags,
                                  const UnionSampler& sampler,
                                  std::optional<std::span<const double>> target) {
    if (panel.num_keywords() == 0 || panel.num_weeks() == 0) {
        throw InputError("empty panel");
    }
    if (train_len < 2 || train_len > panel.num_weeks()) {
        throw InputError("training length outside the panel");
    }
    if (target && target->size() != panel.num_weeks()) {
        throw InputError("target is not aligned with the panel");
    }
    PreprocessResult r;
    r.panel = panel;
    r.train_len = train_len;

    if (!flags.skip_cluster) {
        stage("triage", [&] {
            TriageOptions o;
            o.dedup_threshold = config.dedup_threshold;
            o.low = config.zero_low;
            o.high = config.zero_high;
            r.triage = triage(head(r.panel, train_len), o);
        });
        stage("cluster", [&] {
            const auto sub = r.panel.subset(r.triage->to_cluster);
            ClusterOptions o;
            o.train_len = train_len;
            o.k_cap = config.cluster_cap;
            o.dominance = config.dominance;
            auto plan = cluster_keywords(sub, o);
            if (plan.clusters.size() > 1) {
                plan = split_oversized(plan, sub, config.dominance, o);
            }
            r.clusters = std::move(plan);
        });
        stage("combine", [&] {
            SeriesPanel out = r.panel.subset(r.triage->kept);
            for (std::size_t c = 0; c < r.clusters->clusters.size(); ++c) {
                const auto& members = r.clusters->clusters[c];
                out.keywords.push_back(r.clusters->query_strings[c]);
                out.values.push_back(combine_series(r.panel, members, config.combine, sampler));
                r.combined_zero_fractions.push_back(zero_fraction(
                    std::span<const double>(out.values.back().data(), train_len)));
            }
            if (out.num_keywords() == 0) {
                throw InputError("every keyword was discarded");
            }
            out.validate();
            r.panel = std::move(out);
        });
    }
    if (!flags.skip_denoise) {
        stage("denoise", [&] {
            DenoiseOptions o;
            o.window = config.denoise_window;
            if (!config.lambda_grid.empty()) {
                o.grid = config.lambda_grid;
            }
            o.train_len = train_len;
            auto res = denoise_panel(r.panel, o);
            r.panel = std::move(res.panel);
            r.denoise = std::move(res.models);
        });
    }
    if (!flags.skip_detrend) {
        stage("detrend", [&] {
            auto res = detrend_panel(r.panel, train_len, config.adf_alpha);
            r.panel = std::move(res.panel);
            r.trends = std::move(res.rows);
            if (res.dropped_first_week) {
                r.first_week = 1;
                r.train_len = train_len - 1;
            }
        });
    }
    if (target) {
        stage("select", [&] {
            SelectOptions o;
            o.collinearity_threshold = config.collinearity_threshold;
            o.cap = config.predictor_cap;
            const auto y = target->subspan(r.first_week);
            r.predictors = select_predictors(r.panel, y, r.train_len, o);
            r.selected = r.panel.subset(r.predictors->keywords);
        });
    }
    return r;
}

void write_stage_reports(const fs::path& dir, const PreprocessResult& r, std::uint64_t seed,
                         const std::string& location) {
    fs::create_directories(dir);
    if (r.triage) {
        auto f = open_out(dir / "triage_report.csv");
        seed_line(f, seed);
        write_triage_report(f, *r.triage);
    }
    if (r.clusters) {
        auto f = open_out(dir / "clusters.csv");
        seed_line(f, seed);
        write_clusters_csv(f, *r.clusters);
        auto q = open_out(dir / "queries.txt");
        write_queries_txt(q, *r.clusters);
        auto z = open_out(dir / "combine_report.csv");
        seed_line(z, seed);
        z << "query,zero_fraction,flagged\n";
        for (std::size_t c = 0; c < r.combined_zero_fractions.size(); ++c) {
            const double zf = r.combined_zero_fractions[c];
            z << csv_field(r.clusters->query_strings[c]) << ',' << format_double(zf) << ','
              << (zf > kCombinedZeroFlag ? "true" : "false") << '\n';
        }
    }
    if (!r.denoise.empty()) {
        auto f = open_out(dir / "denoise_report.csv");
        seed_line(f, seed);
        write_denoise_report(f, r.denoise);
    }
    if (!r.trends.empty()) {
        auto f = open_out(dir / "trend_report.csv");
        seed_line(f, seed);
        write_trend_report(f, r.trends);
    }
    if (r.predictors) {
        auto f = open_out(dir / ("predictors_" + location + ".csv"));
        seed_line(f, seed);
        write_predictors_csv(f, *r.predictors);
    }
    auto f = open_out(dir / "panel.csv");
    write_panel_csv(f, r.panel);
}

ModelRegistry build_registry(const PipelineConfig& config) {
    ModelRegistry reg;
    for (const auto& id : config.models) {
        const auto plugin = std::find_if(config.plugins.begin(), config.plugins.end(),
                                         [&](const PluginSpec& p) { return p.id == id; });
        if (plugin != config.plugins.end()) {
            reg[id] = std::make_shared<SubprocessModel>(plugin->id, plugin->command,
                                                        plugin->expanding_window);
        } else {
            reg[id] = make_builtin_model(id);
        }
    }
    return reg;
}

LocationBacktest backtest_location(const SeriesPanel& panel, std::span<const double> target,
                                   const PipelineConfig& config, const ModelRegistry& models,
                                   const UnionSampler& sampler) {
    if (target.size() != panel.num_weeks()) {
        throw InputError("target is not aligned with the panel of '" + panel.location + "'");
    }
    LocationBacktest out;
    const auto train_len = training_weeks(panel.dates, config);
    std::size_t offset = 0;
    for (const auto& v : config.variants) {
        auto r = preprocess_panel(panel, train_len, config, stages_for_variant(v), sampler, target);
        offset = std::max(offset, r.first_week);
        out.variants.emplace(v, std::move(r));
    }

    BacktestData data;
    data.location = panel.location;
    data.dates.assign(panel.dates.begin() + static_cast<std::ptrdiff_t>(offset), panel.dates.end());
    data.target.assign(target.begin() + static_cast<std::ptrdiff_t>(offset), target.end());
    for (const auto& v : config.variants) {
        const auto& r = out.variants.at(v);
        ExogVariant ev;
        ev.name = v;
        ev.names = r.selected.keywords;
        const auto skip = static_cast<std::ptrdiff_t>(offset - r.first_week);
        for (const auto& col : r.selected.values) {
            ev.columns.emplace_back(col.begin() + skip, col.end());
        }
        data.variants.push_back(std::move(ev));
    }

    std::vector<ForecastTask> tasks;
    for (const auto& m : config.models) {
        for (int h : config.horizons) {
            std::vector<std::string> cells = {kNoExog};
            cells.insert(cells.end(), config.variants.begin(), config.variants.end());
            for (const auto& v : cells) {
                ForecastTask t;
                t.location = panel.location;
                t.horizon = h;
                t.train_window = config.train_window;
                t.exog_variant = v;
                t.model_id = m;
                tasks.push_back(std::move(t));
            }
        }
    }
    out.traces = run_backtest(data, tasks, models, train_len - offset, data.target.size(),
                              config.threads);
    return out;
}

std::map<std::string, std::pair<std::vector<Date>, Vector>> parse_target_csv(
    std::string_view text) {
    std::map<std::string, std::pair<std::vector<Date>, Vector>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t columns = 0;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto f = split_csv_line(line);
        if (columns == 0) {
            if (f.empty() || f[0] != "date" || (f.size() != 2 && f.size() != 3)) {
                throw InputError("target header must be 'date,value' or 'date,location,value'");
            }
            columns = f.size();
            continue;
        }
        if (f.size() != columns) {
            throw InputError("target line " + std::to_string(lineno) + " has " +
                             std::to_string(f.size()) + " fields");
        }
        auto& series = out[columns == 3 ? f[1] : std::string()];
        series.first.push_back(parse_date(f[0]));
        series.second.push_back(parse_double(f.back()));
    }
    if (out.empty()) {
        throw InputError("target file holds no rows");
    }
    return out;
}

Vector align_target(const std::pair<std::vector<Date>, Vector>& target,
                    std::span<const Date> dates) {
    std::map<Date, double> by_date;
    for (std::size_t i = 0; i < target.first.size(); ++i) {
        by_date[target.first[i]] = target.second[i];
    }
    Vector out;
    out.reserve(dates.size());
    for (auto d : dates) {
        const auto it = by_date.find(d);
        if (it == by_date.end()) {
            throw InputError("target has no value for week " + format_date(d));
        }
        out.push_back(it->second);
    }
    return out;
}

void write_traces_csv(std::ostream& out, std::span<const ForecastTrace> traces,
                      std::uint64_t seed) {
    seed_line(out, seed);
    out << "location,model,exog_variant,horizon,date,y_true,y_hat,flags\n";
    for (const auto& tr : traces) {
        const auto prefix = csv_field(tr.location) + ',' + csv_field(tr.model_id) + ',' +
                            csv_field(tr.exog_variant) + ',' + std::to_string(tr.horizon) + ',';
        for (std::size_t i = 0; i < tr.dates.size(); ++i) {
            out << prefix << format_date(tr.dates[i]) << ',' << format_double(tr.y_true[i]) << ','
                << (std::isfinite(tr.y_hat[i]) ? format_double(tr.y_hat[i]) : "") << ','
                << csv_field(tr.flags[i]) << '\n';
        }
    }
}

std::vector<ForecastTrace> parse_traces_csv(std::string_view text, std::uint64_t* seed) {
    std::vector<ForecastTrace> out;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (seed && line.rfind("# seed=", 0) == 0) {
                *seed = std::stoull(line.substr(7));
            }
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 8) {
            throw InputError("trace rows need 8 fields");
        }
        const int h = std::stoi(f[3]);
        if (out.empty() || out.back().location != f[0] || out.back().model_id != f[1] ||
            out.back().exog_variant != f[2] || out.back().horizon != h) {
            ForecastTrace tr;
            tr.location = f[0];
            tr.model_id = f[1];
            tr.exog_variant = f[2];
            tr.horizon = h;
            out.push_back(std::move(tr));
        }
        auto& tr = out.back();
        tr.dates.push_back(parse_date(f[4]));
        tr.y_true.push_back(parse_double(f[5]));
        tr.y_hat.push_back(f[6].empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : parse_double(f[6]));
        tr.flags.push_back(f[7]);
    }
    return out;
}

int cmd_synth(const PipelineConfig& config, const fs::path& out_dir) {
    config.validate();
    const auto wc = effective_world(config);
    const auto world = generate_world(wc);
    fs::create_directories(out_dir / "downloads");
    {
        auto f = open_out(out_dir / "world_config.json");
        f << world_config_to_json(wc);
    }
    {
        auto f = open_out(out_dir / "world.json");
        f << world_to_json(world);
    }
    const auto panels = sample_replicates(world, wc.replicates);
    for (const auto& p : panels) {
        auto f = open_out(out_dir / "downloads" / (format_date(p.download_date) + ".csv"));
        write_trends_csv(f, p);
    }
    {
        auto f = open_out(out_dir / "panels.csv");
        write_panel_csv(f, panels.front());
    }

    auto spec = config.target;
    spec.seed = derive_seed(config.seed, {hash_string("target"), spec.seed});
    if (spec.drivers.empty()) {
        std::vector<std::size_t> idx(world.components.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            idx[i] = i;
        }
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return world.components[a].epidemic_loading > world.components[b].epidemic_loading;
        });
        for (std::size_t i = 0; i < std::min<std::size_t>(3, idx.size()); ++i) {
            spec.drivers.push_back(world.components[idx[i]].name);
        }
    }
    if (spec.weights.empty()) {
        spec.weights.assign(spec.drivers.size(), 3.0);
    }
    const auto y = generate_target(world, spec);
    auto f = open_out(out_dir / "target.csv");
    seed_line(f, config.seed);
    f << "date,location,value\n";
    for (std::size_t t = 0; t < y.size(); ++t) {
        f << format_date(world.dates[t]) << ',' << csv_field(wc.location) << ','
          << format_double(y[t]) << '\n';
    }
    return 0;
}

int cmd_ingest(std::span<const std::string> files, const std::string& location,
               const fs::path& out_file) {
    if (files.empty()) {
        throw InputError("no input files");
    }
    std::vector<SeriesPanel> panels;
    for (const auto& file : files) {
        std::optional<Date> dl;
        try {
            dl = parse_date(fs::path(file).stem().string());
        } catch (const InputError&) {
        }
        try {
            panels.push_back(parse_trends_csv(read_file(file), location, dl));
        } catch (const InputError& e) {
            throw InputError(file + ": " + e.what());
        }
    }
    if (panels.size() > 1) {
        panels = align_panels(panels).panels;
    }
    if (out_file.has_parent_path()) {
        fs::create_directories(out_file.parent_path());
    }
    auto f = open_out(out_file);
    for (std::size_t i = 0; i < panels.size(); ++i) {
        write_panel_csv(f, panels[i], i == 0);
    }
    return 0;
}

int cmd_preprocess(const PipelineConfig& config, const fs::path& panels_file, StageFlags flags,
                   const std::optional<fs::path>& target_file, const fs::path& out_dir) {
    config.validate();
    const auto panels = read_panels(panels_file);
    std::optional<std::map<std::string, std::pair<std::vector<Date>, Vector>>> targets;
    if (target_file) {
        targets = parse_target_csv(read_file(target_file->string()));
    }
    WorldCache cache;
    for (const auto& panel : panels) {
        const auto train_len = training_weeks(panel.dates, config);
        const auto sampler =
            flags.skip_cluster ? UnionSampler{} : sampler_for(config, panel, cache);
        std::optional<Vector> y;
        if (targets) {
            y = align_target(target_for(*targets, panel.location), panel.dates);
        }
        const auto r = preprocess_panel(panel, train_len, config, flags, sampler,
                                        y ? std::optional<std::span<const double>>(*y)
                                          : std::nullopt);
        write_stage_reports(out_dir / panel.location, r, config.seed, panel.location);
    }
    return 0;
}

int cmd_backtest(const PipelineConfig& config, const fs::path& panels_file,
                 const fs::path& target_file, const fs::path& out_dir) {
    config.validate();
    if (!fs::exists(target_file)) {
        throw InputError("target file " + target_file.string() + " does not exist");
    }
    const auto panels = read_panels(panels_file);
    const auto targets = parse_target_csv(read_file(target_file.string()));
    const auto models = build_registry(config);
    WorldCache cache;
    std::vector<ForecastTrace> traces;
    for (const auto& panel : panels) {
        const auto y = align_target(target_for(targets, panel.location), panel.dates);
        const bool clusters = std::any_of(config.variants.begin(), config.variants.end(),
                                          [](const std::string& v) { return v != "raw"; });
        const auto sampler = clusters ? sampler_for(config, panel, cache) : UnionSampler{};
        auto res = backtest_location(panel, y, config, models, sampler);
        for (const auto& [variant, r] : res.variants) {
            write_stage_reports(out_dir / panel.location / variant, r, config.seed, panel.location);
        }
        traces.insert(traces.end(), res.traces.begin(), res.traces.end());
    }
    fs::create_directories(out_dir / "traces");
    {
        auto f = open_out(out_dir / "traces.csv");
        write_traces_csv(f, traces, config.seed);
    }
    for (const auto& tr : traces) {
        auto f = open_out(out_dir / "traces" /
                          ("trace_" + tr.location + "_" + tr.model_id + "_" +
                           std::to_string(tr.horizon) + "_" + tr.exog_variant + ".csv"));
        write_trace_csv(f, tr);
    }
    const auto report = build_report(traces, config.seed);
    {
        auto f = open_out(out_dir / "report.csv");
        write_report_csv(f, report);
    }
    {
        auto f = open_out(out_dir / "summary.json");
        f << report_summary_json(report);
    }
    std::size_t failed = 0;
    for (const auto& tr : traces) {
        for (const auto& fl : tr.flags) {
            failed += fl.rfind("error:", 0) == 0;
        }
    }
    if (failed > 0) {
        std::cerr << failed << " forecasts failed; see flags in traces.csv\n";
        return 3;
    }
    return 0;
}

int cmd_report(const fs::path& traces_file, SeasonFilter season, const fs::path& out_dir,
               std::size_t fluctuation_window) {
    std::uint64_t seed = 0;
    const auto traces = parse_traces_csv(read_file(traces_file.string()), &seed);
    if (traces.empty()) {
        throw InputError(traces_file.string() + " holds no traces");
    }
    const auto report = build_report(traces, seed, season);
    fs::create_directories(out_dir);
    {
        auto f = open_out(out_dir / "report.csv");
        write_report_csv(f, report);
    }
    {
        auto f = open_out(out_dir / "summary.json");
        f << report_summary_json(report);
    }
    auto f = open_out(out_dir / "fluctuation.csv");
    seed_line(f, seed);
    f << "location,model,horizon,exog_variant,window_end,statistic\n";
    for (const auto& tr : traces) {
        if (tr.exog_variant == kNoExog) {
            continue;
        }
        const auto base = std::find_if(traces.begin(), traces.end(), [&](const ForecastTrace& b) {
            return b.location == tr.location && b.model_id == tr.model_id &&
                   b.horizon == tr.horizon && b.exog_variant == kNoExog;
        });
        if (base == traces.end() || base->dates != tr.dates) {
            continue;
        }
        Vector la, lb;
        std::vector<Date> when;
        for (std::size_t i = 0; i < tr.dates.size(); ++i) {
            if (std::isfinite(tr.y_hat[i]) && std::isfinite(base->y_hat[i])) {
                la.push_back(std::pow(tr.y_true[i] - tr.y_hat[i], 2));
                lb.push_back(std::pow(base->y_true[i] - base->y_hat[i], 2));
                when.push_back(tr.dates[i]);
            }
        }
        if (la.size() < fluctuation_window) {
            continue;
        }
        const auto path = fluctuation_statistic(la, lb, fluctuation_window);
        for (std::size_t j = 0; j < path.size(); ++j) {
            f << csv_field(tr.location) << ',' << csv_field(tr.model_id) << ',' << tr.horizon
              << ',' << csv_field(tr.exog_variant) << ','
              << format_date(when[j + fluctuation_window - 1]) << ',' << format_double(path[j])
              << '\n';
        }
    }
    return 0;
}

}  // namespace trendprep
