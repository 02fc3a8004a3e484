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

#include "trendprep/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "json.hpp"

namespace trendprep {

namespace {

using std::chrono::days;

std::uint64_t day_key(Date d) {
    return static_cast<std::uint64_t>(d.time_since_epoch().count());
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) {
        throw InputError(field + " " + what);
    }
}

double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::string to_string(TrendFamily f) {
    switch (f) {
        case TrendFamily::flat: return "flat";
        case TrendFamily::linear: return "linear";
        case TrendFamily::quadratic: return "quadratic";
        case TrendFamily::random_walk: return "random_walk";
    }
    return "flat";
}

TrendFamily parse_trend_family(std::string_view s) {
    if (s == "flat") return TrendFamily::flat;
    if (s == "linear") return TrendFamily::linear;
    if (s == "quadratic") return TrendFamily::quadratic;
    if (s == "random_walk") return TrendFamily::random_walk;
    throw InputError("unknown trend family '" + std::string(s) + "'");
}

void validate_world_config(const WorldConfig& c) {
    require(c.weeks >= 2, "world.weeks", "must be at least 2");
    require(std::chrono::weekday{c.start} == std::chrono::Sunday, "world.start",
            "must be a Sunday");
    require(c.keywords.empty() ? c.num_keywords >= 1 : true, "world.num_keywords",
            "must be at least 1");
    require(std::isfinite(c.population) && c.population >= 1.0, "world.population",
            "must be at least 1");
    require(std::isfinite(c.population_growth) &&
                1.0 + c.population_growth * static_cast<double>(c.weeks - 1) > 0.0,
            "world.population_growth", "drives the population below zero");
    require(c.sample_size >= 1, "world.sample_size", "must be at least 1");
    require(std::isfinite(c.privacy_threshold) && c.privacy_threshold >= 0.0,
            "world.privacy_threshold", "must be a nonnegative count");
    require(c.replicates >= 1, "world.replicates", "must be at least 1");
    require(c.default_overlap >= 0.0 && c.default_overlap <= 1.0, "world.default_overlap",
            "must lie in [0,1]");
    for (const auto& o : c.overlaps) {
        require(o.fraction >= 0.0 && o.fraction <= 1.0, "world.overlaps." + o.a + "+" + o.b,
                "must lie in [0,1]");
    }
    const auto& p = c.prior;
    require(p.base_min > 0.0 && p.base_max >= p.base_min, "world.prior.base_min/base_max",
            "must satisfy 0 < base_min <= base_max");
    double wsum = 0.0;
    for (double w : p.family_weights) {
        require(w >= 0.0, "world.prior.family_weights", "must be nonnegative");
        wsum += w;
    }
    require(wsum > 0.0, "world.prior.family_weights", "must not all be zero");
    require(p.trend_strength >= 0.0, "world.prior.trend_strength", "must be nonnegative");
    require(p.seasonal_max >= 0.0 && p.seasonal_max < 1.0, "world.prior.seasonal_max",
            "must lie in [0,1)");
    require(p.epidemic_probability >= 0.0 && p.epidemic_probability <= 1.0,
            "world.prior.epidemic_probability", "must lie in [0,1]");
    require(p.epidemic_max >= 0.0, "world.prior.epidemic_max", "must be nonnegative");
    require(p.noise_max >= 0.0, "world.prior.noise_max", "must be nonnegative");
    std::set<std::string> names;
    for (const auto& k : c.keywords) {
        const auto field = "world.keywords." + k.name;
        require(!k.name.empty(), "world.keywords", "entries need a name");
        require(names.insert(k.name).second, field, "is duplicated");
        require(k.base >= 0.0, field + ".base", "must be nonnegative");
        require(k.walk_scale >= 0.0, field + ".walk_scale", "must be nonnegative");
        require(k.noise_scale >= 0.0, field + ".noise_scale", "must be nonnegative");
    }
}

Vector epidemic_curve(std::size_t weeks, Date start, std::uint64_t seed) {
    using namespace std::chrono;
    Vector curve(weeks, 0.0);
    const auto first = year_month_day{start}.year();
    const auto last = year_month_day{start + days(7 * static_cast<int>(weeks))}.year();
    for (auto y = first; y <= last + years(1); ++y) {
        Rng rng(derive_seed(seed, {hash_string("epidemic"), static_cast<std::uint64_t>(int(y))}));
        const double shift = 8.0 * rng.uniform() - 4.0;
        const double width = 2.5 + 2.5 * rng.uniform();
        const double height = 0.5 + rng.uniform();
        const Date peak = sys_days{y / January / 20};
        const double peak_week = static_cast<double>((peak - start).count()) / 7.0 + shift;
        for (std::size_t t = 0; t < weeks; ++t) {
            const double z = (static_cast<double>(t) - peak_week) / width;
            if (std::abs(z) < 8.0) {
                curve[t] += height * std::exp(-0.5 * z * z);
            }
        }
    }
    return curve;
}

std::size_t LatentWorld::index_of(std::string_view keyword) const {
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (components[i].name == keyword) {
            return i;
        }
    }
    throw InputError("keyword '" + std::string(keyword) + "' is not in the world");
}

double LatentWorld::overlap(std::string_view a, std::string_view b) const {
    for (const auto& o : config.overlaps) {
        if ((o.a == a && o.b == b) || (o.a == b && o.b == a)) {
            return o.fraction;
        }
    }
    return a == b ? 1.0 : config.default_overlap;
}

namespace {

std::vector<KeywordSpec> draw_keywords(const WorldConfig& c) {
    const auto& p = c.prior;
    Rng rng(derive_seed(c.seed, {hash_string("keywords")}));
    const double span = static_cast<double>(c.weeks - 1);
    double wsum = 0.0;
    for (double w : p.family_weights) {
        wsum += w;
    }
    std::vector<KeywordSpec> out;
    for (std::size_t i = 0; i < c.num_keywords; ++i) {
        KeywordSpec k;
        char name[32];
        std::snprintf(name, sizeof name, "term_%03zu", i);
        k.name = name;
        k.base = std::exp(std::log(p.base_min) +
                          rng.uniform() * (std::log(p.base_max) - std::log(p.base_min)));
        double u = rng.uniform() * wsum;
        int fam = 0;
        while (fam < 3 && u >= p.family_weights[fam]) {
            u -= p.family_weights[fam];
            ++fam;
        }
        k.family = static_cast<TrendFamily>(fam);
        const double magnitude = p.trend_strength * (0.3 + 0.7 * rng.uniform());
        const double change = rng.uniform() < 0.7 ? magnitude : -std::min(0.7, magnitude);
        switch (k.family) {
            case TrendFamily::flat: break;
            case TrendFamily::linear: k.slope = k.base * change / span; break;
            case TrendFamily::quadratic: k.quadratic = k.base * change / (span * span); break;
            case TrendFamily::random_walk:
                k.walk_scale = k.base * magnitude / std::sqrt(span) / 2.0;
                break;
        }
        k.seasonal_amplitude = p.seasonal_max * rng.uniform();
        k.seasonal_phase = 52.0 * rng.uniform();
        if (rng.uniform() < p.epidemic_probability) {
            k.epidemic_loading = p.epidemic_max * (0.2 + 0.8 * rng.uniform());
        }
        k.noise_scale = k.base * p.noise_max * rng.uniform();
        out.push_back(std::move(k));
    }
    return out;
}

}  // namespace

LatentWorld generate_world(const WorldConfig& config) {
    validate_world_config(config);
    LatentWorld w;
    w.config = config;
    w.sample_size = config.sample_size;
    const auto T = config.weeks;
    for (std::size_t t = 0; t < T; ++t) {
        w.dates.push_back(config.start + days(7 * static_cast<int>(t)));
        const double N = config.population * (1.0 + config.population_growth * static_cast<double>(t));
        w.population.push_back(static_cast<std::uint64_t>(std::llround(N)));
    }
    if (*std::min_element(w.population.begin(), w.population.end()) < config.sample_size) {
        throw InputError("world.sample_size exceeds the smallest weekly population");
    }
    w.privacy_threshold.assign(T, config.privacy_threshold);
    w.epidemic = epidemic_curve(T, config.start, config.seed);
    w.components = config.keywords.empty() ? draw_keywords(config) : config.keywords;

    for (const auto& k : w.components) {
        Rng rng(derive_seed(config.seed, {hash_string("latent"), hash_string(k.name)}));
        std::vector<std::uint64_t> K(T);
        double walk = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            const double td = static_cast<double>(t);
            if (t > 0 && k.walk_scale > 0.0) {
                walk += k.walk_scale * rng.normal();
            }
            const double seasonal =
                k.seasonal_amplitude *
                std::cos(2.0 * std::numbers::pi * (td - k.seasonal_phase) / 52.0);
            double v = k.base * (1.0 + seasonal + k.epidemic_loading * w.epidemic[t]) +
                       k.slope * td + k.quadratic * td * td + walk;
            if (k.noise_scale > 0.0) {
                v += k.noise_scale * rng.normal();
            }
            const auto c = static_cast<std::uint64_t>(std::llround(std::max(0.0, v)));
            if (c > w.population[t]) {
                throw InputError("keyword '" + k.name + "' exceeds the population in week " +
                                 format_date(w.dates[t]));
            }
            K[t] = c;
        }
        w.counts.push_back(std::move(K));
    }
    return w;
}

std::uint64_t sample_hypergeometric(Rng& rng, std::uint64_t population, std::uint64_t successes,
                                    std::uint64_t draws) {
    if (successes > population || draws > population) {
        throw InputError("hypergeometric parameters out of range");
    }
    const std::uint64_t failures = population - successes;
    const std::uint64_t lo = draws > failures ? draws - failures : 0;
    const std::uint64_t hi = std::min(draws, successes);
    if (lo == hi) {
        return lo;
    }
    const double N = static_cast<double>(population);
    const double K = static_cast<double>(successes);
    const double n = static_cast<double>(draws);
    auto mode = static_cast<std::uint64_t>(std::floor((n + 1.0) * (K + 1.0) / (N + 2.0)));
    mode = std::clamp(mode, lo, hi);
    const double m = static_cast<double>(mode);
    const double p_mode =
        std::exp(log_choose(K, m) + log_choose(N - K, n - m) - log_choose(N, n));

    // Visit the support in decreasing pmf order, which for a unimodal pmf
    // means stepping to whichever neighbour of the visited block is larger.
    const double u = rng.uniform();
    double cum = p_mode;
    if (u < cum) {
        return mode;
    }
    std::uint64_t up = mode, down = mode;
    double p_up = p_mode, p_down = p_mode;
    auto next_up = [&] {
        const double k = static_cast<double>(up);
        return p_up * (K - k) * (n - k) / ((k + 1.0) * (N - K - n + k + 1.0));
    };
    auto next_down = [&] {
        const double k = static_cast<double>(down);
        return p_down * k * (N - K - n + k) / ((K - k + 1.0) * (n - k + 1.0));
    };
    double cand_up = up < hi ? next_up() : -1.0;
    double cand_down = down > lo ? next_down() : -1.0;
    std::uint64_t last = mode;
    while (cand_up > 0.0 || cand_down > 0.0) {
        if (cand_up >= cand_down) {
            ++up;
            p_up = cand_up;
            cum += p_up;
            last = up;
            cand_up = up < hi ? next_up() : -1.0;
        } else {
            --down;
            p_down = cand_down;
            cum += p_down;
            last = down;
            cand_down = down > lo ? next_down() : -1.0;
        }
        if (u < cum) {
            return last;
        }
    }
    return last;
}

std::vector<std::uint64_t> sample_counts(const LatentWorld& world,
                                         std::span<const std::uint64_t> latent, Date download_date,
                                         std::string_view stream_key) {
    if (latent.size() != world.population.size()) {
        throw InputError("latent series does not match the world's weeks");
    }
    Rng rng(derive_seed(world.config.seed,
                        {hash_string("download"), day_key(download_date), hash_string(stream_key)}));
    std::vector<std::uint64_t> k(latent.size());
    for (std::size_t t = 0; t < latent.size(); ++t) {
        if (world.sample_size > world.population[t]) {
            throw InputError("sample size exceeds the population in week " +
                             format_date(world.dates[t]));
        }
        k[t] = sample_hypergeometric(rng, world.population[t], latent[t], world.sample_size);
    }
    return k;
}

Vector report_series(const LatentWorld& world, std::span<const std::uint64_t> latent,
                     std::span<const std::uint64_t> sampled) {
    const auto T = latent.size();
    Vector out(T, 0.0);
    std::size_t ref = 0;
    double best = -1.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double ratio =
            static_cast<double>(latent[t]) / static_cast<double>(world.population[t]);
        if (ratio > best) {
            best = ratio;
            ref = t;
        }
    }
    if (latent[ref] == 0) {
        return out;
    }
    const double scale =
        static_cast<double>(latent[ref]) / static_cast<double>(world.population[ref]);
    const double n = static_cast<double>(world.sample_size);
    Vector r(T, 0.0);
    double rmax = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        if (static_cast<double>(sampled[t]) < world.privacy_threshold[t] || sampled[t] == 0) {
            continue;
        }
        r[t] = (static_cast<double>(sampled[t]) / n) / scale;
        rmax = std::max(rmax, r[t]);
    }
    if (rmax <= 0.0) {
        return out;
    }
    for (std::size_t t = 0; t < T; ++t) {
        out[t] = std::clamp(std::round(100.0 * r[t] / rmax), 0.0, 100.0);
    }
    return out;
}

SeriesPanel sample_download(const LatentWorld& world, Date download_date) {
    SeriesPanel p;
    p.location = world.config.location;
    p.dates = world.dates;
    p.download_date = download_date;
    for (std::size_t i = 0; i < world.components.size(); ++i) {
        const auto& name = world.components[i].name;
        const auto k = sample_counts(world, world.counts[i], download_date, name);
        p.keywords.push_back(name);
        p.values.push_back(report_series(world, world.counts[i], k));
    }
    return p;
}

std::vector<SeriesPanel> sample_replicates(const LatentWorld& world, std::size_t replicates) {
    std::vector<SeriesPanel> out;
    const Date first = world.dates.back() + days(7);
    for (std::size_t r = 0; r < replicates; ++r) {
        out.push_back(sample_download(world, first + days(static_cast<int>(r))));
    }
    return out;
}

std::vector<std::uint64_t> union_volume(const LatentWorld& world,
                                        std::span<const std::string> keywords) {
    if (keywords.empty()) {
        throw InputError("union of no keywords");
    }
    std::vector<std::size_t> idx;
    for (const auto& k : keywords) {
        idx.push_back(world.index_of(k));
    }
    const auto T = world.dates.size();
    std::vector<std::uint64_t> out(T);
    for (std::size_t t = 0; t < T; ++t) {
        double v = 0.0;
        for (std::size_t a = 0; a < idx.size(); ++a) {
            v += static_cast<double>(world.counts[idx[a]][t]);
            for (std::size_t b = a + 1; b < idx.size(); ++b) {
                const double o = world.overlap(keywords[a], keywords[b]);
                v -= o * static_cast<double>(
                             std::min(world.counts[idx[a]][t], world.counts[idx[b]][t]));
            }
        }
        if (v < -1e-9) {
            throw InputError("overlap fractions imply a negative union in week " +
                             format_date(world.dates[t]));
        }
        out[t] = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::llround(std::max(0.0, v))),
                                         world.population[t]);
    }
    return out;
}

Vector sample_union(const LatentWorld& world, std::span<const std::string> keywords,
                    Date download_date) {
    const auto K = union_volume(world, keywords);
    std::string key;
    for (const auto& k : keywords) {
        key += key.empty() ? k : " + " + k;
    }
    return report_series(world, K, sample_counts(world, K, download_date, key));
}

LatentWorld regime_shift(const LatentWorld& world, Date date, double zero_inflation_factor) {
    if (!(zero_inflation_factor >= 1.0)) {
        throw InputError("zero inflation factor must be at least 1");
    }
    if (world.dates.empty() || date < world.dates.front()) {
        throw InputError("regime shift date precedes the world");
    }
    LatentWorld out = world;
    for (std::size_t t = 0; t < out.dates.size(); ++t) {
        if (out.dates[t] >= date) {
            out.privacy_threshold[t] *= zero_inflation_factor;
        }
    }
    return out;
}

Vector generate_target(const LatentWorld& world, const TargetSpec& spec) {
    if (spec.drivers.size() != spec.weights.size()) {
        throw InputError("target drivers and weights differ in length");
    }
    if (!(std::abs(spec.ar_phi) < 1.0) || spec.noise_sd < 0.0) {
        throw InputError("target noise must be stationary with nonnegative scale");
    }
    const auto T = world.dates.size();
    Vector y(T, spec.intercept);
    for (std::size_t j = 0; j < spec.drivers.size(); ++j) {
        const auto& K = world.counts[world.index_of(spec.drivers[j])];
        double m = 0.0;
        for (auto v : K) {
            m += static_cast<double>(v);
        }
        m /= static_cast<double>(T);
        if (m <= 0.0) {
            throw InputError("target driver '" + spec.drivers[j] + "' is identically zero");
        }
        for (std::size_t t = 0; t < T; ++t) {
            y[t] += spec.weights[j] * static_cast<double>(K[t]) / m;
        }
    }
    Rng rng(derive_seed(spec.seed, {hash_string("target")}));
    double e = spec.noise_sd / std::sqrt(1.0 - spec.ar_phi * spec.ar_phi) * rng.normal();
    for (std::size_t t = 0; t < T; ++t) {
        if (t > 0) {
            e = spec.ar_phi * e + spec.noise_sd * rng.normal();
        }
        y[t] += e;
    }
    return y;
}

// JSON

namespace {

using nlohmann::ordered_json;

void check_keys(const ordered_json& j, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
        throw InputError(where + " must be an object");
    }
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw InputError(where + "." + key + " is not a recognized field");
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

WorldConfig world_config_from_json(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("world config is not valid JSON: ") + e.what());
    }
    const std::string w = "world";
    check_keys(j, w,
               {"seed", "location", "start", "weeks", "num_keywords", "population",
                "population_growth", "sample_size", "privacy_threshold", "replicates",
                "default_overlap", "overlaps", "prior", "keywords"});
    WorldConfig c;
    read(j, "seed", w, c.seed);
    read(j, "location", w, c.location);
    if (j.contains("start")) {
        std::string s;
        read(j, "start", w, s);
        try {
            c.start = parse_date(s);
        } catch (const InputError&) {
            throw InputError("world.start is not a YYYY-MM-DD date");
        }
    }
    read(j, "weeks", w, c.weeks);
    read(j, "num_keywords", w, c.num_keywords);
    read(j, "population", w, c.population);
    read(j, "population_growth", w, c.population_growth);
    read(j, "sample_size", w, c.sample_size);
    read(j, "privacy_threshold", w, c.privacy_threshold);
    read(j, "replicates", w, c.replicates);
    read(j, "default_overlap", w, c.default_overlap);
    if (j.contains("overlaps")) {
        for (const auto& o : j.at("overlaps")) {
            check_keys(o, "world.overlaps[]", {"a", "b", "fraction"});
            OverlapSpec s;
            read(o, "a", "world.overlaps[]", s.a);
            read(o, "b", "world.overlaps[]", s.b);
            read(o, "fraction", "world.overlaps[]", s.fraction);
            c.overlaps.push_back(s);
        }
    }
    if (j.contains("prior")) {
        const auto& p = j.at("prior");
        const std::string pw = "world.prior";
        check_keys(p, pw,
                   {"base_min", "base_max", "family_weights", "trend_strength", "seasonal_max",
                    "epidemic_probability", "epidemic_max", "noise_max"});
        read(p, "base_min", pw, c.prior.base_min);
        read(p, "base_max", pw, c.prior.base_max);
        if (p.contains("family_weights")) {
            std::vector<double> fw;
            read(p, "family_weights", pw, fw);
            if (fw.size() != 4) {
                throw InputError("world.prior.family_weights needs 4 entries");
            }
            std::copy(fw.begin(), fw.end(), c.prior.family_weights);
        }
        read(p, "trend_strength", pw, c.prior.trend_strength);
        read(p, "seasonal_max", pw, c.prior.seasonal_max);
        read(p, "epidemic_probability", pw, c.prior.epidemic_probability);
        read(p, "epidemic_max", pw, c.prior.epidemic_max);
        read(p, "noise_max", pw, c.prior.noise_max);
    }
    if (j.contains("keywords")) {
        for (const auto& k : j.at("keywords")) {
            const std::string kw = "world.keywords[]";
            check_keys(k, kw,
                       {"name", "family", "base", "slope", "quadratic", "walk_scale",
                        "seasonal_amplitude", "seasonal_phase", "epidemic_loading",
                        "noise_scale"});
            KeywordSpec s;
            read(k, "name", kw, s.name);
            std::string fam = "flat";
            read(k, "family", kw, fam);
            s.family = parse_trend_family(fam);
            read(k, "base", kw, s.base);
            read(k, "slope", kw, s.slope);
            read(k, "quadratic", kw, s.quadratic);
            read(k, "walk_scale", kw, s.walk_scale);
            read(k, "seasonal_amplitude", kw, s.seasonal_amplitude);
            read(k, "seasonal_phase", kw, s.seasonal_phase);
            read(k, "epidemic_loading", kw, s.epidemic_loading);
            read(k, "noise_scale", kw, s.noise_scale);
            c.keywords.push_back(std::move(s));
        }
    }
    validate_world_config(c);
    return c;
}

namespace {

ordered_json keyword_json(const KeywordSpec& k) {
    ordered_json o;
    o["name"] = k.name;
    o["family"] = to_string(k.family);
    o["base"] = k.base;
    o["slope"] = k.slope;
    o["quadratic"] = k.quadratic;
    o["walk_scale"] = k.walk_scale;
    o["seasonal_amplitude"] = k.seasonal_amplitude;
    o["seasonal_phase"] = k.seasonal_phase;
    o["epidemic_loading"] = k.epidemic_loading;
    o["noise_scale"] = k.noise_scale;
    return o;
}

ordered_json config_json(const WorldConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["location"] = c.location;
    j["start"] = format_date(c.start);
    j["weeks"] = c.weeks;
    j["num_keywords"] = c.num_keywords;
    j["population"] = c.population;
    j["population_growth"] = c.population_growth;
    j["sample_size"] = c.sample_size;
    j["privacy_threshold"] = c.privacy_threshold;
    j["replicates"] = c.replicates;
    j["default_overlap"] = c.default_overlap;
    j["overlaps"] = ordered_json::array();
    for (const auto& o : c.overlaps) {
        j["overlaps"].push_back({{"a", o.a}, {"b", o.b}, {"fraction", o.fraction}});
    }
    const auto& p = c.prior;
    j["prior"] = {{"base_min", p.base_min},
                  {"base_max", p.base_max},
                  {"family_weights", std::vector<double>(std::begin(p.family_weights),
                                                         std::end(p.family_weights))},
                  {"trend_strength", p.trend_strength},
                  {"seasonal_max", p.seasonal_max},
                  {"epidemic_probability", p.epidemic_probability},
                  {"epidemic_max", p.epidemic_max},
                  {"noise_max", p.noise_max}};
    j["keywords"] = ordered_json::array();
    for (const auto& k : c.keywords) {
        j["keywords"].push_back(keyword_json(k));
    }
    return j;
}

}  // namespace

std::string world_config_to_json(const WorldConfig& config) {
    return config_json(config).dump(2) + "\n";
}

std::string world_to_json(const LatentWorld& world) {
    ordered_json j;
    j["config"] = config_json(world.config);
    j["sample_size"] = world.sample_size;
    j["dates"] = ordered_json::array();
    for (auto d : world.dates) {
        j["dates"].push_back(format_date(d));
    }
    j["population"] = world.population;
    j["privacy_threshold"] = world.privacy_threshold;
    j["epidemic"] = world.epidemic;
    j["keywords"] = ordered_json::array();
    for (std::size_t i = 0; i < world.components.size(); ++i) {
        auto k = keyword_json(world.components[i]);
        k["counts"] = world.counts[i];
        j["keywords"].push_back(k);
    }
    return j.dump() + "\n";
}

}  // namespace trendprep
