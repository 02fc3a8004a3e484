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

#include "trendprep/triage.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <tuple>

namespace trendprep {

namespace {

std::size_t effective_rows(const SeriesPanel& panel, std::optional<std::size_t> train_len) {
    const auto n = train_len.value_or(panel.num_weeks());
    if (n == 0 || n > panel.num_weeks()) {
        throw InputError("training length " + std::to_string(n) + " outside the panel's " +
                         std::to_string(panel.num_weeks()) + " weeks");
    }
    return n;
}

}  // namespace

DedupResult dedup(const SeriesPanel& panel, double threshold,
                  std::optional<std::size_t> train_len) {
    if (panel.num_keywords() < 2) {
        throw InputError("dedup needs at least two series");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw InputError("dedup threshold must lie in (0,1)");
    }
    const auto rows = effective_rows(panel, train_len);
    const auto n = panel.num_keywords();

    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        const std::span<const double> xi(panel.values[i].data(), rows);
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::span<const double> xj(panel.values[j].data(), rows);
            const auto r = pearson(xi, xj);
            if (r && *r > threshold) {
                // (keep, drop) ordered alphabetically
                const bool i_first = panel.keywords[i] < panel.keywords[j];
                candidates.emplace_back(*r, i_first ? i : j, i_first ? j : i);
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) {
            return std::get<0>(a) > std::get<0>(b);
        }
        const auto& ka = panel.keywords;
        return std::tie(ka[std::get<1>(a)], ka[std::get<2>(a)]) <
               std::tie(ka[std::get<1>(b)], ka[std::get<2>(b)]);
    });

    std::vector<bool> dropped(n, false);
    DedupResult result;
    for (const auto& [r, keep, drop] : candidates) {
        if (dropped[keep] || dropped[drop]) {
            continue;
        }
        dropped[drop] = true;
        result.pairs.push_back({panel.keywords[keep], panel.keywords[drop], r});
    }

    std::vector<std::string> survivors;
    for (std::size_t i = 0; i < n; ++i) {
        if (!dropped[i]) {
            survivors.push_back(panel.keywords[i]);
        }
    }
    result.panel = panel.subset(survivors);
    return result;
}

std::string to_string(TriageClass c) {
    switch (c) {
        case TriageClass::kept:
            return "kept";
        case TriageClass::to_cluster:
            return "cluster";
        case TriageClass::discarded:
            return "discarded";
    }
    return "?";
}

TriagePlan partition(const SeriesPanel& panel, double low, double high) {
    if (!(low > 0.0 && low < high && high < 1.0)) {
        throw InputError("partition thresholds must satisfy 0 < low < high < 1");
    }
    TriagePlan plan;
    for (std::size_t k = 0; k < panel.num_keywords(); ++k) {
        const double zf = zero_fraction(panel.values[k]);
        TriageRow row{panel.keywords[k], zf, TriageClass::kept, {}};
        if (zf < low) {
            plan.kept.push_back(panel.keywords[k]);
        } else if (zf <= high) {
            row.cls = TriageClass::to_cluster;
            plan.to_cluster.push_back(panel.keywords[k]);
        } else {
            row.cls = TriageClass::discarded;
            plan.discarded.push_back(panel.keywords[k]);
        }
        plan.rows.push_back(std::move(row));
    }
    return plan;
}

TriagePlan triage(const SeriesPanel& panel, const TriageOptions& options) {
    if (panel.num_keywords() == 0) {
        throw InputError("triage: empty panel");
    }
    std::vector<DedupPair> pairs;
    const SeriesPanel* survivors = &panel;
    DedupResult deduped;
    if (panel.num_keywords() >= 2) {
        deduped = dedup(panel, options.dedup_threshold, options.train_len);
        pairs = deduped.pairs;
        survivors = &deduped.panel;
    }
    TriagePlan part = partition(*survivors, options.low, options.high);

    std::map<std::string, TriageRow> by_kw;
    for (auto& r : part.rows) {
        by_kw.emplace(r.keyword, r);
    }
    std::map<std::string, std::string> dropped_for;
    for (const auto& p : pairs) {
        dropped_for.emplace(p.dropped, p.kept);
    }

    TriagePlan plan;
    plan.dedup_pairs = std::move(pairs);
    for (std::size_t k = 0; k < panel.num_keywords(); ++k) {
        const auto& kw = panel.keywords[k];
        if (auto it = by_kw.find(kw); it != by_kw.end()) {
            plan.rows.push_back(it->second);
        } else {
            plan.rows.push_back({kw, zero_fraction(panel.values[k]), TriageClass::discarded,
                                 dropped_for.at(kw)});
        }
        const auto& row = plan.rows.back();
        switch (row.cls) {
            case TriageClass::kept:
                plan.kept.push_back(kw);
                break;
            case TriageClass::to_cluster:
                plan.to_cluster.push_back(kw);
                break;
            case TriageClass::discarded:
                plan.discarded.push_back(kw);
                break;
        }
    }
    return plan;
}

void write_triage_report(std::ostream& out, const TriagePlan& plan) {
    out << "keyword,zero_fraction,class,dropped_for\n";
    for (const auto& r : plan.rows) {
        out << csv_field(r.keyword) << ',' << format_double(r.zero_fraction) << ','
            << to_string(r.cls) << ',' << csv_field(r.dropped_for) << '\n';
    }
}

}  // namespace trendprep
