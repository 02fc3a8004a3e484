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

#include "trendprep/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace trendprep {

namespace {

std::size_t rows_for(const SeriesPanel& panel, std::optional<std::size_t> train_len) {
    const auto n = train_len.value_or(panel.num_weeks());
    if (n < 2 || n > panel.num_weeks()) {
        throw InputError("training length " + std::to_string(n) + " invalid for a panel of " +
                         std::to_string(panel.num_weeks()) + " weeks");
    }
    return n;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
};

}  // namespace

Matrix correlation_distance_matrix(const SeriesPanel& panel,
                                   std::optional<std::size_t> train_len) {
    const auto n = panel.num_keywords();
    if (n < 2) {
        throw InputError("correlation distance needs at least two series");
    }
    const auto rows = rows_for(panel, train_len);
    for (std::size_t i = 0; i < n; ++i) {
        const std::span<const double> x(panel.values[i].data(), rows);
        if (!pearson(x, x)) {
            throw InputError("zero-variance series '" + panel.keywords[i] +
                             "' over the training window");
        }
    }
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto r = pearson(std::span<const double>(panel.values[i].data(), rows),
                                   std::span<const double>(panel.values[j].data(), rows));
            d(i, j) = d(j, i) = 1.0 - *r;
        }
    }
    return d;
}

Dendrogram ward_cluster(const Matrix& distances) {
    const auto n = distances.rows();
    if (distances.cols() != n || n == 0) {
        throw InputError("distance matrix must be square and non-empty");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(distances(i, i)) > 1e-12) {
            throw InputError("distance matrix diagonal must be zero");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = distances(i, j);
            const double b = distances(j, i);
            if (!std::isfinite(a) || a < 0.0) {
                throw InputError("distance matrix has a negative or non-finite entry");
            }
            if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
                throw InputError("distance matrix is not symmetric");
            }
        }
    }

    Matrix d = distances;
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);

    Dendrogram tree;
    tree.num_leaves = n;
    double last = 0.0;
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t bi = 0;
        std::size_t bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) {
                continue;
            }
            for (std::size_t j = i + 1; j < n; ++j) {
                if (active[j] && d(i, j) < best) {
                    best = d(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        const double ni = static_cast<double>(size[bi]);
        const double nj = static_cast<double>(size[bj]);
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj) {
                continue;
            }
            const double nk = static_cast<double>(size[k]);
            const double updated =
                ((ni + nk) * d(k, bi) + (nj + nk) * d(k, bj) - nk * best) / (ni + nj + nk);
            d(k, bi) = d(bi, k) = updated;
        }
        // Ward is reducible, so heights only drift downward by round-off.
        const double height = std::max(best, last);
        last = height;
        tree.merges.push_back({std::min(id[bi], id[bj]), std::max(id[bi], id[bj]), height,
                               size[bi] + size[bj]});
        size[bi] += size[bj];
        id[bi] = n + step;
        active[bj] = false;
    }
    return tree;
}

std::vector<std::size_t> cut_tree(const Dendrogram& tree, std::size_t k) {
    const auto n = tree.num_leaves;
    if (k == 0 || k > n) {
        throw InputError("cannot cut " + std::to_string(n) + " leaves into " +
                         std::to_string(k) + " clusters");
    }
    UnionFind uf(n);
    // representative leaf of every cluster id
    std::vector<std::size_t> rep(n + tree.merges.size());
    std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), 0);
    for (std::size_t m = 0; m < tree.merges.size(); ++m) {
        const auto ra = uf.find(rep[tree.merges[m].a]);
        const auto rb = uf.find(rep[tree.merges[m].b]);
        if (m < n - k) {
            uf.parent[std::max(ra, rb)] = std::min(ra, rb);
        }
        rep[n + m] = std::min(ra, rb);
    }
    std::vector<std::size_t> labels(n);
    std::vector<std::size_t> root_label(n, std::numeric_limits<std::size_t>::max());
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = uf.find(i);
        if (root_label[r] == std::numeric_limits<std::size_t>::max()) {
            root_label[r] = next++;
        }
        labels[i] = root_label[r];
    }
    return labels;
}

double wcss(std::span<const Vector> series, std::span<const std::size_t> labels) {
    if (labels.empty() || labels.size() != series.size()) {
        throw InputError("wcss: every series needs a cluster label");
    }
    const auto k = *std::max_element(labels.begin(), labels.end()) + 1;
    const auto len = series.front().size();
    std::vector<Vector> centers(k, Vector(len, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].size() != len) {
            throw InputError("wcss: series lengths differ");
        }
        ++counts[labels[i]];
        for (std::size_t t = 0; t < len; ++t) {
            centers[labels[i]][t] += series[i][t];
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
            continue;
        }
        for (auto& v : centers[c]) {
            v /= static_cast<double>(counts[c]);
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& c = centers[labels[i]];
        for (std::size_t t = 0; t < len; ++t) {
            const double e = series[i][t] - c[t];
            total += e * e;
        }
    }
    return total;
}

double wcss(const SeriesPanel& panel, std::span<const std::size_t> labels) {
    return wcss(std::span<const Vector>(panel.values), labels);
}

double ward_objective(const Matrix& distances, std::span<const std::size_t> labels) {
    if (labels.size() != distances.rows()) {
        throw InputError("ward_objective: label count mismatch");
    }
    const auto k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<double> within(k, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ++counts[labels[i]];
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            if (labels[i] == labels[j]) {
                within[labels[i]] += distances(i, j);
            }
        }
    }
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) {
            total += within[c] / static_cast<double>(counts[c]);
        }
    }
    return total;
}

std::size_t elbow_select(std::span<const double> wcss_curve) {
    if (wcss_curve.size() < 3) {
        throw InputError("elbow selection needs at least three WCSS values");
    }
    for (std::size_t i = 1; i < wcss_curve.size(); ++i) {
        const double tol = 1e-9 * std::max(1.0, std::abs(wcss_curve[i - 1]));
        if (wcss_curve[i] > wcss_curve[i - 1] + tol) {
            throw InputError("WCSS curve must be non-increasing in k");
        }
    }
    std::size_t best_k = 2;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < wcss_curve.size(); ++i) {
        const double second = wcss_curve[i - 1] - 2.0 * wcss_curve[i] + wcss_curve[i + 1];
        if (second > best) {
            best = second;
            best_k = i + 1;
        }
    }
    return best_k;
}

std::vector<Vector> standardized_rows(const SeriesPanel& panel,
                                      std::optional<std::size_t> train_len) {
    const auto rows = rows_for(panel, train_len);
    std::vector<Vector> out;
    out.reserve(panel.num_keywords());
    for (std::size_t k = 0; k < panel.num_keywords(); ++k) {
        const std::span<const double> x(panel.values[k].data(), rows);
        const double m = mean(x);
        const double sd = std::sqrt(variance(x, 0));
        Vector z(rows);
        for (std::size_t t = 0; t < rows; ++t) {
            z[t] = sd > 0.0 ? (x[t] - m) / sd : 0.0;
        }
        out.push_back(std::move(z));
    }
    return out;
}

std::string query_string(std::span<const std::string> keywords) {
    std::string out;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        if (i > 0) {
            out += " + ";
        }
        out += keywords[i];
    }
    return out;
}

ClusterPlan cluster_keywords(const SeriesPanel& panel, const ClusterOptions& options) {
    ClusterPlan plan;
    const auto n = panel.num_keywords();
    if (n == 0) {
        return plan;
    }
    if (n <= 2) {
        plan.clusters.push_back(panel.keywords);
        plan.k_selected = 1;
        const std::vector<std::size_t> one(n, 0);
        plan.wcss_curve.push_back(wcss(standardized_rows(panel, options.train_len), one));
        plan.query_strings.push_back(query_string(panel.keywords));
        return plan;
    }

    const auto distances = correlation_distance_matrix(panel, options.train_len);
    const auto tree = ward_cluster(distances);
    const auto z = standardized_rows(panel, options.train_len);

    const auto third = (n + 2) / 3;
    const auto k_max = std::min(n, std::max<std::size_t>(3, std::min(options.k_cap, third)));
    std::vector<std::vector<std::size_t>> cuts;
    for (std::size_t k = 1; k <= k_max; ++k) {
        cuts.push_back(cut_tree(tree, k));
        plan.wcss_curve.push_back(wcss(z, cuts.back()));
    }
    plan.k_selected = elbow_select(plan.wcss_curve);
    const auto& labels = cuts[plan.k_selected - 1];
    plan.clusters.assign(plan.k_selected, {});
    for (std::size_t i = 0; i < n; ++i) {
        plan.clusters[labels[i]].push_back(panel.keywords[i]);
    }
    for (const auto& c : plan.clusters) {
        plan.query_strings.push_back(query_string(c));
    }
    return plan;
}

ClusterPlan split_oversized(const ClusterPlan& plan, const SeriesPanel& panel, double dominance,
                            const ClusterOptions& options) {
    std::size_t total = 0;
    for (const auto& c : plan.clusters) {
        total += c.size();
    }
    ClusterPlan out = plan;
    out.clusters.clear();
    out.query_strings.clear();
    for (const auto& c : plan.clusters) {
        const bool dominant = static_cast<double>(c.size()) > dominance * static_cast<double>(total);
        if (dominant && c.size() >= 3) {
            const auto sub = cluster_keywords(panel.subset(c), options);
            for (const auto& s : sub.clusters) {
                out.clusters.push_back(s);
            }
        } else {
            out.clusters.push_back(c);
        }
    }
    for (const auto& c : out.clusters) {
        out.query_strings.push_back(query_string(c));
    }
    out.k_selected = out.clusters.size();
    return out;
}

CombineMode parse_combine_mode(std::string_view text) {
    if (text == "ingested-combined") {
        return CombineMode::ingested_combined;
    }
    if (text == "simulated-union") {
        return CombineMode::simulated_union;
    }
    if (text == "summed") {
        return CombineMode::summed;
    }
    throw InputError("unknown combine mode '" + std::string(text) + "'");
}

std::string to_string(CombineMode mode) {
    switch (mode) {
        case CombineMode::ingested_combined:
            return "ingested-combined";
        case CombineMode::simulated_union:
            return "simulated-union";
        case CombineMode::summed:
            return "summed";
    }
    return "?";
}

Vector combine_series(const SeriesPanel& panel, std::span<const std::string> cluster,
                      CombineMode mode, const UnionSampler& sampler) {
    if (cluster.empty()) {
        throw InputError("cannot combine an empty cluster");
    }
    switch (mode) {
        case CombineMode::summed: {
            Vector sum(panel.num_weeks(), 0.0);
            for (const auto& kw : cluster) {
                const auto s = panel.series(kw);
                for (std::size_t t = 0; t < sum.size(); ++t) {
                    sum[t] += s[t];
                }
            }
            return sum;
        }
        case CombineMode::ingested_combined: {
            const auto q = query_string(cluster);
            const auto idx = panel.index_of(q);
            if (!idx) {
                throw InputError("no combined download on file for query '" + q + "'");
            }
            return panel.values[*idx];
        }
        case CombineMode::simulated_union: {
            if (!sampler) {
                throw InputError("simulated-union mode needs a union sampler");
            }
            auto s = sampler(cluster);
            if (s.size() != panel.num_weeks()) {
                throw InputError("union sampler returned a series off the panel's date grid");
            }
            return s;
        }
    }
    throw InputError("unknown combine mode");
}

std::vector<Vector> combine_series(const ReplicateStore& store,
                                   std::span<const std::string> cluster, CombineMode mode,
                                   const std::function<UnionSampler(const SeriesPanel&)>& sampler_for) {
    std::vector<Vector> out;
    for (const auto& p : store.panels) {
        out.push_back(combine_series(p, cluster, mode, sampler_for ? sampler_for(p) : UnionSampler{}));
    }
    return out;
}

void write_clusters_csv(std::ostream& out, const ClusterPlan& plan) {
    out << "cluster_id,keyword\n";
    for (std::size_t c = 0; c < plan.clusters.size(); ++c) {
        for (const auto& kw : plan.clusters[c]) {
            out << c << ',' << csv_field(kw) << '\n';
        }
    }
}

void write_queries_txt(std::ostream& out, const ClusterPlan& plan) {
    for (const auto& q : plan.query_strings) {
        out << q << '\n';
    }
}

}  // namespace trendprep
