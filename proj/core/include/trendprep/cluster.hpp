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

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trendprep {

/// D[i][j] = 1 - pearson(x_i, x_j) over the first `train_len` rows.
/// Throws InputError naming any zero-variance keyword.
Matrix correlation_distance_matrix(const SeriesPanel& panel,
                                   std::optional<std::size_t> train_len = std::nullopt);

/// One agglomeration step. Leaves are ids 0..n-1; merge i creates id n+i.
struct Merge {
    std::size_t a = 0;
    std::size_t b = 0;
    double height = 0.0;
    std::size_t size = 0;
};

struct Dendrogram {
    std::size_t num_leaves = 0;
    std::vector<Merge> merges;
};

/// Ward agglomeration with the Lance-Williams update, treating D as
/// squared Euclidean dissimilarities. Heights are the Lance-Williams
/// values, so two leaves merge at D[0][1]. Ties go to the smallest (i,j).
Dendrogram ward_cluster(const Matrix& distances);

/// Flat labels for k clusters, numbered by smallest member leaf.
std::vector<std::size_t> cut_tree(const Dendrogram& tree, std::size_t k);

/// Sum over clusters of squared Euclidean distances to the cluster mean.
double wcss(std::span<const Vector> series, std::span<const std::size_t> labels);
double wcss(const SeriesPanel& panel, std::span<const std::size_t> labels);

/// Ward objective expressed directly in D: sum_C (1/|C|) sum_{i<j in C} D_ij.
double ward_objective(const Matrix& distances, std::span<const std::size_t> labels);

/// k in 1..size maximizing curve[k-1] - 2 curve[k] + curve[k+1] over
/// interior k; ties to the smallest k. `curve[0]` holds k = 1.
std::size_t elbow_select(std::span<const double> wcss_curve);

/// Series z-scored over their first `train_len` rows.
std::vector<Vector> standardized_rows(const SeriesPanel& panel,
                                      std::optional<std::size_t> train_len = std::nullopt);

/// Boolean "+" query for a group of keywords.
std::string query_string(std::span<const std::string> keywords);

struct ClusterPlan {
    std::vector<std::vector<std::string>> clusters;
    std::vector<std::string> query_strings;
    std::size_t k_selected = 0;
    std::vector<double> wcss_curve;  // index 0 is k = 1
};

struct ClusterOptions {
    std::optional<std::size_t> train_len;
    std::size_t k_cap = 30;
    double dominance = 0.40;
};

/// ward + elbow over every keyword of `panel`.
ClusterPlan cluster_keywords(const SeriesPanel& panel, const ClusterOptions& options = {});

/// Re-clusters, once, any cluster holding more than `dominance` of all
/// clustered keywords.
ClusterPlan split_oversized(const ClusterPlan& plan, const SeriesPanel& panel,
                            double dominance = 0.40, const ClusterOptions& options = {});

enum class CombineMode { ingested_combined, simulated_union, summed };

CombineMode parse_combine_mode(std::string_view text);
std::string to_string(CombineMode mode);

/// Returns the reported series of the union of `keywords`.
using UnionSampler = std::function<Vector(std::span<const std::string> keywords)>;

/// Series standing in for a cluster. `ingested_combined` looks up the
/// "+"-query column in `panel`; `simulated_union` asks `sampler`; `summed`
/// adds the member series.
Vector combine_series(const SeriesPanel& panel, std::span<const std::string> cluster,
                      CombineMode mode, const UnionSampler& sampler = {});

/// Per-replicate combination.
std::vector<Vector> combine_series(const ReplicateStore& store,
                                   std::span<const std::string> cluster, CombineMode mode,
                                   const std::function<UnionSampler(const SeriesPanel&)>&
                                       sampler_for = {});

/// `cluster_id,keyword`
void write_clusters_csv(std::ostream& out, const ClusterPlan& plan);

/// One query per line.
void write_queries_txt(std::ostream& out, const ClusterPlan& plan);

}  // namespace trendprep
