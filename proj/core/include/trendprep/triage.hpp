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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace trendprep {

struct DedupPair {
    std::string kept;
    std::string dropped;
    double correlation = 0.0;
};

struct DedupResult {
    SeriesPanel panel;
    std::vector<DedupPair> pairs;
};

/// Drops one member of every pair whose Pearson correlation over the first
/// `train_len` rows exceeds `threshold`. Pairs are visited by descending
/// correlation; within a pair the alphabetically earlier keyword survives.
/// Zero-variance series never take part.
DedupResult dedup(const SeriesPanel& panel, double threshold = 0.99,
                  std::optional<std::size_t> train_len = std::nullopt);

enum class TriageClass { kept, to_cluster, discarded };

std::string to_string(TriageClass c);

struct TriageRow {
    std::string keyword;
    double zero_fraction = 0.0;
    TriageClass cls = TriageClass::kept;
    std::string dropped_for;  // surviving duplicate, empty otherwise
};

struct TriagePlan {
    std::vector<std::string> kept;        // zf < low
    std::vector<std::string> to_cluster;  // low <= zf <= high
    std::vector<std::string> discarded;   // zf > high, or dropped as a duplicate
    std::vector<DedupPair> dedup_pairs;
    std::vector<TriageRow> rows;          // one per input keyword, input order
};

/// Classifies by zero fraction: below `low` kept, above `high` discarded,
/// the closed band in between goes to clustering.
TriagePlan partition(const SeriesPanel& panel, double low = 0.30, double high = 0.99);

struct TriageOptions {
    double dedup_threshold = 0.99;
    double low = 0.30;
    double high = 0.99;
    std::optional<std::size_t> train_len;
};

/// dedup followed by partition; duplicates land in `discarded`.
TriagePlan triage(const SeriesPanel& panel, const TriageOptions& options = {});

/// `keyword,zero_fraction,class,dropped_for`
void write_triage_report(std::ostream& out, const TriagePlan& plan);

}  // namespace trendprep
