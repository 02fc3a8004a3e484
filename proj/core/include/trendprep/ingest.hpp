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

#include "trendprep/numeric.hpp"

#include <chrono>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trendprep {

/// Calendar day. Weekly rows are keyed by their Sunday start date.
using Date = std::chrono::sys_days;

Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Keyword-by-week search volumes for one location and one download.
///
/// Reported panels hold integers in [0,100]; panels coming out of the
/// preprocessing stages hold arbitrary reals on the same date grid.
struct SeriesPanel {
    std::string location;
    std::vector<Date> dates;
    std::vector<std::string> keywords;
    std::vector<Vector> values;  // [keyword][week]
    Date download_date{};

    std::size_t num_keywords() const noexcept { return keywords.size(); }
    std::size_t num_weeks() const noexcept { return dates.size(); }

    std::optional<std::size_t> index_of(std::string_view keyword) const;

    /// Throws InputError naming the keyword when absent.
    std::span<const double> series(std::string_view keyword) const;

    /// Structural invariants: 7-day spacing, unique keywords, shape.
    void validate() const;

    /// Structural invariants plus integer values in [0,100].
    void validate_reported() const;

    /// Panel restricted to `keep` (in the given order).
    SeriesPanel subset(std::span<const std::string> keep) const;

    bool operator==(const SeriesPanel&) const = default;
};

/// Replicate downloads of the same query set.
struct ReplicateStore {
    std::vector<SeriesPanel> panels;
};

/// Parses a Google Trends "interest over time" export. Accepts files with
/// or without the "Category:" preamble. `<1` cells become 0.
/// When `download_date` is not given it defaults to the Saturday closing
/// the final week.
SeriesPanel parse_trends_csv(std::string_view raw_text, std::string location,
                             std::optional<Date> download_date = std::nullopt);

/// Wide layout of a Trends export (`Category:` preamble, `Week,<term>:
/// (<location>)` header); the inverse of parse_trends_csv.
void write_trends_csv(std::ostream& out, const SeriesPanel& panel);

/// Columnar serialization: `date,keyword,value,location,download_date`.
void write_panel_csv(std::ostream& out, const SeriesPanel& panel, bool header = true);
std::string serialize_panel(const SeriesPanel& panel);

/// Reads columnar rows, one panel per (location, download_date) pair in
/// order of first appearance.
std::vector<SeriesPanel> parse_panels_csv(std::string_view text);

/// Intersects date ranges and keyword sets. Keywords are sorted and panels
/// ordered by download date.
ReplicateStore align_panels(std::span<const SeriesPanel> panels);

/// Share of exact zeros.
double zero_fraction(std::span<const double> series);

/// Splits one CSV record honoring double quotes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view field);

std::string read_file(const std::string& path);

}  // namespace trendprep
