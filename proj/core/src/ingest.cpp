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

#include "trendprep/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace trendprep {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) {
                lines.push_back(text.substr(start));
            }
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    for (auto& l : lines) {
        if (!l.empty() && l.back() == '\r') {
            l.remove_suffix(1);
        }
    }
    return lines;
}

bool is_blank(std::string_view line) {
    return trim(line).empty() || std::all_of(line.begin(), line.end(), [](char c) {
               return c == ',' || c == ' ' || c == '\t' || c == '\r';
           });
}

// "flu treatment: (Alaska)" -> "flu treatment"
std::string keyword_from_header(std::string_view header) {
    header = trim(header);
    const auto pos = header.rfind(": (");
    if (pos != std::string_view::npos && header.back() == ')') {
        header = header.substr(0, pos);
    }
    return std::string(trim(header));
}

void check_spacing(const std::vector<Date>& dates) {
    for (std::size_t i = 1; i < dates.size(); ++i) {
        const auto step = (dates[i] - dates[i - 1]).count();
        if (step == 0) {
            throw InputError("duplicate week row " + format_date(dates[i]));
        }
        if (step != 7) {
            throw InputError("non-uniform spacing between " + format_date(dates[i - 1]) + " and " +
                             format_date(dates[i]));
        }
    }
}

}  // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char dash1 = 0;
    char dash2 = 0;
    std::istringstream in{std::string(text)};
    in >> y >> dash1 >> m >> dash2 >> d;
    if (!in || dash1 != '-' || dash2 != '-' || in.peek() != std::char_traits<char>::eof()) {
        throw InputError("malformed date '" + std::string(text) + "'");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) {
        throw InputError("malformed date '" + std::string(text) + "'");
    }
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::optional<std::size_t> SeriesPanel::index_of(std::string_view keyword) const {
    const auto it = std::find(keywords.begin(), keywords.end(), keyword);
    if (it == keywords.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - keywords.begin());
}

std::span<const double> SeriesPanel::series(std::string_view keyword) const {
    const auto idx = index_of(keyword);
    if (!idx) {
        throw InputError("unknown keyword '" + std::string(keyword) + "'");
    }
    return values[*idx];
}

void SeriesPanel::validate() const {
    check_spacing(dates);
    if (values.size() != keywords.size()) {
        throw InputError("panel has " + std::to_string(keywords.size()) + " keywords but " +
                         std::to_string(values.size()) + " series");
    }
    std::set<std::string_view> seen;
    for (std::size_t k = 0; k < keywords.size(); ++k) {
        if (!seen.insert(keywords[k]).second) {
            throw InputError("duplicate keyword '" + keywords[k] + "'");
        }
        if (values[k].size() != dates.size()) {
            throw InputError("series '" + keywords[k] + "' length does not match the date grid");
        }
        for (double v : values[k]) {
            if (!std::isfinite(v)) {
                throw InputError("series '" + keywords[k] + "' has a non-finite value");
            }
        }
    }
}

void SeriesPanel::validate_reported() const {
    validate();
    for (std::size_t k = 0; k < keywords.size(); ++k) {
        for (double v : values[k]) {
            if (v < 0.0 || v > 100.0 || v != std::round(v)) {
                throw InputError("series '" + keywords[k] + "' has value " + format_double(v) +
                                 " outside the integer range [0,100]");
            }
        }
    }
}

SeriesPanel SeriesPanel::subset(std::span<const std::string> keep) const {
    SeriesPanel out;
    out.location = location;
    out.dates = dates;
    out.download_date = download_date;
    for (const auto& kw : keep) {
        out.keywords.push_back(kw);
        const auto s = series(kw);
        out.values.emplace_back(s.begin(), s.end());
    }
    return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) {
        throw InputError("unterminated quote in CSV line");
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_field(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

SeriesPanel parse_trends_csv(std::string_view raw_text, std::string location,
                             std::optional<Date> download_date) {
    if (raw_text.size() >= 3 && raw_text.substr(0, 3) == "\xEF\xBB\xBF") {
        raw_text.remove_prefix(3);
    }
    const auto lines = split_lines(raw_text);
    std::size_t i = 0;
    while (i < lines.size() && is_blank(lines[i])) {
        ++i;
    }
    if (i < lines.size() && trim(lines[i]).substr(0, 9) == "Category:") {
        ++i;
        while (i < lines.size() && is_blank(lines[i])) {
            ++i;
        }
    }
    if (i >= lines.size()) {
        throw InputError("no header row found");
    }
    const auto header = split_csv_line(lines[i]);
    if (header.size() < 2 || trim(header[0]) != "Week") {
        throw InputError("expected a 'Week,<term>: (<region>)' header row");
    }
    ++i;

    SeriesPanel panel;
    panel.location = std::move(location);
    for (std::size_t c = 1; c < header.size(); ++c) {
        panel.keywords.push_back(keyword_from_header(header[c]));
    }
    panel.values.resize(panel.keywords.size());

    for (; i < lines.size(); ++i) {
        if (is_blank(lines[i])) {
            continue;
        }
        const auto cells = split_csv_line(lines[i]);
        const auto row = std::to_string(i + 1);
        if (cells.size() != header.size()) {
            throw InputError("line " + row + ": expected " + std::to_string(header.size()) +
                             " cells, found " + std::to_string(cells.size()));
        }
        const Date week = parse_date(cells[0]);
        if (std::chrono::weekday{week} != std::chrono::Sunday) {
            throw InputError("line " + row + ": week " + format_date(week) +
                             " does not start on a Sunday");
        }
        panel.dates.push_back(week);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const auto cell = trim(cells[c]);
            if (cell.empty()) {
                throw InputError("line " + row + ": missing value for '" +
                                 panel.keywords[c - 1] + "'");
            }
            double v = 0.0;
            if (cell != "<1") {
                try {
                    v = parse_double(cell);
                } catch (const InputError&) {
                    throw InputError("line " + row + ": non-numeric cell '" + std::string(cell) +
                                     "'");
                }
            }
            panel.values[c - 1].push_back(v);
        }
    }
    if (panel.dates.empty()) {
        throw InputError("export contains no weekly rows");
    }
    panel.download_date = download_date.value_or(panel.dates.back() + std::chrono::days{6});
    panel.validate_reported();
    return panel;
}

void write_trends_csv(std::ostream& out, const SeriesPanel& panel) {
    out << "Category: All categories\n\nWeek";
    for (const auto& k : panel.keywords) {
        out << ',' << csv_field(k + ": (" + panel.location + ")");
    }
    out << '\n';
    for (std::size_t t = 0; t < panel.num_weeks(); ++t) {
        out << format_date(panel.dates[t]);
        for (const auto& v : panel.values) {
            out << ',' << format_double(v[t]);
        }
        out << '\n';
    }
}

void write_panel_csv(std::ostream& out, const SeriesPanel& panel, bool header) {
    if (header) {
        out << "date,keyword,value,location,download_date\n";
    }
    const auto loc = csv_field(panel.location);
    const auto dl = format_date(panel.download_date);
    for (std::size_t k = 0; k < panel.keywords.size(); ++k) {
        const auto kw = csv_field(panel.keywords[k]);
        for (std::size_t t = 0; t < panel.dates.size(); ++t) {
            out << format_date(panel.dates[t]) << ',' << kw << ','
                << format_double(panel.values[k][t]) << ',' << loc << ',' << dl << '\n';
        }
    }
}

std::string serialize_panel(const SeriesPanel& panel) {
    std::ostringstream out;
    write_panel_csv(out, panel);
    return out.str();
}

std::vector<SeriesPanel> parse_panels_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || split_csv_line(lines[0]) !=
                             std::vector<std::string>{"date", "keyword", "value", "location",
                                                      "download_date"}) {
        throw InputError("panel CSV must start with 'date,keyword,value,location,download_date'");
    }

    struct Builder {
        SeriesPanel panel;
        std::map<std::string, std::size_t> kw_index;
        std::vector<std::map<Date, double>> cells;
    };
    std::vector<Builder> builders;
    std::map<std::pair<std::string, Date>, std::size_t> panel_index;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (is_blank(lines[i])) {
            continue;
        }
        const auto f = split_csv_line(lines[i]);
        const auto row = std::to_string(i + 1);
        if (f.size() != 5) {
            throw InputError("line " + row + ": expected 5 fields");
        }
        const Date week = parse_date(f[0]);
        const Date dl = parse_date(f[4]);
        const double value = parse_double(f[2]);
        auto [pit, fresh] = panel_index.try_emplace({f[3], dl}, builders.size());
        if (fresh) {
            builders.emplace_back();
            builders.back().panel.location = f[3];
            builders.back().panel.download_date = dl;
        }
        auto& b = builders[pit->second];
        auto [kit, new_kw] = b.kw_index.try_emplace(f[1], b.panel.keywords.size());
        if (new_kw) {
            b.panel.keywords.push_back(f[1]);
            b.cells.emplace_back();
        }
        if (!b.cells[kit->second].emplace(week, value).second) {
            throw InputError("line " + row + ": duplicate week " + f[0] + " for '" + f[1] + "'");
        }
    }

    std::vector<SeriesPanel> out;
    for (auto& b : builders) {
        std::set<Date> all_dates;
        for (const auto& c : b.cells) {
            for (const auto& [d, v] : c) {
                all_dates.insert(d);
            }
        }
        b.panel.dates.assign(all_dates.begin(), all_dates.end());
        for (std::size_t k = 0; k < b.cells.size(); ++k) {
            if (b.cells[k].size() != all_dates.size()) {
                throw InputError("series '" + b.panel.keywords[k] + "' is missing weeks");
            }
            Vector v;
            v.reserve(all_dates.size());
            for (const auto& [d, x] : b.cells[k]) {
                v.push_back(x);
            }
            b.panel.values.push_back(std::move(v));
        }
        b.panel.validate();
        out.push_back(std::move(b.panel));
    }
    return out;
}

ReplicateStore align_panels(std::span<const SeriesPanel> panels) {
    if (panels.size() < 2) {
        throw InputError("align_panels needs at least two panels");
    }
    std::set<std::string> keywords(panels[0].keywords.begin(), panels[0].keywords.end());
    std::set<Date> dates(panels[0].dates.begin(), panels[0].dates.end());
    for (const auto& p : panels.subspan(1)) {
        std::set<std::string> kw_next;
        for (const auto& k : p.keywords) {
            if (keywords.count(k)) {
                kw_next.insert(k);
            }
        }
        keywords = std::move(kw_next);
        std::set<Date> d_next;
        for (const auto& d : p.dates) {
            if (dates.count(d)) {
                d_next.insert(d);
            }
        }
        dates = std::move(d_next);
    }
    if (keywords.empty()) {
        throw InputError("panels share no keywords");
    }
    if (dates.empty()) {
        throw InputError("panels share no weeks");
    }

    ReplicateStore store;
    const std::vector<std::string> kw(keywords.begin(), keywords.end());
    const std::vector<Date> grid(dates.begin(), dates.end());
    for (const auto& p : panels) {
        SeriesPanel aligned;
        aligned.location = p.location;
        aligned.download_date = p.download_date;
        aligned.keywords = kw;
        aligned.dates = grid;
        const auto offset = static_cast<std::size_t>(
            std::find(p.dates.begin(), p.dates.end(), grid.front()) - p.dates.begin());
        for (const auto& k : kw) {
            const auto s = p.series(k);
            aligned.values.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(offset),
                                        s.begin() + static_cast<std::ptrdiff_t>(offset + grid.size()));
        }
        aligned.validate();
        store.panels.push_back(std::move(aligned));
    }
    std::stable_sort(store.panels.begin(), store.panels.end(),
                     [](const SeriesPanel& a, const SeriesPanel& b) {
                         return a.download_date < b.download_date;
                     });
    return store;
}

double zero_fraction(std::span<const double> series) {
    if (series.empty()) {
        throw InputError("zero_fraction of empty series");
    }
    const auto zeros = std::count(series.begin(), series.end(), 0.0);
    return static_cast<double>(zeros) / static_cast<double>(series.size());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace trendprep
