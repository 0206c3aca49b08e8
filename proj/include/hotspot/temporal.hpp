#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "hotspot/csv.hpp"
#include "hotspot/datetime.hpp"
#include "hotspot/errors.hpp"
#include "hotspot/ingest.hpp"

namespace hotspot {

struct YearMonth {
    int year = 0;
    int month = 1;  // 1..12

    friend bool operator==(const YearMonth& a, const YearMonth& b) {
        return a.year == b.year && a.month == b.month;
    }
};

inline int month_index(const YearMonth& origin, const YearMonth& m) {
    return (m.year - origin.year) * 12 + (m.month - origin.month);
}

// Contiguous month buckets spanning the whole window, zeros included.
struct MonthlySeries {
    YearMonth start;
    std::vector<std::int64_t> counts;

    YearMonth month_at(std::size_t i) const {
        int total = start.month - 1 + static_cast<int>(i);
        return {start.year + total / 12, total % 12 + 1};
    }
};

inline MonthlySeries monthly_series(std::span<const CrashRecord> records, const DateWindow& window) {
    if (!(window.start <= window.end)) throw config_error("monthly_series: window start after end");
    MonthlySeries series;
    series.start = {window.start.year, window.start.month};
    YearMonth last{window.end.year, window.end.month};
    series.counts.assign(static_cast<std::size_t>(month_index(series.start, last)) + 1, 0);
    for (const auto& r : records) {
        if (!window.contains(r.timestamp)) continue;
        int idx = month_index(series.start, {r.timestamp.year, r.timestamp.month});
        ++series.counts[static_cast<std::size_t>(idx)];
    }
    return series;
}

// years x 12 pivot of the series; months outside the window stay zero.
struct SeasonalMatrix {
    int first_year = 0;
    std::vector<std::array<std::int64_t, 12>> rows;
};

inline SeasonalMatrix seasonal_matrix(const MonthlySeries& series) {
    SeasonalMatrix m;
    if (series.counts.empty()) return m;
    m.first_year = series.start.year;
    YearMonth last = series.month_at(series.counts.size() - 1);
    m.rows.assign(static_cast<std::size_t>(last.year - series.start.year) + 1, {});
    for (std::size_t i = 0; i < series.counts.size(); ++i) {
        YearMonth ym = series.month_at(i);
        m.rows[static_cast<std::size_t>(ym.year - m.first_year)][static_cast<std::size_t>(ym.month - 1)] =
            series.counts[i];
    }
    return m;
}

inline void write_series_csv(std::ostream& out, const MonthlySeries& series) {
    CsvWriter w(out);
    w.row({"year", "month", "count"});
    for (std::size_t i = 0; i < series.counts.size(); ++i) {
        YearMonth ym = series.month_at(i);
        w.row({std::to_string(ym.year), std::to_string(ym.month), std::to_string(series.counts[i])});
    }
}

inline void write_seasonal_csv(std::ostream& out, const SeasonalMatrix& m) {
    static constexpr std::array<const char*, 12> kMonths = {"jan", "feb", "mar", "apr",
                                                            "may", "jun", "jul", "aug",
                                                            "sep", "oct", "nov", "dec"};
    CsvWriter w(out);
    std::vector<std::string> header = {"year"};
    for (const char* name : kMonths) header.emplace_back(name);
    w.row(header);
    for (std::size_t y = 0; y < m.rows.size(); ++y) {
        std::vector<std::string> row = {std::to_string(m.first_year + static_cast<int>(y))};
        for (std::int64_t c : m.rows[y]) row.push_back(std::to_string(c));
        w.row(row);
    }
}

}  // namespace hotspot
