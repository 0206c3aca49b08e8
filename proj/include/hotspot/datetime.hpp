#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

namespace hotspot {

// Calendar date-time without timezone. The source export is a single-county
// extract in local time; values are bucketed as-is, never converted.
struct CivilDateTime {
    int year = 0;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;
    int second = 0;

    auto tie() const { return std::tie(year, month, day, hour, minute, second); }
    friend bool operator==(const CivilDateTime& a, const CivilDateTime& b) {
        return a.tie() == b.tie();
    }
    friend bool operator<(const CivilDateTime& a, const CivilDateTime& b) {
        return a.tie() < b.tie();
    }
    friend bool operator<=(const CivilDateTime& a, const CivilDateTime& b) {
        return a.tie() <= b.tie();
    }
};

inline bool is_leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int days_in_month(int y, int m) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12) return 0;
    if (m == 2 && is_leap_year(y)) return 29;
    return kDays[m - 1];
}

inline bool valid_civil(const CivilDateTime& t) {
    return t.year >= 1 && t.month >= 1 && t.month <= 12 && t.day >= 1 &&
           t.day <= days_in_month(t.year, t.month) && t.hour >= 0 && t.hour <= 23 &&
           t.minute >= 0 && t.minute <= 59 && t.second >= 0 && t.second <= 60;
}

namespace detail {

inline bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
    if (ec != std::errc{} || ptr != s.data() + pos + len) return false;
    out = v;
    return true;
}

}  // namespace detail

// "YYYY-MM-DD", "YYYY-MM-DD HH:MM[:SS]", "YYYY-MM-DDTHH:MM[:SS]".
inline std::optional<CivilDateTime> parse_iso8601(std::string_view s) {
    while (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    CivilDateTime t;
    if (!detail::parse_fixed_int(s, 0, 4, t.year) || s.size() < 10 || s[4] != '-' || s[7] != '-' ||
        !detail::parse_fixed_int(s, 5, 2, t.month) || !detail::parse_fixed_int(s, 8, 2, t.day)) {
        return std::nullopt;
    }
    if (s.size() > 10) {
        if ((s[10] != 'T' && s[10] != ' ') || s.size() < 16 || s[13] != ':' ||
            !detail::parse_fixed_int(s, 11, 2, t.hour) ||
            !detail::parse_fixed_int(s, 14, 2, t.minute)) {
            return std::nullopt;
        }
        if (s.size() > 16) {
            if (s[16] != ':' || s.size() != 19 || !detail::parse_fixed_int(s, 17, 2, t.second)) {
                return std::nullopt;
            }
        }
    }
    if (!valid_civil(t)) return std::nullopt;
    return t;
}

// "MM/DD/YYYY HH:MM[:SS] AM|PM", the ACRS export's native format.
inline std::optional<CivilDateTime> parse_us_ampm(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    CivilDateTime t;
    if (s.size() < 19 || s[2] != '/' || s[5] != '/' || s[10] != ' ' || s[13] != ':' ||
        !detail::parse_fixed_int(s, 0, 2, t.month) || !detail::parse_fixed_int(s, 3, 2, t.day) ||
        !detail::parse_fixed_int(s, 6, 4, t.year) || !detail::parse_fixed_int(s, 11, 2, t.hour) ||
        !detail::parse_fixed_int(s, 14, 2, t.minute)) {
        return std::nullopt;
    }
    std::size_t pos = 16;
    if (s.size() >= 19 && s[16] == ':') {
        if (!detail::parse_fixed_int(s, 17, 2, t.second)) return std::nullopt;
        pos = 19;
    }
    if (pos + 3 != s.size() || s[pos] != ' ') return std::nullopt;
    std::string_view ampm = s.substr(pos + 1, 2);
    bool pm;
    if (ampm == "AM" || ampm == "am") pm = false;
    else if (ampm == "PM" || ampm == "pm") pm = true;
    else return std::nullopt;
    if (t.hour < 1 || t.hour > 12) return std::nullopt;
    if (pm && t.hour != 12) t.hour += 12;
    if (!pm && t.hour == 12) t.hour = 0;
    if (!valid_civil(t)) return std::nullopt;
    return t;
}

// Format identifiers are configuration values, not locale lookups.
inline std::optional<CivilDateTime> parse_timestamp(std::string_view s, std::string_view format) {
    if (format == "iso8601") return parse_iso8601(s);
    if (format == "us_mdy_hm12") return parse_us_ampm(s);
    return std::nullopt;
}

inline bool known_timestamp_format(std::string_view format) {
    return format == "iso8601" || format == "us_mdy_hm12";
}

inline std::string format_iso8601(const CivilDateTime& t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", t.year, t.month, t.day,
                  t.hour, t.minute, t.second);
    return buf;
}

struct DateWindow {
    CivilDateTime start{2015, 1, 1, 0, 0, 0};
    CivilDateTime end{2024, 12, 31, 23, 59, 59};

    bool contains(const CivilDateTime& t) const { return start <= t && t <= end; }
};

}  // namespace hotspot
