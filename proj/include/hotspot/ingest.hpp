#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotspot/csv.hpp"
#include "hotspot/datetime.hpp"
#include "hotspot/errors.hpp"
#include "hotspot/geo.hpp"
#include "hotspot/zones.hpp"

namespace hotspot {

// Circumstance flags carried on each record, canonical order.
enum class CrashFlag : int {
    pedestrian = 0,
    alcohol,
    animal,
    parked_vehicle,
    distracted,
    off_road,
    poor_lighting,
    no_traffic_control,
};

inline constexpr int kFlagCount = 8;

inline constexpr std::array<const char*, kFlagCount> kFlagNames = {
    "pedestrian",     "alcohol",    "animal",        "parked_vehicle",
    "distracted",     "off_road",   "poor_lighting", "no_traffic_control",
};

inline std::optional<CrashFlag> flag_from_name(std::string_view name) {
    for (int i = 0; i < kFlagCount; ++i) {
        if (name == kFlagNames[static_cast<std::size_t>(i)]) return static_cast<CrashFlag>(i);
    }
    return std::nullopt;
}

struct CrashRecord {
    std::string report_id;
    CivilDateTime timestamp;
    GeoPoint location;
    bool severe = false;
    std::uint8_t flags = 0;

    bool has_flag(CrashFlag f) const { return (flags >> static_cast<int>(f)) & 1; }
    void set_flag(CrashFlag f) { flags |= static_cast<std::uint8_t>(1u << static_cast<int>(f)); }
};

// One logical field sourced from a raw column plus the raw strings that
// count as "true". Matching is case-insensitive on trimmed values; the
// upstream export never published stable codes, so the dictionary is data.
struct ValueDictionary {
    std::string column;
    std::vector<std::string> true_values;
};

struct ColumnMapping {
    std::string report_id_column;
    std::string timestamp_column;
    std::string timestamp_format = "iso8601";  // or "us_mdy_hm12"
    std::string lon_column;
    std::string lat_column;
    ValueDictionary severity;
    std::array<ValueDictionary, kFlagCount> flags;
};

namespace detail {

inline std::string normalize_value(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    std::string out(s.substr(b, e - b));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

inline ValueDictionary dictionary_from_json(const nlohmann::json& j, const std::string& field) {
    if (!j.is_object() || !j.contains("column") || !j.contains("true_values")) {
        throw config_error("mapping: field '" + field + "' needs {column, true_values}");
    }
    ValueDictionary d;
    d.column = j["column"].get<std::string>();
    for (const auto& v : j["true_values"]) d.true_values.push_back(normalize_value(v.get<std::string>()));
    return d;
}

}  // namespace detail

// Mapping config is a JSON document; every logical field must be present
// exactly once (JSON object keys are unique by construction).
inline ColumnMapping parse_column_mapping(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw config_error("mapping: not a JSON object");
    ColumnMapping m;
    for (const char* key : {"report_id", "timestamp", "lon", "lat", "severity"}) {
        if (!j.contains(key)) throw config_error(std::string("mapping: missing field '") + key + "'");
    }
    m.report_id_column = j["report_id"].get<std::string>();
    if (j["timestamp"].is_object()) {
        m.timestamp_column = j["timestamp"]["column"].get<std::string>();
        m.timestamp_format = j["timestamp"].value("format", "iso8601");
    } else {
        m.timestamp_column = j["timestamp"].get<std::string>();
    }
    if (!known_timestamp_format(m.timestamp_format)) {
        throw config_error("mapping: unknown timestamp format '" + m.timestamp_format + "'");
    }
    m.lon_column = j["lon"].get<std::string>();
    m.lat_column = j["lat"].get<std::string>();
    m.severity = detail::dictionary_from_json(j["severity"], "severity");
    if (!j.contains("flags") || !j["flags"].is_object()) {
        throw config_error("mapping: missing 'flags' object");
    }
    for (int f = 0; f < kFlagCount; ++f) {
        const char* name = kFlagNames[static_cast<std::size_t>(f)];
        if (!j["flags"].contains(name)) {
            throw config_error(std::string("mapping: flags missing '") + name + "'");
        }
        m.flags[static_cast<std::size_t>(f)] =
            detail::dictionary_from_json(j["flags"][name], name);
    }
    return m;
}

// Default mapping for the Montgomery County ACRS incidents export. The
// severity dictionary is an assumption documented in the README, not ground
// truth from the data provider.
inline std::string default_mapping_json() {
    return R"({
  "report_id": "Report Number",
  "timestamp": {"column": "Crash Date/Time", "format": "us_mdy_hm12"},
  "lon": "Longitude",
  "lat": "Latitude",
  "severity": {
    "column": "Maximum Injury Severity",
    "true_values": ["FATAL INJURY", "SUSPECTED SERIOUS INJURY"]
  },
  "flags": {
    "pedestrian": {"column": "Related Non-Motorist", "true_values": ["PEDESTRIAN", "PEDESTRIANS", "OTHER PEDESTRIAN"]},
    "alcohol": {"column": "Driver Substance Abuse", "true_values": ["ALCOHOL PRESENT", "ALCOHOL CONTRIBUTED", "COMBINED SUBSTANCE PRESENT", "COMBINATION CONTRIBUTED"]},
    "animal": {"column": "First Harmful Event", "true_values": ["ANIMAL", "LIVE ANIMAL", "DEER"]},
    "parked_vehicle": {"column": "First Harmful Event", "true_values": ["PARKED VEHICLE", "PARKED MOTOR VEHICLE"]},
    "distracted": {"column": "Driver Distracted By", "true_values": ["LOOKED BUT DID NOT SEE", "TALKING OR LISTENING TO CELLULAR PHONE", "OTHER CELLULAR PHONE RELATED", "DISTRACTED BY OUTSIDE PERSON OBJECT OR EVENT", "EATING OR DRINKING", "OTHER ELECTRONIC DEVICE", "ADJUSTING AUDIO AND OR CLIMATE CONTROLS", "BY MOVING OBJECT IN VEHICLE", "DIALING CELLULAR PHONE", "OTHER DISTRACTION", "TEXTING FROM A CELLULAR PHONE", "SMOKING RELATED", "USING DEVICE OBJECT BROUGHT INTO VEHICLE", "USING OTHER DEVICE CONTROLS INTEGRAL TO VEHICLE", "INATTENTIVE OR LOST IN THOUGHT"]},
    "off_road": {"column": "Collision Type", "true_values": ["SINGLE VEHICLE", "RAN OFF ROAD"]},
    "poor_lighting": {"column": "Light", "true_values": ["DARK NO LIGHTS", "DARK LIGHTS ON", "DARK -- UNKNOWN LIGHTING", "DARK - NOT LIGHTED", "DARK - LIGHTED", "DARK - UNKNOWN LIGHTING"]},
    "no_traffic_control": {"column": "Traffic Control", "true_values": ["NO CONTROLS"]}
  }
})";
}

struct QuarantineEntry {
    std::size_t row = 0;  // 1-based data row index (header excluded)
    std::string reason;
};

struct IngestResult {
    std::vector<CrashRecord> records;
    std::vector<QuarantineEntry> quarantine;
    std::size_t raw_rows = 0;
};

struct IngestOptions {
    GeoBounds bounds{-77.75, -76.75, 38.85, 39.45};  // Montgomery County, generous
    DateWindow window{};
};

namespace detail {

class HeaderIndex {
public:
    explicit HeaderIndex(const std::vector<std::string>& header) {
        for (std::size_t i = 0; i < header.size(); ++i) by_name_.emplace(header[i], i);
    }
    std::optional<std::size_t> find(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::map<std::string, std::size_t> by_name_;
};

inline bool dictionary_hit(const ValueDictionary& d, const std::string& raw) {
    std::string norm = normalize_value(raw);
    return std::find(d.true_values.begin(), d.true_values.end(), norm) != d.true_values.end();
}

}  // namespace detail

// Parses a raw collision CSV. Rows that cannot be normalized are quarantined
// with a per-row reason; only a missing mapped column is fatal, and the
// error lists every missing name at once.
inline IngestResult load_crashes(std::istream& in, const ColumnMapping& mapping,
                                 const IngestOptions& opts = {}) {
    CsvReader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header)) throw data_error("crash csv: empty input, expected a header row");

    detail::HeaderIndex index(header);
    std::vector<std::string> missing;
    auto resolve = [&](const std::string& name) -> std::size_t {
        auto idx = index.find(name);
        if (!idx) {
            missing.push_back(name);
            return 0;
        }
        return *idx;
    };
    std::size_t c_report = resolve(mapping.report_id_column);
    std::size_t c_time = resolve(mapping.timestamp_column);
    std::size_t c_lon = resolve(mapping.lon_column);
    std::size_t c_lat = resolve(mapping.lat_column);
    std::size_t c_sev = resolve(mapping.severity.column);
    std::array<std::size_t, kFlagCount> c_flags{};
    for (int f = 0; f < kFlagCount; ++f) {
        c_flags[static_cast<std::size_t>(f)] = resolve(mapping.flags[static_cast<std::size_t>(f)].column);
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        std::ostringstream msg;
        msg << "crash csv: missing mapped column(s):";
        for (const auto& name : missing) msg << " '" << name << "'";
        throw config_error(msg.str());
    }

    IngestResult result;
    std::vector<std::string> fields;
    std::size_t row = 0;
    auto cell = [&](std::size_t col) -> const std::string& {
        static const std::string kEmpty;
        return col < fields.size() ? fields[col] : kEmpty;
    };
    while (reader.next(fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) {
            --row;  // trailing blank line, not a data row
            continue;
        }
        ++result.raw_rows;

        CrashRecord rec;
        rec.report_id = cell(c_report);
        if (rec.report_id.empty()) {
            result.quarantine.push_back({row, "missing report id"});
            continue;
        }
        auto lon = parse_double(cell(c_lon));
        auto lat = parse_double(cell(c_lat));
        if (!lon || !lat) {
            bool blank = cell(c_lon).empty() || cell(c_lat).empty();
            result.quarantine.push_back({row, blank ? "missing coordinate" : "bad coordinate"});
            continue;
        }
        rec.location = {*lon, *lat};
        if (!geo_in_range(rec.location)) {
            result.quarantine.push_back({row, "bad coordinate"});
            continue;
        }
        if (!opts.bounds.contains(rec.location)) {
            result.quarantine.push_back({row, "outside bounding box"});
            continue;
        }
        auto ts = parse_timestamp(cell(c_time), mapping.timestamp_format);
        if (!ts) {
            result.quarantine.push_back({row, "bad timestamp"});
            continue;
        }
        rec.timestamp = *ts;
        if (!opts.window.contains(rec.timestamp)) {
            result.quarantine.push_back({row, "outside study window"});
            continue;
        }
        rec.severe = detail::dictionary_hit(mapping.severity, cell(c_sev));
        for (int f = 0; f < kFlagCount; ++f) {
            if (detail::dictionary_hit(mapping.flags[static_cast<std::size_t>(f)],
                                       cell(c_flags[static_cast<std::size_t>(f)]))) {
                rec.set_flag(static_cast<CrashFlag>(f));
            }
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

// Record selector: "all", "severe", or a flag name.
struct RecordFilter {
    enum class Kind { all, severe, flag } kind = Kind::all;
    CrashFlag flag = CrashFlag::pedestrian;

    bool matches(const CrashRecord& r) const {
        switch (kind) {
            case Kind::all: return true;
            case Kind::severe: return r.severe;
            case Kind::flag: return r.has_flag(flag);
        }
        return false;
    }

    static RecordFilter parse(std::string_view name) {
        if (name == "all" || name.empty()) return {};
        if (name == "severe") return {Kind::severe, CrashFlag::pedestrian};
        if (auto f = flag_from_name(name)) return {Kind::flag, *f};
        throw config_error("unknown filter '" + std::string(name) +
                           "' (expected all, severe, or a flag name)");
    }
};

inline std::vector<CrashRecord> filter_crashes(std::span<const CrashRecord> records,
                                               const RecordFilter& filter) {
    std::vector<CrashRecord> out;
    for (const auto& r : records) {
        if (filter.matches(r)) out.push_back(r);
    }
    return out;
}

struct ZoneCounts {
    std::string zone_id;
    std::int64_t total = 0;
    std::int64_t severe = 0;
    std::array<std::int64_t, kFlagCount> flag_counts{};
};

// One entry per zone, zero-count zones included. Totals conserve: the sum
// of `total` equals the number of assigned records.
inline std::vector<ZoneCounts> aggregate_by_zone(std::span<const CrashRecord> records,
                                                 const ZoneAssignment& assignment,
                                                 const ZoneSet& zones) {
    if (assignment.size() != records.size()) {
        throw data_error("aggregate_by_zone: assignment does not cover the records");
    }
    std::vector<ZoneCounts> counts(zones.zone_count());
    for (std::size_t z = 0; z < zones.zone_count(); ++z) counts[z].zone_id = zones.ids[z];
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::int32_t z = assignment[i];
        if (z == kUnassigned) continue;
        auto& c = counts[static_cast<std::size_t>(z)];
        ++c.total;
        if (records[i].severe) ++c.severe;
        for (int f = 0; f < kFlagCount; ++f) {
            if (records[i].has_flag(static_cast<CrashFlag>(f))) {
                ++c.flag_counts[static_cast<std::size_t>(f)];
            }
        }
    }
    return counts;
}

// ---- normalized record CSV (canonical interchange format) ----

inline std::vector<std::string> normalized_csv_header() {
    std::vector<std::string> h = {"report_id", "timestamp", "lon", "lat", "severe"};
    for (const char* name : kFlagNames) h.emplace_back(name);
    return h;
}

inline void write_normalized_csv(std::ostream& out, std::span<const CrashRecord> records) {
    CsvWriter w(out);
    w.row(normalized_csv_header());
    for (const auto& r : records) {
        std::vector<std::string> row = {r.report_id, format_iso8601(r.timestamp),
                                        format_double(r.location.lon),
                                        format_double(r.location.lat), r.severe ? "1" : "0"};
        for (int f = 0; f < kFlagCount; ++f) {
            row.emplace_back(r.has_flag(static_cast<CrashFlag>(f)) ? "1" : "0");
        }
        w.row(row);
    }
}

inline std::vector<CrashRecord> read_normalized_csv(std::istream& in) {
    CsvReader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header)) throw data_error("normalized csv: empty input");
    auto expected = normalized_csv_header();
    if (header != expected) throw data_error("normalized csv: unexpected header");
    std::vector<CrashRecord> records;
    std::vector<std::string> fields;
    std::size_t row = 1;
    while (reader.next(fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != expected.size()) {
            throw data_error("normalized csv: row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) + " fields");
        }
        CrashRecord r;
        r.report_id = fields[0];
        auto ts = parse_iso8601(fields[1]);
        auto lon = parse_double(fields[2]);
        auto lat = parse_double(fields[3]);
        if (!ts || !lon || !lat) {
            throw data_error("normalized csv: unparsable row " + std::to_string(row));
        }
        r.timestamp = *ts;
        r.location = {*lon, *lat};
        r.severe = fields[4] == "1";
        for (int f = 0; f < kFlagCount; ++f) {
            if (fields[5 + static_cast<std::size_t>(f)] == "1") r.set_flag(static_cast<CrashFlag>(f));
        }
        records.push_back(std::move(r));
    }
    return records;
}

inline void write_quarantine_csv(std::ostream& out, std::span<const QuarantineEntry> entries) {
    CsvWriter w(out);
    w.row({"row", "reason"});
    for (const auto& e : entries) w.row({std::to_string(e.row), e.reason});
}

}  // namespace hotspot
