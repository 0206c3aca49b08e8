#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "hotspot/errors.hpp"
#include "hotspot/geo.hpp"
#include "hotspot/ingest.hpp"
#include "hotspot/rng.hpp"
#include "hotspot/zones.hpp"

namespace hotspot {

// Synthetic fixture: a g x g lattice of square zones with Poisson event
// counts and a planted multiplicative hotspot block. Zones are emitted in
// the same GeoJSON/CSV formats the rest of the pipeline consumes.
struct SynthSpec {
    int grid_dim = 10;            // g, lattice is g x g
    double zone_side_m = 1000.0;  // square side in meters
    double base_intensity = 50.0; // expected events per background zone
    std::vector<std::int32_t> hotspot_zones;
    double hotspot_multiplier = 1.0;
    double severe_prob_base = 0.02;
    double severe_prob_hotspot = 0.02;
    std::uint64_t seed = 0;
    GeoPoint origin{-77.40, 39.00};  // lower-left corner of the lattice
};

inline void validate_synth_spec(const SynthSpec& spec) {
    if (spec.grid_dim < 3) throw config_error("synth: lattice dimension must be >= 3");
    if (!(spec.zone_side_m > 0.0)) throw config_error("synth: zone side must be positive");
    if (spec.base_intensity < 0.0) throw config_error("synth: base intensity must be >= 0");
    if (spec.hotspot_multiplier < 1.0) throw config_error("synth: multiplier must be >= 1");
    if (spec.severe_prob_base < 0.0 || spec.severe_prob_base > 1.0 ||
        spec.severe_prob_hotspot < 0.0 || spec.severe_prob_hotspot > 1.0) {
        throw config_error("synth: severe probabilities must lie in [0, 1]");
    }
    auto n = static_cast<std::int32_t>(spec.grid_dim) * spec.grid_dim;
    for (auto z : spec.hotspot_zones) {
        if (z < 0 || z >= n) throw config_error("synth: hotspot zone index out of range");
    }
}

// Zone index for lattice position (row, col), row-major from the south-west.
inline std::int32_t lattice_zone(int grid_dim, int row, int col) {
    return static_cast<std::int32_t>(row) * grid_dim + col;
}

// Inclusive block of lattice zones, handy for planting square hotspots.
inline std::vector<std::int32_t> lattice_block(int grid_dim, int row0, int col0, int row1,
                                               int col1) {
    std::vector<std::int32_t> zones;
    for (int r = row0; r <= row1; ++r)
        for (int c = col0; c <= col1; ++c) zones.push_back(lattice_zone(grid_dim, r, c));
    return zones;
}

struct SynthOutput {
    ZoneSet zones;
    std::vector<CrashRecord> records;
    std::vector<std::int64_t> zone_counts;   // per zone
    std::vector<std::uint8_t> hotspot_label; // ground truth, per zone
};

namespace detail {

struct LatticeGeometry {
    // lon/lat corners of the lattice columns/rows, monotone per axis
    std::vector<double> lon_edges;
    std::vector<double> lat_edges;
};

inline LatticeGeometry lattice_geometry(const SynthSpec& spec) {
    Projection proj(spec.origin);
    LatticeGeometry g;
    for (int c = 0; c <= spec.grid_dim; ++c) {
        g.lon_edges.push_back(proj.to_geo({c * spec.zone_side_m, 0.0}).lon);
    }
    for (int r = 0; r <= spec.grid_dim; ++r) {
        g.lat_edges.push_back(proj.to_geo({0.0, r * spec.zone_side_m}).lat);
    }
    return g;
}

inline std::string lattice_zone_id(std::int32_t idx) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "Z%04d", idx);
    return buf;
}

}  // namespace detail

// Expected per-zone counts only, skipping point generation. Uses the same
// per-zone count substreams as generate(), so the counts agree.
inline std::vector<std::int64_t> generate_counts(const SynthSpec& spec) {
    validate_synth_spec(spec);
    auto n = static_cast<std::size_t>(spec.grid_dim) * static_cast<std::size_t>(spec.grid_dim);
    std::vector<std::uint8_t> hot(n, 0);
    for (auto z : spec.hotspot_zones) hot[static_cast<std::size_t>(z)] = 1;
    std::vector<std::int64_t> counts(n, 0);
    for (std::size_t z = 0; z < n; ++z) {
        double rate = spec.base_intensity * (hot[z] ? spec.hotspot_multiplier : 1.0);
        CounterRng rng(spec.seed, stream::kSynthCounts | static_cast<std::uint64_t>(z));
        counts[z] = poisson(rng, rate);
    }
    return counts;
}

// Synthetic process over real zone geometries instead of a lattice.
struct ZoneSynthSpec {
    double base_intensity = 50.0;
    std::vector<std::string> hotspot_zone_ids;
    double hotspot_multiplier = 1.0;
    double severe_prob_base = 0.02;
    double severe_prob_hotspot = 0.02;
    std::uint64_t seed = 0;
};

// Poisson counts per zone and uniform in-zone locations by rejection
// sampling from the zone bbox. Streams are keyed by (seed, zone, event), so
// the draw sequence of one event never depends on another.
inline SynthOutput generate_over_zones(const ZoneSet& zones, const ZoneSynthSpec& spec) {
    if (zones.zone_count() < 1) throw config_error("synth: no zones");
    if (spec.hotspot_multiplier < 1.0) throw config_error("synth: multiplier must be >= 1");
    if (spec.base_intensity < 0.0) throw config_error("synth: base intensity must be >= 0");
    SynthOutput out;
    out.zones = zones;
    auto n = zones.zone_count();
    out.hotspot_label.assign(n, 0);
    if (spec.hotspot_multiplier > 1.0) {
        for (const auto& id : spec.hotspot_zone_ids) {
            auto it = std::find(zones.ids.begin(), zones.ids.end(), id);
            if (it == zones.ids.end()) throw config_error("synth: unknown hotspot zone '" + id + "'");
            out.hotspot_label[static_cast<std::size_t>(it - zones.ids.begin())] = 1;
        }
    }

    // pooled bbox per zone; rejection from it is uniform over the part union
    std::vector<std::vector<std::size_t>> zone_parts(n);
    for (std::size_t p = 0; p < zones.parts.size(); ++p) {
        zone_parts[static_cast<std::size_t>(zones.part_zone[p])].push_back(p);
    }
    std::vector<Box> zone_box(n);
    for (std::size_t z = 0; z < n; ++z) {
        if (zone_parts[z].empty()) throw data_error("synth: zone without parts");
        zone_box[z] = polygon_bbox(zones.parts[zone_parts[z][0]]);
        for (std::size_t p : zone_parts[z]) {
            Box b = polygon_bbox(zones.parts[p]);
            zone_box[z].u_min = std::min(zone_box[z].u_min, b.u_min);
            zone_box[z].u_max = std::max(zone_box[z].u_max, b.u_max);
            zone_box[z].v_min = std::min(zone_box[z].v_min, b.v_min);
            zone_box[z].v_max = std::max(zone_box[z].v_max, b.v_max);
        }
    }

    out.zone_counts.assign(n, 0);
    DateWindow window;
    int window_months = (window.end.year - window.start.year) * 12 + window.end.month -
                        window.start.month + 1;
    for (std::size_t z = 0; z < n; ++z) {
        double rate = spec.base_intensity * (out.hotspot_label[z] ? spec.hotspot_multiplier : 1.0);
        CounterRng count_rng(spec.seed, stream::kSynthCounts | static_cast<std::uint64_t>(z));
        out.zone_counts[z] = poisson(count_rng, rate);
        double p_severe = out.hotspot_label[z] ? spec.severe_prob_hotspot : spec.severe_prob_base;
        for (std::int64_t e = 0; e < out.zone_counts[z]; ++e) {
            CounterRng rng(spec.seed, stream::synth_event(z, static_cast<std::uint64_t>(e)));
            CrashRecord rec;
            char buf[48];
            std::snprintf(buf, sizeof(buf), "S%04zu-%05lld", z, static_cast<long long>(e));
            rec.report_id = buf;
            bool placed = false;
            const Box& bb = zone_box[z];
            for (int attempt = 0; attempt < 100000 && !placed; ++attempt) {
                GeoPoint cand{bb.u_min + rng.next_double() * (bb.u_max - bb.u_min),
                              bb.v_min + rng.next_double() * (bb.v_max - bb.v_min)};
                for (std::size_t part : zone_parts[z]) {
                    if (point_in_polygon(cand, zones.parts[part])) {
                        rec.location = cand;
                        placed = true;
                        break;
                    }
                }
            }
            if (!placed) throw data_error("synth: could not place a point in zone '" +
                                          zones.ids[z] + "'");
            rec.severe = rng.next_double() < p_severe;
            int m = static_cast<int>((z * 7 + static_cast<std::size_t>(e)) %
                                     static_cast<std::size_t>(window_months));
            int month_total = window.start.month - 1 + m;
            rec.timestamp = {window.start.year + month_total / 12, month_total % 12 + 1,
                             1 + static_cast<int>(e % 28), 12, 0, 0};
            out.records.push_back(std::move(rec));
        }
    }
    return out;
}

// Full fixture: zone polygons, event records with uniform in-zone
// locations, severity coin flips, and ground-truth labels. Every stream is
// keyed by (seed, zone, event), so output is identical however it is
// scheduled.
inline SynthOutput generate(const SynthSpec& spec) {
    validate_synth_spec(spec);
    SynthOutput out;
    auto g = detail::lattice_geometry(spec);
    auto n = static_cast<std::size_t>(spec.grid_dim) * static_cast<std::size_t>(spec.grid_dim);

    out.hotspot_label.assign(n, 0);
    if (spec.hotspot_multiplier > 1.0) {
        for (auto z : spec.hotspot_zones) out.hotspot_label[static_cast<std::size_t>(z)] = 1;
    }
    out.zone_counts = generate_counts(spec);

    for (int r = 0; r < spec.grid_dim; ++r) {
        for (int c = 0; c < spec.grid_dim; ++c) {
            std::int32_t idx = lattice_zone(spec.grid_dim, r, c);
            ZonePolygon poly;
            poly.zone_id = detail::lattice_zone_id(idx);
            double lon0 = g.lon_edges[static_cast<std::size_t>(c)];
            double lon1 = g.lon_edges[static_cast<std::size_t>(c) + 1];
            double lat0 = g.lat_edges[static_cast<std::size_t>(r)];
            double lat1 = g.lat_edges[static_cast<std::size_t>(r) + 1];
            poly.outer = {{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}, {lon0, lat0}};
            out.zones.parts.push_back(std::move(poly));
        }
    }
    out.zones.rebuild_index();

    DateWindow window;
    int window_months = (window.end.year - window.start.year) * 12 + window.end.month -
                        window.start.month + 1;
    for (std::size_t z = 0; z < n; ++z) {
        int row = static_cast<int>(z) / spec.grid_dim;
        int col = static_cast<int>(z) % spec.grid_dim;
        double lon0 = g.lon_edges[static_cast<std::size_t>(col)];
        double lon1 = g.lon_edges[static_cast<std::size_t>(col) + 1];
        double lat0 = g.lat_edges[static_cast<std::size_t>(row)];
        double lat1 = g.lat_edges[static_cast<std::size_t>(row) + 1];
        double p_severe = out.hotspot_label[z] ? spec.severe_prob_hotspot : spec.severe_prob_base;
        for (std::int64_t e = 0; e < out.zone_counts[z]; ++e) {
            CounterRng rng(spec.seed, stream::synth_event(z, static_cast<std::uint64_t>(e)));
            CrashRecord rec;
            char buf[48];
            std::snprintf(buf, sizeof(buf), "S%04zu-%05lld", z, static_cast<long long>(e));
            rec.report_id = buf;
            rec.location = {lon0 + rng.next_double() * (lon1 - lon0),
                            lat0 + rng.next_double() * (lat1 - lat0)};
            rec.severe = rng.next_double() < p_severe;
            // Deterministic month spread; the temporal stage only needs
            // valid in-window timestamps.
            int m = static_cast<int>((z * 7 + static_cast<std::size_t>(e)) %
                                     static_cast<std::size_t>(window_months));
            int month_total = window.start.month - 1 + m;
            rec.timestamp = {window.start.year + month_total / 12, month_total % 12 + 1,
                             1 + static_cast<int>(e % 28), 12, 0, 0};
            out.records.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace hotspot
