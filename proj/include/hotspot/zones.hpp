#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hotspot/errors.hpp"
#include "hotspot/geo.hpp"
#include "hotspot/parallel.hpp"
#include "hotspot/polygon.hpp"

namespace hotspot {

// A collection of zone parts. Multi-polygon zones are stored as several
// parts sharing one zone_id; the analysis unit is the unique id, ordered by
// first appearance in the source file.
struct ZoneSet {
    std::vector<ZonePolygon> parts;
    std::vector<std::string> ids;        // unique zone ids
    std::vector<std::int32_t> part_zone; // part index -> zone index

    std::size_t zone_count() const { return ids.size(); }

    void rebuild_index() {
        ids.clear();
        part_zone.clear();
        std::unordered_map<std::string, std::int32_t> seen;
        for (const auto& part : parts) {
            auto it = seen.find(part.zone_id);
            if (it == seen.end()) {
                std::int32_t idx = static_cast<std::int32_t>(ids.size());
                seen.emplace(part.zone_id, idx);
                ids.push_back(part.zone_id);
                part_zone.push_back(idx);
            } else {
                part_zone.push_back(it->second);
            }
        }
    }
};

inline constexpr std::int32_t kUnassigned = -1;

// Per-point zone index (or kUnassigned).
using ZoneAssignment = std::vector<std::int32_t>;

namespace detail {

// Uniform-grid bounding-box prefilter. Candidates are kept in part order so
// the outcome is identical to the naive first-containing-part scan.
class ZoneGridIndex {
public:
    explicit ZoneGridIndex(const ZoneSet& zones) {
        boxes_.reserve(zones.parts.size());
        for (const auto& part : zones.parts) boxes_.push_back(polygon_bbox(part));
        extent_ = boxes_.empty() ? Box{} : boxes_[0];
        for (const auto& b : boxes_) {
            extent_.u_min = std::min(extent_.u_min, b.u_min);
            extent_.u_max = std::max(extent_.u_max, b.u_max);
            extent_.v_min = std::min(extent_.v_min, b.v_min);
            extent_.v_max = std::max(extent_.v_max, b.v_max);
        }
        std::size_t n = std::max<std::size_t>(boxes_.size(), 1);
        dim_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n)) * 2));
        cells_.assign(dim_ * dim_, {});
        du_ = (extent_.u_max - extent_.u_min) / static_cast<double>(dim_);
        dv_ = (extent_.v_max - extent_.v_min) / static_cast<double>(dim_);
        if (du_ <= 0.0) du_ = 1.0;
        if (dv_ <= 0.0) dv_ = 1.0;
        for (std::size_t p = 0; p < boxes_.size(); ++p) {
            auto [c0, c1] = cell_range_u(boxes_[p].u_min, boxes_[p].u_max);
            auto [r0, r1] = cell_range_v(boxes_[p].v_min, boxes_[p].v_max);
            for (std::size_t r = r0; r <= r1; ++r)
                for (std::size_t c = c0; c <= c1; ++c)
                    cells_[r * dim_ + c].push_back(static_cast<std::int32_t>(p));
        }
    }

    // Part indices whose bbox may contain (u, v), ascending.
    const std::vector<std::int32_t>& candidates(double u, double v) const {
        static const std::vector<std::int32_t> kEmpty;
        if (!extent_.contains(u, v)) return kEmpty;
        std::size_t c = clamp_cell((u - extent_.u_min) / du_);
        std::size_t r = clamp_cell((v - extent_.v_min) / dv_);
        return cells_[r * dim_ + c];
    }

    const Box& part_box(std::size_t p) const { return boxes_[p]; }

private:
    std::size_t clamp_cell(double f) const {
        if (f < 0.0) return 0;
        auto i = static_cast<std::size_t>(f);
        return std::min(i, dim_ - 1);
    }
    std::pair<std::size_t, std::size_t> cell_range_u(double lo, double hi) const {
        return {clamp_cell((lo - extent_.u_min) / du_), clamp_cell((hi - extent_.u_min) / du_)};
    }
    std::pair<std::size_t, std::size_t> cell_range_v(double lo, double hi) const {
        return {clamp_cell((lo - extent_.v_min) / dv_), clamp_cell((hi - extent_.v_min) / dv_)};
    }

    std::vector<Box> boxes_;
    Box extent_;
    std::size_t dim_ = 1;
    double du_ = 1.0, dv_ = 1.0;
    std::vector<std::vector<std::int32_t>> cells_;
};

}  // namespace detail

// Maps each point to the zone of the first part containing it, or
// kUnassigned. The grid prefilter only skips parts whose bbox excludes the
// point, so the result equals the naive all-pairs scan.
inline ZoneAssignment assign_zones(std::span<const GeoPoint> points, const ZoneSet& zones,
                                   int workers = 1) {
    if (zones.parts.empty()) throw data_error("assign_zones: zone list is empty");
    detail::ZoneGridIndex index(zones);
    ZoneAssignment out(points.size(), kUnassigned);
    parallel_for_ranges(points.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double u = points[i].lon, v = points[i].lat;
            for (std::int32_t p : index.candidates(u, v)) {
                if (!index.part_box(static_cast<std::size_t>(p)).contains(u, v)) continue;
                if (point_in_polygon(points[i], zones.parts[static_cast<std::size_t>(p)])) {
                    out[i] = zones.part_zone[static_cast<std::size_t>(p)];
                    break;
                }
            }
        }
    });
    return out;
}

// Area-weighted planar centroid per unique zone (multi-part zones pool
// their parts). KNN weights are built on these.
inline std::vector<PlanarPoint> zone_centroids(const ZoneSet& zones, const Projection& proj) {
    std::vector<double> area(zones.zone_count(), 0.0);
    std::vector<double> cx(zones.zone_count(), 0.0), cy(zones.zone_count(), 0.0);
    for (std::size_t p = 0; p < zones.parts.size(); ++p) {
        PlanarPolygon planar;
        planar.zone_id = zones.parts[p].zone_id;
        planar.outer.reserve(zones.parts[p].outer.size());
        for (const auto& g : zones.parts[p].outer) planar.outer.push_back(proj.to_plane(g));
        for (const auto& h : zones.parts[p].holes) {
            auto& ring = planar.holes.emplace_back();
            ring.reserve(h.size());
            for (const auto& g : h) ring.push_back(proj.to_plane(g));
        }
        double a = polygon_area(planar);
        PlanarPoint c = centroid(planar);
        auto z = static_cast<std::size_t>(zones.part_zone[p]);
        area[z] += a;
        cx[z] += a * c.x;
        cy[z] += a * c.y;
    }
    std::vector<PlanarPoint> out(zones.zone_count());
    for (std::size_t z = 0; z < zones.zone_count(); ++z) {
        if (area[z] <= 0.0) throw data_error("zone '" + zones.ids[z] + "' has zero total area");
        out[z] = {cx[z] / area[z], cy[z] / area[z]};
    }
    return out;
}

// Default projection reference: center of the zones' bounding box.
inline GeoPoint zones_reference(const ZoneSet& zones) {
    if (zones.parts.empty()) throw data_error("zones_reference: zone list is empty");
    Box b = polygon_bbox(zones.parts[0]);
    for (const auto& part : zones.parts) {
        Box pb = polygon_bbox(part);
        b.u_min = std::min(b.u_min, pb.u_min);
        b.u_max = std::max(b.u_max, pb.u_max);
        b.v_min = std::min(b.v_min, pb.v_min);
        b.v_max = std::max(b.v_max, pb.v_max);
    }
    return {0.5 * (b.u_min + b.u_max), 0.5 * (b.v_min + b.v_max)};
}

}  // namespace hotspot
