#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hotspot/errors.hpp"
#include "hotspot/geo.hpp"

namespace hotspot {

// Planar coordinate access; lets the polygon predicates run both on
// geographic (lon/lat) and projected (x/y) vertices. The equirectangular
// map is monotone per axis, so containment agrees between the two spaces.
inline double coord_u(const GeoPoint& p) { return p.lon; }
inline double coord_v(const GeoPoint& p) { return p.lat; }
inline double coord_u(const PlanarPoint& p) { return p.x; }
inline double coord_v(const PlanarPoint& p) { return p.y; }

template <typename Pt>
struct PolygonT {
    std::string zone_id;
    std::vector<Pt> outer;                // closed ring, first == last
    std::vector<std::vector<Pt>> holes;   // each closed
};

using ZonePolygon = PolygonT<GeoPoint>;
using PlanarPolygon = PolygonT<PlanarPoint>;

// Appends the first vertex if the ring is open; rejects rings that are
// degenerate after closing (< 4 vertices including the repeated one).
template <typename Pt>
void normalize_ring(std::vector<Pt>& ring) {
    if (ring.size() >= 3) {
        const Pt& a = ring.front();
        const Pt& b = ring.back();
        if (coord_u(a) != coord_u(b) || coord_v(a) != coord_v(b)) {
            ring.push_back(a);
        }
    }
    if (ring.size() < 4) {
        throw data_error("degenerate polygon ring: " + std::to_string(ring.size()) +
                         " vertices after closing, need at least 4");
    }
}

template <typename Pt>
void normalize_polygon(PolygonT<Pt>& poly) {
    normalize_ring(poly.outer);
    for (auto& h : poly.holes) normalize_ring(h);
}

namespace detail {

// Even-odd crossing count for one ring. The edge convention is half-open:
// an edge includes its lower endpoint and excludes its upper (in v, and
// effectively the left boundary in u via the strict comparison), so a point
// on a border shared by two rings is counted by exactly one of them.
template <typename Pt>
bool ring_crossings_odd(double u, double v, const std::vector<Pt>& ring) {
    bool odd = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        double ui = coord_u(ring[i]), vi = coord_v(ring[i]);
        double uj = coord_u(ring[j]), vj = coord_v(ring[j]);
        if ((vi > v) != (vj > v)) {
            double u_int = uj + (v - vj) * (ui - uj) / (vi - vj);
            if (u < u_int) odd = !odd;
        }
    }
    return odd;
}

}  // namespace detail

// Even-odd rule over all rings: a point inside a hole is outside.
template <typename Pt, typename Q>
bool point_in_polygon(const Q& p, const PolygonT<Pt>& poly) {
    if (poly.outer.size() < 4) {
        throw data_error("degenerate polygon: outer ring has fewer than 4 vertices");
    }
    for (const auto& h : poly.holes) {
        if (h.size() < 4) throw data_error("degenerate polygon: hole ring has fewer than 4 vertices");
    }
    double u = coord_u(p), v = coord_v(p);
    bool inside = detail::ring_crossings_odd(u, v, poly.outer);
    for (const auto& h : poly.holes) {
        if (detail::ring_crossings_odd(u, v, h)) inside = !inside;
    }
    return inside;
}

template <typename Pt>
double ring_signed_area(const std::vector<Pt>& ring) {
    double a = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        a += coord_u(ring[i]) * coord_v(ring[i + 1]) - coord_u(ring[i + 1]) * coord_v(ring[i]);
    }
    return 0.5 * a;
}

namespace detail {

template <typename Pt>
void ring_centroid_accumulate(const std::vector<Pt>& ring, double sign, double& area_sum,
                              double& cx_sum, double& cy_sum) {
    double a = ring_signed_area(ring);
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        double cross = coord_u(ring[i]) * coord_v(ring[i + 1]) -
                       coord_u(ring[i + 1]) * coord_v(ring[i]);
        cx += (coord_u(ring[i]) + coord_u(ring[i + 1])) * cross;
        cy += (coord_v(ring[i]) + coord_v(ring[i + 1])) * cross;
    }
    // cx/cy carry the ring's own orientation sign through `cross`; flip the
    // whole contribution so outer rings add and holes subtract regardless of
    // stored winding.
    double flip = (a < 0.0) ? -sign : sign;
    area_sum += flip * std::abs(a);
    cx_sum += flip * std::abs(a) * (cx / (6.0 * a));
    cy_sum += flip * std::abs(a) * (cy / (6.0 * a));
}

}  // namespace detail

// Area-weighted centroid via the shoelace formula; holes subtract.
template <typename Pt>
Pt centroid(const PolygonT<Pt>& poly) {
    double area = 0.0, cx = 0.0, cy = 0.0;
    detail::ring_centroid_accumulate(poly.outer, +1.0, area, cx, cy);
    for (const auto& h : poly.holes) detail::ring_centroid_accumulate(h, -1.0, area, cx, cy);
    if (area == 0.0 || !std::isfinite(area)) {
        throw data_error("polygon '" + poly.zone_id + "' has zero total area");
    }
    Pt c{};
    if constexpr (std::is_same_v<Pt, GeoPoint>) {
        c.lon = cx / area;
        c.lat = cy / area;
    } else {
        c.x = cx / area;
        c.y = cy / area;
    }
    return c;
}

// Signed area of the full polygon (outer minus holes), in vertex units.
template <typename Pt>
double polygon_area(const PolygonT<Pt>& poly) {
    double a = std::abs(ring_signed_area(poly.outer));
    for (const auto& h : poly.holes) a -= std::abs(ring_signed_area(h));
    return a;
}

struct Box {
    double u_min = 0.0, v_min = 0.0, u_max = 0.0, v_max = 0.0;
    bool contains(double u, double v) const {
        return u >= u_min && u <= u_max && v >= v_min && v <= v_max;
    }
};

template <typename Pt>
Box polygon_bbox(const PolygonT<Pt>& poly) {
    Box b{coord_u(poly.outer[0]), coord_v(poly.outer[0]), coord_u(poly.outer[0]),
          coord_v(poly.outer[0])};
    for (const auto& p : poly.outer) {
        b.u_min = std::min(b.u_min, coord_u(p));
        b.u_max = std::max(b.u_max, coord_u(p));
        b.v_min = std::min(b.v_min, coord_v(p));
        b.v_max = std::max(b.v_max, coord_v(p));
    }
    return b;
}

}  // namespace hotspot
