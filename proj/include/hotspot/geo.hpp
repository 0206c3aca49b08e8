#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hotspot/errors.hpp"

namespace hotspot {

struct GeoPoint {
    double lon = 0.0;  // degrees east, [-180, 180]
    double lat = 0.0;  // degrees north, [-90, 90]
};

struct PlanarPoint {
    double x = 0.0;  // meters east of reference
    double y = 0.0;  // meters north of reference
};

inline constexpr double kEarthRadiusMeters = 6371000.0;
inline constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

inline bool geo_in_range(const GeoPoint& p) {
    return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
           p.lat >= -90.0 && p.lat <= 90.0;
}

// Equirectangular projection about a fixed reference. At county scale
// (<100 km) the distortion stays under 0.5%, which is all the KNN ordering
// and KDE bandwidths need; in exchange the map is exactly invertible and
// has no external dependencies.
class Projection {
public:
    explicit Projection(GeoPoint reference) : ref_(reference) {
        if (!geo_in_range(reference)) {
            throw data_error("projection reference out of coordinate range");
        }
        cos_lat0_ = std::cos(reference.lat * kDegToRad);
    }

    GeoPoint reference() const { return ref_; }

    PlanarPoint to_plane(const GeoPoint& p) const {
        return {kEarthRadiusMeters * (p.lon - ref_.lon) * cos_lat0_ * kDegToRad,
                kEarthRadiusMeters * (p.lat - ref_.lat) * kDegToRad};
    }

    GeoPoint to_geo(const PlanarPoint& p) const {
        return {ref_.lon + p.x / (kEarthRadiusMeters * cos_lat0_ * kDegToRad),
                ref_.lat + p.y / (kEarthRadiusMeters * kDegToRad)};
    }

private:
    GeoPoint ref_;
    double cos_lat0_;
};

// Bulk projection; rejects non-finite coordinates naming the offending index.
inline std::vector<PlanarPoint> project(std::span<const GeoPoint> points, GeoPoint reference) {
    Projection proj(reference);
    std::vector<PlanarPoint> out;
    out.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].lon) || !std::isfinite(points[i].lat)) {
            throw data_error("point " + std::to_string(i) + ": non-finite coordinate");
        }
        out.push_back(proj.to_plane(points[i]));
    }
    return out;
}

struct GeoBounds {
    double lon_min = -180.0;
    double lon_max = 180.0;
    double lat_min = -90.0;
    double lat_max = 90.0;

    bool contains(const GeoPoint& p) const {
        return p.lon >= lon_min && p.lon <= lon_max && p.lat >= lat_min && p.lat <= lat_max;
    }
};

}  // namespace hotspot
