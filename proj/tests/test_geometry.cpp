#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hotspot/geo.hpp"
#include "hotspot/polygon.hpp"
#include "hotspot/rng.hpp"
#include "hotspot/zones.hpp"

using namespace hotspot;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PlanarPolygon unit_square() {
    PlanarPolygon p;
    p.zone_id = "sq";
    p.outer = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    return p;
}

ZonePolygon geo_rect(const std::string& id, double lon0, double lat0, double lon1, double lat1) {
    ZonePolygon p;
    p.zone_id = id;
    p.outer = {{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}, {lon0, lat0}};
    return p;
}

}  // namespace

TEST_CASE("projection maps the reference to the origin") {
    GeoPoint ref{-77.2, 39.15};
    auto pts = project(std::vector<GeoPoint>{ref}, ref);
    CHECK(pts[0].x == 0.0);
    CHECK(pts[0].y == 0.0);
}

TEST_CASE("projection handles the cardinal offsets") {
    GeoPoint ref{-77.2, 39.15};
    std::vector<GeoPoint> pts = {{-77.2, 39.16},   // 0.01 deg north
                                 {-77.19, 39.15}}; // 0.01 deg east
    auto planar = project(pts, ref);
    CHECK_THAT(planar[0].y, WithinRel(1111.9492664455875, 1e-12));
    CHECK_THAT(planar[0].x, WithinAbs(0.0, 1e-12));
    CHECK_THAT(planar[1].x, WithinRel(862.3119227520417, 1e-12));
    CHECK_THAT(planar[1].y, WithinAbs(0.0, 1e-12));
}

TEST_CASE("projection inverts to within 1e-9 degrees") {
    Projection proj({-77.2, 39.15});
    CounterRng rng(3, 0);
    for (int i = 0; i < 500; ++i) {
        GeoPoint g{-77.2 + (rng.next_double() - 0.5) * 0.8, 39.15 + (rng.next_double() - 0.5) * 0.5};
        GeoPoint back = proj.to_geo(proj.to_plane(g));
        CHECK_THAT(back.lon, WithinAbs(g.lon, 1e-9));
        CHECK_THAT(back.lat, WithinAbs(g.lat, 1e-9));
    }
}

TEST_CASE("projection rejects non-finite coordinates with the index") {
    std::vector<GeoPoint> pts = {{-77.0, 39.0}, {std::nan(""), 39.0}};
    CHECK_THROWS_WITH(project(pts, {-77.0, 39.0}),
                      Catch::Matchers::ContainsSubstring("point 1"));
}

TEST_CASE("point in polygon: unit square basics") {
    auto sq = unit_square();
    CHECK(point_in_polygon(PlanarPoint{0.5, 0.5}, sq));
    CHECK_FALSE(point_in_polygon(PlanarPoint{1.5, 0.5}, sq));
}

TEST_CASE("point in polygon: hole makes the center outside") {
    auto sq = unit_square();
    sq.holes.push_back({{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}, {0.25, 0.25}});
    CHECK_FALSE(point_in_polygon(PlanarPoint{0.5, 0.5}, sq));
    CHECK(point_in_polygon(PlanarPoint{0.1, 0.5}, sq));
}

TEST_CASE("point in polygon: half-open boundary convention") {
    auto sq = unit_square();
    // lower and left edges belong to the square, upper and right do not
    CHECK(point_in_polygon(PlanarPoint{0.5, 0.0}, sq));
    CHECK(point_in_polygon(PlanarPoint{0.0, 0.5}, sq));
    CHECK_FALSE(point_in_polygon(PlanarPoint{0.5, 1.0}, sq));
    CHECK_FALSE(point_in_polygon(PlanarPoint{1.0, 0.5}, sq));

    // a shared border lands in exactly one of two adjacent squares
    PlanarPolygon right;
    right.zone_id = "sq2";
    right.outer = {{1, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 0}};
    PlanarPoint on_border{1.0, 0.5};
    int memberships = (point_in_polygon(on_border, sq) ? 1 : 0) +
                      (point_in_polygon(on_border, right) ? 1 : 0);
    CHECK(memberships == 1);
}

TEST_CASE("point in polygon is translation invariant") {
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 200; ++trial) {
        double dx = (rng.next_double() - 0.5) * 100.0;
        double dy = (rng.next_double() - 0.5) * 100.0;
        PlanarPoint p{rng.next_double() * 2.0 - 0.5, rng.next_double() * 2.0 - 0.5};
        auto sq = unit_square();
        bool base = point_in_polygon(p, sq);
        for (auto& v : sq.outer) {
            v.x += dx;
            v.y += dy;
        }
        CHECK(point_in_polygon(PlanarPoint{p.x + dx, p.y + dy}, sq) == base);
    }
}

TEST_CASE("degenerate rings are rejected") {
    PlanarPolygon bad;
    bad.zone_id = "bad";
    bad.outer = {{0, 0}, {1, 0}, {0, 0}};
    CHECK_THROWS_AS(point_in_polygon(PlanarPoint{0.5, 0.5}, bad), data_error);
    std::vector<PlanarPoint> two = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(normalize_ring(two), data_error);
}

TEST_CASE("centroid: unit square, triangle, symmetric hole") {
    auto sq = unit_square();
    auto c = centroid(sq);
    CHECK_THAT(c.x, WithinAbs(0.5, 1e-15));
    CHECK_THAT(c.y, WithinAbs(0.5, 1e-15));

    PlanarPolygon tri;
    tri.zone_id = "tri";
    tri.outer = {{0, 0}, {1, 0}, {0, 1}, {0, 0}};
    auto ct = centroid(tri);
    CHECK_THAT(ct.x, WithinAbs(1.0 / 3.0, 1e-15));
    CHECK_THAT(ct.y, WithinAbs(1.0 / 3.0, 1e-15));

    auto holed = unit_square();
    holed.holes.push_back({{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}, {0.25, 0.25}});
    auto ch = centroid(holed);
    CHECK_THAT(ch.x, WithinAbs(0.5, 1e-12));
    CHECK_THAT(ch.y, WithinAbs(0.5, 1e-12));
}

TEST_CASE("centroid honors ring orientation independence") {
    // same square with clockwise outer ring
    PlanarPolygon cw;
    cw.zone_id = "cw";
    cw.outer = {{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}};
    auto c = centroid(cw);
    CHECK_THAT(c.x, WithinAbs(0.5, 1e-15));
    CHECK_THAT(c.y, WithinAbs(0.5, 1e-15));
    CHECK_THAT(polygon_area(cw), WithinAbs(1.0, 1e-15));
}

TEST_CASE("centroid of convex polygons lies inside") {
    CounterRng rng(13, 0);
    for (int trial = 0; trial < 50; ++trial) {
        // random convex polygon: points on an ellipse
        PlanarPolygon poly;
        poly.zone_id = "conv";
        double a = 1.0 + rng.next_double() * 4.0, b = 1.0 + rng.next_double() * 4.0;
        double cx = (rng.next_double() - 0.5) * 10.0, cy = (rng.next_double() - 0.5) * 10.0;
        int m = 5 + static_cast<int>(rng.next_below(8));
        for (int i = 0; i < m; ++i) {
            double t = 2.0 * 3.14159265358979323846 * i / m;
            poly.outer.push_back({cx + a * std::cos(t), cy + b * std::sin(t)});
        }
        poly.outer.push_back(poly.outer.front());
        CHECK(point_in_polygon(centroid(poly), poly));
    }
}

TEST_CASE("centroid rejects zero-area polygons") {
    PlanarPolygon flat;
    flat.zone_id = "flat";
    flat.outer = {{0, 0}, {1, 0}, {2, 0}, {0, 0}};
    CHECK_THROWS_AS(centroid(flat), data_error);
}

TEST_CASE("assign_zones: basic containment and misses") {
    ZoneSet zones;
    zones.parts = {geo_rect("A", 0, 0, 1, 1), geo_rect("B", 1, 0, 2, 1), geo_rect("C", 2, 0, 3, 1)};
    zones.rebuild_index();
    std::vector<GeoPoint> pts = {{0.5, 0.5}, {2.5, 0.5}, {5.0, 5.0}};
    auto assignment = assign_zones(pts, zones);
    CHECK(assignment[0] == 0);
    CHECK(assignment[1] == 2);
    CHECK(assignment[2] == kUnassigned);
}

TEST_CASE("assign_zones: multi-part zones share an id") {
    ZoneSet zones;
    zones.parts = {geo_rect("A", 0, 0, 1, 1), geo_rect("B", 1, 0, 2, 1), geo_rect("A", 3, 0, 4, 1)};
    zones.rebuild_index();
    REQUIRE(zones.zone_count() == 2);
    std::vector<GeoPoint> pts = {{3.5, 0.5}, {0.5, 0.5}};
    auto assignment = assign_zones(pts, zones);
    CHECK(assignment[0] == 0);  // second part of zone A
    CHECK(assignment[1] == 0);
}

namespace {

// Independent oracle: plain first-containing-part scan with no index.
ZoneAssignment naive_assign(const std::vector<GeoPoint>& pts, const ZoneSet& zones) {
    ZoneAssignment out(pts.size(), kUnassigned);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t p = 0; p < zones.parts.size(); ++p) {
            if (point_in_polygon(pts[i], zones.parts[p])) {
                out[i] = zones.part_zone[p];
                break;
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("assign_zones matches the naive scan on random instances") {
    CounterRng rng(17, 0);
    for (int trial = 0; trial < 8; ++trial) {
        ZoneSet zones;
        int m = 20 + static_cast<int>(rng.next_below(31));
        for (int z = 0; z < m; ++z) {
            double lon0 = rng.next_double() * 0.9;
            double lat0 = rng.next_double() * 0.9;
            double w = 0.02 + rng.next_double() * 0.2;
            double h = 0.02 + rng.next_double() * 0.2;
            zones.parts.push_back(
                geo_rect("Z" + std::to_string(z), lon0, lat0, lon0 + w, lat0 + h));
        }
        zones.rebuild_index();
        std::vector<GeoPoint> pts;
        for (int i = 0; i < 2000; ++i) {
            pts.push_back({rng.next_double() * 1.2 - 0.1, rng.next_double() * 1.2 - 0.1});
        }
        auto fast = assign_zones(pts, zones);
        auto slow = naive_assign(pts, zones);
        REQUIRE(fast == slow);
        // worker count must not change the result
        CHECK(assign_zones(pts, zones, 4) == fast);
    }
}

TEST_CASE("assign_zones rejects an empty zone list") {
    ZoneSet zones;
    std::vector<GeoPoint> pts = {{0.0, 0.0}};
    CHECK_THROWS_AS(assign_zones(pts, zones), data_error);
}

TEST_CASE("zone centroids pool multi-part zones by area") {
    ZoneSet zones;
    // two unit squares far apart sharing an id: centroid is the midpoint
    zones.parts = {geo_rect("A", 0.0, 0.0, 0.01, 0.01), geo_rect("A", 0.02, 0.0, 0.03, 0.01)};
    zones.rebuild_index();
    Projection proj(zones_reference(zones));
    auto cents = zone_centroids(zones, proj);
    REQUIRE(cents.size() == 1);
    auto expected = proj.to_plane({0.015, 0.005});
    CHECK_THAT(cents[0].x, WithinAbs(expected.x, 1e-6));
    CHECK_THAT(cents[0].y, WithinAbs(expected.y, 1e-6));
}
