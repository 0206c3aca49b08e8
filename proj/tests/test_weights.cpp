#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hotspot/rng.hpp"
#include "hotspot/weights.hpp"

using namespace hotspot;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<PlanarPoint> random_points(std::size_t n, std::uint64_t seed, double scale = 1000.0) {
    CounterRng rng(seed, 0);
    std::vector<PlanarPoint> pts(n);
    for (auto& p : pts) p = {rng.next_double() * scale, rng.next_double() * scale};
    return pts;
}

std::set<std::int32_t> row_neighbors(const SpatialWeights& w, std::size_t i) {
    std::set<std::int32_t> s;
    for (const auto& e : w.rows[i]) s.insert(e.index);
    return s;
}

}  // namespace

TEST_CASE("knn on collinear points with a tie broken toward the smaller index") {
    std::vector<PlanarPoint> pts = {{0, 0}, {1, 0}, {2, 0}, {4, 0}};
    auto w = knn_weights(pts, 1);
    CHECK(row_neighbors(w, 0) == std::set<std::int32_t>{1});
    CHECK(row_neighbors(w, 1) == std::set<std::int32_t>{0});  // tie: 0 and 2 both at distance 1
    CHECK(row_neighbors(w, 2) == std::set<std::int32_t>{1});
    CHECK(row_neighbors(w, 3) == std::set<std::int32_t>{2});
}

TEST_CASE("k = n-1 yields the complete directed graph without self loops") {
    auto pts = random_points(7, 31);
    auto w = knn_weights(pts, 6);
    for (std::size_t i = 0; i < 7; ++i) {
        auto nbrs = row_neighbors(w, i);
        CHECK(nbrs.size() == 6);
        CHECK(nbrs.count(static_cast<std::int32_t>(i)) == 0);
    }
}

TEST_CASE("knn matches a naive all-pairs sort oracle") {
    auto pts = random_points(100, 37);
    const int k = 10;
    auto w = knn_weights(pts, k);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        // oracle: full sort by (squared distance, index)
        std::vector<std::pair<double, std::int32_t>> all;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j == i) continue;
            double dx = pts[j].x - pts[i].x, dy = pts[j].y - pts[i].y;
            all.emplace_back(dx * dx + dy * dy, static_cast<std::int32_t>(j));
        }
        std::sort(all.begin(), all.end());
        std::set<std::int32_t> expected;
        for (int m = 0; m < k; ++m) expected.insert(all[static_cast<std::size_t>(m)].second);
        CHECK(row_neighbors(w, i) == expected);
    }
}

TEST_CASE("knn is invariant under translation and rotation") {
    auto pts = random_points(60, 41);
    const int k = 5;
    auto base = knn_weights(pts, k);
    double theta = 0.6;
    std::vector<PlanarPoint> moved(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double x = pts[i].x * std::cos(theta) - pts[i].y * std::sin(theta) + 12345.0;
        double y = pts[i].x * std::sin(theta) + pts[i].y * std::cos(theta) - 999.0;
        moved[i] = {x, y};
    }
    auto rotated = knn_weights(moved, k);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(row_neighbors(base, i) == row_neighbors(rotated, i));
    }
}

TEST_CASE("knn is deterministic across worker counts") {
    auto pts = random_points(80, 43);
    auto w1 = knn_weights(pts, 8, 1);
    auto w8 = knn_weights(pts, 8, 8);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        REQUIRE(w1.rows[i].size() == w8.rows[i].size());
        for (std::size_t m = 0; m < w1.rows[i].size(); ++m) {
            CHECK(w1.rows[i][m].index == w8.rows[i][m].index);
            CHECK(w1.rows[i][m].weight == w8.rows[i][m].weight);
        }
    }
}

TEST_CASE("knn sizing error names n and k") {
    auto pts = random_points(5, 47);
    CHECK_THROWS_WITH(knn_weights(pts, 5), Catch::Matchers::ContainsSubstring("n=5") &&
                                               Catch::Matchers::ContainsSubstring("k=5"));
}

TEST_CASE("row standardization: binary rows become 1/k") {
    auto pts = random_points(30, 53);
    auto w = row_standardize(knn_weights(pts, 10));
    for (const auto& row : w.rows) {
        for (const auto& e : row) CHECK_THAT(e.weight, WithinAbs(0.1, 1e-15));
    }
    CHECK(w.meta.standardized);
}

TEST_CASE("row standardization: rows sum to one within 1e-12") {
    auto pts = random_points(50, 59);
    auto w = row_standardize(knn_weights(pts, 7));
    for (std::size_t i = 0; i < w.rows.size(); ++i) {
        CHECK_THAT(w.row_sum(i), WithinAbs(1.0, 1e-12));
    }
    // S0 == n for full rows
    CHECK_THAT(w.s0(), WithinAbs(50.0, 1e-9));
}

TEST_CASE("row standardization is idempotent and scales arbitrary weights") {
    SpatialWeights w;
    w.n = 3;
    w.rows = {{{1, 3.0}, {2, 1.0}}, {{0, 2.0}}, {}};
    auto s1 = row_standardize(w);
    CHECK_THAT(s1.rows[0][0].weight, WithinAbs(0.75, 1e-15));
    CHECK_THAT(s1.rows[0][1].weight, WithinAbs(0.25, 1e-15));
    CHECK_THAT(s1.rows[1][0].weight, WithinAbs(1.0, 1e-15));
    CHECK(s1.rows[2].empty());  // empty rows stay empty
    auto s2 = row_standardize(s1);
    for (std::size_t i = 0; i < s1.rows.size(); ++i) {
        for (std::size_t m = 0; m < s1.rows[i].size(); ++m) {
            CHECK_THAT(s2.rows[i][m].weight, WithinAbs(s1.rows[i][m].weight, 1e-14));
        }
    }
}

TEST_CASE("symmetrize forms the union with the transpose") {
    std::vector<PlanarPoint> pts = {{0, 0}, {1, 0}, {2, 0}, {10, 0}};
    auto w = knn_weights(pts, 1);
    // 3 -> 2 but not 2 -> 3
    CHECK(row_neighbors(w, 3) == std::set<std::int32_t>{2});
    CHECK(row_neighbors(w, 2) == std::set<std::int32_t>{1});
    auto sym = symmetrize(w);
    CHECK(row_neighbors(sym, 2) == std::set<std::int32_t>{1, 3});
    CHECK(row_neighbors(sym, 3) == std::set<std::int32_t>{2});
}

TEST_CASE("weights csv round-trips with its sidecar") {
    auto pts = random_points(20, 61);
    auto w = row_standardize(knn_weights(pts, 4));
    std::vector<std::string> ids;
    for (int i = 0; i < 20; ++i) ids.push_back("Z" + std::to_string(i));

    std::ostringstream csv;
    write_weights_csv(csv, w, ids);
    auto meta = parse_weights_sidecar(weights_sidecar_json(w));
    CHECK(meta.method == "knn");
    CHECK(meta.k == 4);
    CHECK(meta.standardized);

    std::istringstream in(csv.str());
    auto w2 = read_weights_csv(in, ids, meta);
    REQUIRE(w2.n == w.n);
    for (std::size_t i = 0; i < w.rows.size(); ++i) {
        REQUIRE(w2.rows[i].size() == w.rows[i].size());
        for (std::size_t m = 0; m < w.rows[i].size(); ++m) {
            CHECK(w2.rows[i][m].index == w.rows[i][m].index);
            CHECK(w2.rows[i][m].weight == w.rows[i][m].weight);  // exact round trip
        }
    }
}

TEST_CASE("weights csv import rejects unknown ids and self loops") {
    std::vector<std::string> ids = {"A", "B"};
    std::istringstream bad_id("from_id,to_id,weight\nA,X,1.0\n");
    CHECK_THROWS_AS(read_weights_csv(bad_id, ids), data_error);
    std::istringstream self("from_id,to_id,weight\nA,A,1.0\n");
    CHECK_THROWS_AS(read_weights_csv(self, ids), data_error);
    std::istringstream neg("from_id,to_id,weight\nA,B,-1.0\n");
    CHECK_THROWS_AS(read_weights_csv(neg, ids), data_error);
}
