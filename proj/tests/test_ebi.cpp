#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hotspot/autocorr.hpp"
#include "hotspot/ebi.hpp"
#include "hotspot/rng.hpp"

using namespace hotspot;
using Catch::Matchers::WithinAbs;

TEST_CASE("smoothed rate: the zero-data prior is exactly one half") {
    CHECK(smoothed_rate(0, 0) == 0.5);
}

TEST_CASE("smoothed rate: worked fractions") {
    CHECK_THAT(smoothed_rate(3, 98), WithinAbs(0.04, 1e-15));
    CHECK_THAT(smoothed_rate(1, 9), WithinAbs(0.18181818181818182, 1e-15));
}

TEST_CASE("smoothed rate rejects severe > total") {
    CHECK_THROWS_AS(smoothed_rate(5, 3), data_error);
    CHECK_THROWS_AS(smoothed_rate(-1, 3), data_error);
}

TEST_CASE("rate std: worked values") {
    CHECK_THAT(rate_std(0.5, 0), WithinAbs(0.3535533905932738, 1e-15));
    CHECK_THAT(rate_std(0.04, 98), WithinAbs(0.019595917942265426, 1e-15));
}

TEST_CASE("rate std decreases monotonically in total at fixed rate") {
    double prev = rate_std(0.1, 1);
    for (std::int64_t total : {10, 100, 1000, 100000}) {
        double sd = rate_std(0.1, total);
        CHECK(sd < prev);
        prev = sd;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("rate std rejects degenerate rates") {
    CHECK_THROWS_AS(rate_std(0.0, 5), data_error);
    CHECK_THROWS_AS(rate_std(1.0, 5), data_error);
}

TEST_CASE("global rate pools the sums before one smoothing pair") {
    CHECK(global_rate(std::vector<SeverityInput>{{0, 0}}) == 0.5);
    CHECK_THAT(global_rate(std::vector<SeverityInput>{{1, 8}, {3, 18}}),
               WithinAbs(0.17857142857142858, 1e-15));
}

TEST_CASE("global rate always lies strictly inside (0,1)") {
    CounterRng rng(203, 0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<SeverityInput> zones;
        auto m = 1 + rng.next_below(20);
        for (std::size_t i = 0; i < m; ++i) {
            auto total = static_cast<std::int64_t>(rng.next_below(1000));
            auto severe = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(total) + 1));
            zones.push_back({severe, total});
        }
        double g = global_rate(zones);
        CHECK(g > 0.0);
        CHECK(g < 1.0);
    }
}

TEST_CASE("ebi vanishes for a zone whose rate equals the global rate") {
    // zones (3,8) and (5,8): global = 9/18 = 0.5; a (1,2) zone has rate 0.5
    std::vector<SeverityInput> zones = {{3, 8}, {5, 8}, {1, 2}};
    auto v = ebi_transform(zones);
    CHECK_THAT(v.global_severity_rate, WithinAbs(0.5, 1e-15));
    CHECK_THAT(v.ebi[2], WithinAbs(0.0, 1e-15));
}

TEST_CASE("two symmetric zones standardize to -1 and +1") {
    // rates 0.4 and 0.6 with equal totals: equidistant from the 0.5 global,
    // equal binomial std, so the standardized pair is exactly (-1, +1)
    std::vector<SeverityInput> zones = {{3, 8}, {5, 8}};
    auto v = ebi_transform(zones);
    CHECK_THAT(v.severity_rate[0], WithinAbs(0.4, 1e-15));
    CHECK_THAT(v.severity_rate[1], WithinAbs(0.6, 1e-15));
    CHECK_THAT(v.ebi_standardized[0], WithinAbs(-1.0, 1e-12));
    CHECK_THAT(v.ebi_standardized[1], WithinAbs(1.0, 1e-12));
    CHECK_THAT(v.ebi_standardized[0] + v.ebi_standardized[1], WithinAbs(0.0, 1e-12));
}

namespace {

// Independent transliteration of the rate equations in long double.
struct EbiOracleRow {
    long double rate, sd, ebi;
};

std::vector<EbiOracleRow> ebi_oracle(const std::vector<SeverityInput>& zones,
                                     long double& mean_out, long double& sd_out) {
    long double severe_sum = 0, total_sum = 0;
    for (const auto& z : zones) {
        severe_sum += z.severe;
        total_sum += z.total;
    }
    long double global = (severe_sum + 1.0L) / (total_sum + 2.0L);
    std::vector<EbiOracleRow> rows;
    for (const auto& z : zones) {
        EbiOracleRow r;
        r.rate = (static_cast<long double>(z.severe) + 1.0L) /
                 (static_cast<long double>(z.total) + 2.0L);
        r.sd = std::sqrt(r.rate * (1.0L - r.rate) / (static_cast<long double>(z.total) + 2.0L));
        r.ebi = (r.rate - global) / r.sd;
        rows.push_back(r);
    }
    long double mean = 0;
    for (const auto& r : rows) mean += r.ebi;
    mean /= static_cast<long double>(rows.size());
    long double var = 0;
    for (const auto& r : rows) var += (r.ebi - mean) * (r.ebi - mean);
    var /= static_cast<long double>(rows.size());
    mean_out = mean;
    sd_out = std::sqrt(var);
    return rows;
}

}  // namespace

TEST_CASE("ebi transform matches an independent high-precision rerun") {
    CounterRng rng(211, 0);
    std::vector<SeverityInput> zones;
    for (int i = 0; i < 20; ++i) {
        auto total = static_cast<std::int64_t>(rng.next_below(5000));
        auto severe =
            static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(total / 5) + 1));
        zones.push_back({severe, total});
    }
    auto v = ebi_transform(zones);
    long double mean, sd;
    auto oracle = ebi_oracle(zones, mean, sd);
    for (std::size_t i = 0; i < zones.size(); ++i) {
        CHECK_THAT(v.severity_rate[i], WithinAbs(static_cast<double>(oracle[i].rate), 1e-12));
        CHECK_THAT(v.severity_rate_std[i], WithinAbs(static_cast<double>(oracle[i].sd), 1e-12));
        CHECK_THAT(v.ebi[i], WithinAbs(static_cast<double>(oracle[i].ebi), 1e-12));
        CHECK_THAT(v.ebi_standardized[i],
                   WithinAbs(static_cast<double>((oracle[i].ebi - mean) / sd), 1e-12));
    }
}

TEST_CASE("standardized output has mean zero, population stdev one") {
    CounterRng rng(223, 0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<SeverityInput> zones;
        auto m = 2 + rng.next_below(40);
        for (std::size_t i = 0; i < m; ++i) {
            auto total = static_cast<std::int64_t>(rng.next_below(300));
            auto severe = static_cast<std::int64_t>(
                rng.next_below(static_cast<std::uint64_t>(total) + 1));
            zones.push_back({severe, total});
        }
        EbiVector v;
        try {
            v = ebi_transform(zones);
        } catch (const degeneracy_error&) {
            continue;  // constant EBI across zones is a legal degenerate draw
        }
        double mean = 0.0;
        for (double e : v.ebi_standardized) mean += e;
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (double e : v.ebi_standardized) var += (e - mean) * (e - mean);
        var /= static_cast<double>(m);
        CHECK_THAT(mean, WithinAbs(0.0, 1e-10));
        CHECK_THAT(std::sqrt(var), WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("zero-count zones never divide by zero") {
    std::vector<SeverityInput> zones = {{0, 0}, {0, 0}, {2, 10}};
    auto v = ebi_transform(zones);
    CHECK(v.severity_rate[0] == 0.5);
    for (double sd : v.severity_rate_std) CHECK(sd > 0.0);
    for (double e : v.ebi) CHECK(std::isfinite(e));
}

TEST_CASE("shrinkage: |ebi| grows with total at a fixed off-global ratio") {
    // large anchor keeps the global rate nearly constant around 0.1
    double prev = 0.0;
    for (std::int64_t total : {10, 100, 1000, 10000}) {
        std::vector<SeverityInput> zones = {{1000, 10000}, {total / 2, total}};
        auto v = ebi_transform(zones);
        CHECK(std::abs(v.ebi[1]) > prev);
        prev = std::abs(v.ebi[1]);
    }
}

TEST_CASE("smoothed rate moves monotonically from the prior toward the ratio") {
    double r = 0.2;
    double prev = std::abs(smoothed_rate(0, 0) - r);  // |0.5 - r|
    for (std::int64_t total : {10, 100, 1000, 100000}) {
        auto severe = static_cast<std::int64_t>(static_cast<double>(total) * r);
        double gap = std::abs(smoothed_rate(severe, total) - r);
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("degenerate ebi inputs raise degeneracy errors") {
    CHECK_THROWS_AS(ebi_transform(std::vector<SeverityInput>{{1, 10}}), degeneracy_error);
    // identical zones: every EBI equal
    std::vector<SeverityInput> same = {{2, 10}, {2, 10}, {2, 10}};
    CHECK_THROWS_AS(ebi_transform(same), degeneracy_error);
}

TEST_CASE("standardized ebi composes with the lisa classifier") {
    CounterRng rng(227, 0);
    std::vector<SeverityInput> zones;
    for (int i = 0; i < 25; ++i) {
        auto total = 20 + static_cast<std::int64_t>(rng.next_below(200));
        auto severe = static_cast<std::int64_t>(
            rng.next_below(static_cast<std::uint64_t>(total / 4) + 1));
        zones.push_back({severe, total});
    }
    auto v = ebi_transform(zones);
    std::vector<PlanarPoint> cents(25);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c)
            cents[static_cast<std::size_t>(r * 5 + c)] = {(c + 0.5) * 100.0, (r + 0.5) * 100.0};
    auto w = row_standardize(knn_weights(cents, 4));
    auto local = local_moran(v.ebi_standardized, w);
    auto p = conditional_permutation_local(v.ebi_standardized, w, 199, 12);
    auto lisa = classify_lisa(v.ebi_standardized, w, local, p, 0.05);
    CHECK(lisa.label.size() == 25);
}
