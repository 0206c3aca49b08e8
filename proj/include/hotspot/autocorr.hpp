#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hotspot/errors.hpp"
#include "hotspot/parallel.hpp"
#include "hotspot/rng.hpp"
#include "hotspot/weights.hpp"

namespace hotspot {

// Tail convention for permutation pseudo p-values.
//
// `greater` tests the clustering alternative (I above its null draws) and is
// the default: under spatial randomness its pseudo-p is uniform, so a cut at
// alpha rejects at rate alpha. `directional` counts toward whichever tail
// the observed statistic fell in; that folded scheme doubles the null
// rejection rate (~2*alpha) and is provided only for compatibility with the
// common GeoDa-style convention.
enum class Tail { greater, less, directional };

inline const char* tail_name(Tail t) {
    switch (t) {
        case Tail::greater: return "greater";
        case Tail::less: return "less";
        case Tail::directional: return "directional";
    }
    return "?";
}

inline Tail tail_from_name(std::string_view name) {
    if (name == "greater") return Tail::greater;
    if (name == "less") return Tail::less;
    if (name == "directional") return Tail::directional;
    throw config_error("unknown alternative '" + std::string(name) +
                       "' (expected greater, less, or directional)");
}

struct Standardized {
    std::vector<double> z;  // deviations from the mean
    double m2 = 0.0;        // sum(z^2)/n
};

inline Standardized standardize_values(std::span<const double> x) {
    if (x.size() < 2) throw degeneracy_error("standardize: need at least 2 values");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    Standardized s;
    s.z.reserve(x.size());
    double ss = 0.0;
    bool varied = false;
    for (double v : x) {
        double d = v - mean;
        s.z.push_back(d);
        ss += d * d;
        if (v != x[0]) varied = true;
    }
    if (!varied || ss == 0.0) throw degeneracy_error("standardize: zero variance (constant input)");
    s.m2 = ss / static_cast<double>(x.size());
    return s;
}

namespace detail {

inline void check_dims(std::size_t n_values, const SpatialWeights& w) {
    if (static_cast<std::size_t>(w.n) != n_values) {
        throw data_error("moran: " + std::to_string(n_values) + " values vs weights over " +
                         std::to_string(w.n) + " zones");
    }
}

inline std::vector<double> spatial_lag(std::span<const double> z, const SpatialWeights& w) {
    std::vector<double> lag(z.size(), 0.0);
    for (std::size_t i = 0; i < w.rows.size(); ++i) {
        double acc = 0.0;
        for (const auto& e : w.rows[i]) acc += e.weight * z[static_cast<std::size_t>(e.index)];
        lag[i] = acc;
    }
    return lag;
}

// I = (n/S0) * cross / sum z^2 == cross / (S0 * m2), since sum z^2 = n * m2.
inline double moran_from_z(std::span<const double> z, double m2, const SpatialWeights& w,
                           double s0) {
    double cross = 0.0;
    for (std::size_t i = 0; i < w.rows.size(); ++i) {
        double acc = 0.0;
        for (const auto& e : w.rows[i]) acc += e.weight * z[static_cast<std::size_t>(e.index)];
        cross += z[i] * acc;
    }
    return cross / (s0 * m2);
}

// pseudo_p = (1 + #{replicates at least as extreme}) / (1 + permutations)
inline double pseudo_p(Tail tail, bool observed_positive_deviation, std::int64_t count_ge,
                       std::int64_t count_le, int permutations) {
    double denom = 1.0 + permutations;
    switch (tail) {
        case Tail::greater: return (1.0 + static_cast<double>(count_ge)) / denom;
        case Tail::less: return (1.0 + static_cast<double>(count_le)) / denom;
        case Tail::directional:
            return observed_positive_deviation
                       ? (1.0 + static_cast<double>(count_ge)) / denom
                       : (1.0 + static_cast<double>(count_le)) / denom;
    }
    return 1.0;
}

}  // namespace detail

// Global Moran's I: (n / S0) * sum_ij w_ij z_i z_j / sum_i z_i^2.
inline double global_moran(std::span<const double> x, const SpatialWeights& w) {
    detail::check_dims(x.size(), w);
    Standardized s = standardize_values(x);
    double s0 = w.s0();
    if (s0 <= 0.0) throw data_error("moran: weights sum to zero");
    return detail::moran_from_z(s.z, s.m2, w, s0);
}

struct MoranGlobalResult {
    double I = 0.0;
    double expected_I = 0.0;  // -1/(n-1)
    double pseudo_p = 1.0;
    int permutations = 0;
    std::uint64_t seed = 0;
    Tail tail = Tail::greater;
    std::int64_t count_ge = 0;  // replicates with I* >= I_obs
    std::int64_t count_le = 0;  // replicates with I* <= I_obs
};

// Permutation test for global Moran's I. Values are randomly reassigned to
// zones each replicate; replicate r draws from substream (seed, r), so the
// result is bit-identical for any worker count.
inline MoranGlobalResult permutation_test_global(std::span<const double> x,
                                                 const SpatialWeights& w, int permutations,
                                                 std::uint64_t seed, Tail tail = Tail::greater,
                                                 int workers = 1) {
    if (permutations < 99) throw config_error("permutation test: need at least 99 permutations");
    detail::check_dims(x.size(), w);
    Standardized s = standardize_values(x);
    double s0 = w.s0();
    if (s0 <= 0.0) throw data_error("moran: weights sum to zero");
    const double i_obs = detail::moran_from_z(s.z, s.m2, w, s0);
    const auto n = x.size();

    std::vector<std::int64_t> ge_chunks, le_chunks;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    // Pre-split so each worker owns a private tally slot.
    {
        std::size_t total = static_cast<std::size_t>(permutations);
        std::size_t n_chunks = std::max<std::size_t>(1, std::min<std::size_t>(
            static_cast<std::size_t>(std::max(workers, 1)), total));
        std::size_t base = total / n_chunks, rem = total % n_chunks, begin = 0;
        for (std::size_t c = 0; c < n_chunks; ++c) {
            std::size_t len = base + (c < rem ? 1 : 0);
            ranges.emplace_back(begin, begin + len);
            begin += len;
        }
        ge_chunks.assign(ranges.size(), 0);
        le_chunks.assign(ranges.size(), 0);
    }
    parallel_for_ranges(ranges.size(), workers, [&](std::size_t cb, std::size_t ce) {
        std::vector<double> zp(n);
        for (std::size_t c = cb; c < ce; ++c) {
            for (std::size_t r = ranges[c].first; r < ranges[c].second; ++r) {
                CounterRng rng(seed, stream::kGlobalPermutation | static_cast<std::uint64_t>(r));
                zp.assign(s.z.begin(), s.z.end());
                shuffle(zp, rng);
                double i_rep = detail::moran_from_z(zp, s.m2, w, s0);
                if (i_rep >= i_obs) ++ge_chunks[c];
                if (i_rep <= i_obs) ++le_chunks[c];
            }
        }
    });

    MoranGlobalResult result;
    result.I = i_obs;
    result.expected_I = -1.0 / (static_cast<double>(n) - 1.0);
    result.permutations = permutations;
    result.seed = seed;
    result.tail = tail;
    for (std::size_t c = 0; c < ranges.size(); ++c) {
        result.count_ge += ge_chunks[c];
        result.count_le += le_chunks[c];
    }
    result.pseudo_p = detail::pseudo_p(tail, i_obs >= result.expected_I, result.count_ge,
                                       result.count_le, permutations);
    return result;
}

// Local Moran's I: local_I_i = (z_i / m2) * sum_j w_ij z_j, with
// m2 = sum z^2 / n. With row-standardized weights, mean(local_I) == I.
inline std::vector<double> local_moran(std::span<const double> x, const SpatialWeights& w) {
    detail::check_dims(x.size(), w);
    Standardized s = standardize_values(x);
    std::vector<double> lag = detail::spatial_lag(s.z, w);
    std::vector<double> local(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) local[i] = s.z[i] / s.m2 * lag[i];
    return local;
}

// Conditional permutation: zone i keeps its own value while the other n-1
// values are randomly arranged over its neighbor slots each replicate.
// Zone i consumes substream (seed, i) regardless of scheduling, so the
// per-zone p-values are independent of worker count and zone order.
inline std::vector<double> conditional_permutation_local(std::span<const double> x,
                                                         const SpatialWeights& w,
                                                         int permutations, std::uint64_t seed,
                                                         Tail tail = Tail::greater,
                                                         int workers = 1) {
    if (permutations < 99) throw config_error("permutation test: need at least 99 permutations");
    detail::check_dims(x.size(), w);
    Standardized s = standardize_values(x);
    const auto n = x.size();
    std::vector<double> lag_obs = detail::spatial_lag(s.z, w);
    std::vector<double> p(n, 1.0);

    parallel_for_ranges(n, workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> pool(n - 1);
        std::vector<std::size_t> swapped;
        for (std::size_t i = begin; i < end; ++i) {
            const auto& row = w.rows[i];
            const auto k = row.size();
            if (k == 0) {
                p[i] = 1.0;  // isolated zone: no evidence either way
                continue;
            }
            double local_obs = s.z[i] / s.m2 * lag_obs[i];
            // pool = all deviations except zone i's own
            std::size_t m = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) pool[m++] = s.z[j];
            }
            CounterRng rng(seed, stream::kLocalPermutation | static_cast<std::uint64_t>(i));
            std::int64_t ge = 0, le = 0;
            swapped.resize(k);
            for (int rep = 0; rep < permutations; ++rep) {
                // partial Fisher-Yates: draw k values without replacement
                for (std::size_t d = 0; d < k; ++d) {
                    std::size_t r = d + static_cast<std::size_t>(rng.next_below(m - d));
                    std::swap(pool[d], pool[r]);
                    swapped[d] = r;
                }
                double lag_rep = 0.0;
                for (std::size_t d = 0; d < k; ++d) lag_rep += row[d].weight * pool[d];
                double local_rep = s.z[i] / s.m2 * lag_rep;
                if (local_rep >= local_obs) ++ge;
                if (local_rep <= local_obs) ++le;
                for (std::size_t d = k; d-- > 0;) std::swap(pool[d], pool[swapped[d]]);
            }
            // Deviation sign relative to the conditional replicate mean:
            // E[lag*] = z_i-independent, so compare local_obs to its mean via
            // the pool average.
            double pool_mean = 0.0;
            for (std::size_t d = 0; d < m; ++d) pool_mean += pool[d];
            pool_mean /= static_cast<double>(m);
            double row_sum = 0.0;
            for (const auto& e : row) row_sum += e.weight;
            double local_mean = s.z[i] / s.m2 * row_sum * pool_mean;
            p[i] = detail::pseudo_p(tail, local_obs >= local_mean, ge, le, permutations);
        }
    });
    return p;
}

enum class Quadrant : int { HH = 0, HL = 1, LH = 2, LL = 3 };
enum class LisaLabel : int { HH = 0, HL = 1, LH = 2, LL = 3, NotSignificant = 4 };

inline const char* quadrant_name(Quadrant q) {
    static constexpr const char* kNames[] = {"HH", "HL", "LH", "LL"};
    return kNames[static_cast<int>(q)];
}

inline const char* label_name(LisaLabel l) {
    static constexpr const char* kNames[] = {"HH", "HL", "LH", "LL", "NotSignificant"};
    return kNames[static_cast<int>(l)];
}

struct LisaResult {
    std::vector<double> value;     // raw analyzed values
    std::vector<double> z;         // deviations
    std::vector<double> lag;       // spatial lag of z
    std::vector<double> local_i;
    std::vector<double> pseudo_p;
    std::vector<Quadrant> quadrant;
    std::vector<LisaLabel> label;
    double alpha = 0.05;
};

// Quadrant from the signs of (z_i, lag_i); the label keeps the quadrant only
// when pseudo_p passes the gate. An exactly zero deviation or lag carries no
// cluster direction and resolves to NotSignificant regardless of p.
inline LisaResult classify_lisa(std::span<const double> x, const SpatialWeights& w,
                                std::span<const double> local_i, std::span<const double> pseudo_p,
                                double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw config_error("classify_lisa: alpha must be in (0, 1]");
    detail::check_dims(x.size(), w);
    if (local_i.size() != x.size() || pseudo_p.size() != x.size()) {
        throw data_error("classify_lisa: result vectors do not match zone count");
    }
    Standardized s = standardize_values(x);
    LisaResult r;
    r.alpha = alpha;
    r.value.assign(x.begin(), x.end());
    r.z = s.z;
    r.lag = detail::spatial_lag(s.z, w);
    r.local_i.assign(local_i.begin(), local_i.end());
    r.pseudo_p.assign(pseudo_p.begin(), pseudo_p.end());
    r.quadrant.resize(x.size());
    r.label.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        bool high_z = r.z[i] > 0.0;
        bool high_lag = r.lag[i] > 0.0;
        Quadrant q = high_z ? (high_lag ? Quadrant::HH : Quadrant::HL)
                            : (high_lag ? Quadrant::LH : Quadrant::LL);
        r.quadrant[i] = q;
        bool degenerate = r.z[i] == 0.0 || r.lag[i] == 0.0;
        r.label[i] = (!degenerate && r.pseudo_p[i] <= alpha)
                         ? static_cast<LisaLabel>(q)
                         : LisaLabel::NotSignificant;
    }
    return r;
}

// Benjamini-Hochberg adjusted p-values (optional gate; off by default to
// match the plain alpha cut).
inline std::vector<double> fdr_adjust(std::span<const double> p) {
    const auto n = p.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<double> adjusted(n);
    double running_min = 1.0;
    for (std::size_t rank = n; rank-- > 0;) {
        double q = p[order[rank]] * static_cast<double>(n) / static_cast<double>(rank + 1);
        running_min = std::min(running_min, std::min(q, 1.0));
        adjusted[order[rank]] = running_min;
    }
    return adjusted;
}

}  // namespace hotspot
