#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hotspot/errors.hpp"

namespace hotspot {

struct SeverityInput {
    std::int64_t severe = 0;
    std::int64_t total = 0;
};

// Laplace-smoothed severity rate: (severe + 1) / (total + 2). The +1/+2
// prior keeps every rate strictly inside (0, 1), so the variance term below
// never divides by zero, including for zero-count zones (rate 0.5).
inline double smoothed_rate(std::int64_t severe, std::int64_t total) {
    if (severe < 0 || total < 0 || severe > total) {
        throw data_error("smoothed_rate: need 0 <= severe <= total, got severe=" +
                         std::to_string(severe) + " total=" + std::to_string(total));
    }
    return (static_cast<double>(severe) + 1.0) / (static_cast<double>(total) + 2.0);
}

// Binomial standard deviation of the smoothed rate.
inline double rate_std(double rate, std::int64_t total) {
    if (!(rate > 0.0 && rate < 1.0)) {
        throw data_error("rate_std: rate must lie strictly inside (0, 1)");
    }
    return std::sqrt(rate * (1.0 - rate) / (static_cast<double>(total) + 2.0));
}

// Pooled global severity rate with one smoothing pair applied to the summed
// counts: (sum severe + 1) / (sum total + 2). Smoothing inside the sums
// would bias the global rate by the number of zones.
inline double global_rate(std::span<const SeverityInput> inputs) {
    if (inputs.empty()) throw data_error("global_rate: empty input");
    std::int64_t severe_sum = 0, total_sum = 0;
    for (const auto& in : inputs) {
        if (in.severe < 0 || in.total < 0 || in.severe > in.total) {
            throw data_error("global_rate: need 0 <= severe <= total in every zone");
        }
        severe_sum += in.severe;
        total_sum += in.total;
    }
    return (static_cast<double>(severe_sum) + 1.0) / (static_cast<double>(total_sum) + 2.0);
}

struct EbiVector {
    std::vector<double> severity_rate;
    std::vector<double> severity_rate_std;
    std::vector<double> ebi;
    std::vector<double> ebi_standardized;
    double global_severity_rate = 0.0;
    double ebi_mean = 0.0;
    double ebi_stdev = 0.0;  // population (divide-by-n)
};

// Full chain: smoothed rates, their binomial deviations, the variance-
// stabilized deviation from the global rate, and its standardization. The
// standardized vector is what feeds the LISA stage.
inline EbiVector ebi_transform(std::span<const SeverityInput> inputs) {
    if (inputs.size() < 2) throw degeneracy_error("ebi_transform: need at least 2 zones");
    EbiVector out;
    const auto n = inputs.size();
    out.global_severity_rate = global_rate(inputs);
    out.severity_rate.reserve(n);
    out.severity_rate_std.reserve(n);
    out.ebi.reserve(n);
    for (const auto& in : inputs) {
        double rate = smoothed_rate(in.severe, in.total);
        double sd = rate_std(rate, in.total);
        out.severity_rate.push_back(rate);
        out.severity_rate_std.push_back(sd);
        out.ebi.push_back((rate - out.global_severity_rate) / sd);
    }
    double mean = 0.0;
    for (double v : out.ebi) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : out.ebi) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    if (var == 0.0) {
        throw degeneracy_error("ebi_transform: all EBI values equal (zero standard deviation)");
    }
    out.ebi_mean = mean;
    out.ebi_stdev = std::sqrt(var);
    out.ebi_standardized.reserve(n);
    for (double v : out.ebi) out.ebi_standardized.push_back((v - mean) / out.ebi_stdev);
    return out;
}

}  // namespace hotspot
