#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hotspot/csv.hpp"
#include "hotspot/errors.hpp"
#include "hotspot/geo.hpp"
#include "hotspot/parallel.hpp"

namespace hotspot {

struct WeightsMeta {
    std::string method = "knn";
    int k = 0;
    bool standardized = false;
};

struct WeightEntry {
    std::int32_t index;
    double weight;
};

// Sparse row-indexed neighbor weights. Rows hold neighbors in ascending
// zone index; self-neighbors are never stored.
struct SpatialWeights {
    std::int32_t n = 0;
    std::vector<std::vector<WeightEntry>> rows;
    WeightsMeta meta;

    double row_sum(std::size_t i) const {
        double s = 0.0;
        for (const auto& e : rows[i]) s += e.weight;
        return s;
    }

    double s0() const {
        double s = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) s += row_sum(i);
        return s;
    }
};

// Directed k-nearest-neighbor graph on centroids, binary weights.
// Distance ties break toward the smaller zone index so the construction is
// reproducible; asymmetry is preserved (no implicit symmetrization).
inline SpatialWeights knn_weights(std::span<const PlanarPoint> centroids, int k, int workers = 1) {
    auto n = static_cast<std::int32_t>(centroids.size());
    if (k < 1) throw config_error("knn_weights: k must be >= 1");
    if (n <= k) {
        throw config_error("knn_weights: need at least k+1 zones, got n=" + std::to_string(n) +
                           " with k=" + std::to_string(k));
    }
    SpatialWeights w;
    w.n = n;
    w.meta = {"knn", k, false};
    w.rows.assign(static_cast<std::size_t>(n), {});
    parallel_for_ranges(static_cast<std::size_t>(n), workers, [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, std::int32_t>> dist;
        for (std::size_t i = begin; i < end; ++i) {
            dist.clear();
            dist.reserve(static_cast<std::size_t>(n) - 1);
            for (std::int32_t j = 0; j < n; ++j) {
                if (j == static_cast<std::int32_t>(i)) continue;
                double dx = centroids[static_cast<std::size_t>(j)].x - centroids[i].x;
                double dy = centroids[static_cast<std::size_t>(j)].y - centroids[i].y;
                dist.emplace_back(dx * dx + dy * dy, j);
            }
            std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
            auto& row = w.rows[i];
            row.reserve(static_cast<std::size_t>(k));
            for (int m = 0; m < k; ++m) row.push_back({dist[static_cast<std::size_t>(m)].second, 1.0});
            std::sort(row.begin(), row.end(),
                      [](const WeightEntry& a, const WeightEntry& b) { return a.index < b.index; });
        }
    });
    return w;
}

// Union with the transpose (w OR w^T). Binary weights only make sense here,
// so it runs on the pre-standardization graph.
inline SpatialWeights symmetrize(const SpatialWeights& w) {
    SpatialWeights out;
    out.n = w.n;
    out.meta = w.meta;
    out.meta.method = w.meta.method + "+sym";
    std::vector<std::vector<std::int32_t>> adj(static_cast<std::size_t>(w.n));
    for (std::size_t i = 0; i < w.rows.size(); ++i) {
        for (const auto& e : w.rows[i]) {
            adj[i].push_back(e.index);
            adj[static_cast<std::size_t>(e.index)].push_back(static_cast<std::int32_t>(i));
        }
    }
    out.rows.resize(static_cast<std::size_t>(w.n));
    for (std::size_t i = 0; i < adj.size(); ++i) {
        std::sort(adj[i].begin(), adj[i].end());
        adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
        for (std::int32_t j : adj[i]) out.rows[i].push_back({j, 1.0});
    }
    return out;
}

// Divides every weight by its row sum. Empty rows stay empty; the
// operation is idempotent up to floating-point rounding.
inline SpatialWeights row_standardize(SpatialWeights w) {
    for (auto& row : w.rows) {
        double s = 0.0;
        for (const auto& e : row) s += e.weight;
        if (s <= 0.0) continue;
        for (auto& e : row) e.weight /= s;
    }
    w.meta.standardized = true;
    return w;
}

// ---- audit formats: 3-column CSV plus a JSON sidecar ----

inline void write_weights_csv(std::ostream& out, const SpatialWeights& w,
                              std::span<const std::string> ids) {
    if (static_cast<std::int32_t>(ids.size()) != w.n) {
        throw data_error("write_weights_csv: id list size does not match weights");
    }
    CsvWriter writer(out);
    writer.row({"from_id", "to_id", "weight"});
    for (std::size_t i = 0; i < w.rows.size(); ++i) {
        for (const auto& e : w.rows[i]) {
            writer.row({ids[i], ids[static_cast<std::size_t>(e.index)], format_double(e.weight)});
        }
    }
}

inline std::string weights_sidecar_json(const SpatialWeights& w) {
    nlohmann::json j;
    j["method"] = w.meta.method;
    j["k"] = w.meta.k;
    j["standardized"] = w.meta.standardized;
    j["n"] = w.n;
    return j.dump(2) + "\n";
}

inline WeightsMeta parse_weights_sidecar(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw data_error("weights sidecar: bad JSON");
    WeightsMeta meta;
    meta.method = j.value("method", "unknown");
    meta.k = j.value("k", 0);
    meta.standardized = j.value("standardized", false);
    return meta;
}

inline SpatialWeights read_weights_csv(std::istream& in, std::span<const std::string> ids,
                                       WeightsMeta meta = {}) {
    std::unordered_map<std::string, std::int32_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], static_cast<std::int32_t>(i));
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 3 || fields[0] != "from_id") {
        throw data_error("weights csv: expected header from_id,to_id,weight");
    }
    SpatialWeights w;
    w.n = static_cast<std::int32_t>(ids.size());
    w.meta = meta;
    w.rows.assign(ids.size(), {});
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 3) throw data_error("weights csv: malformed row");
        auto from = index.find(fields[0]);
        auto to = index.find(fields[1]);
        auto weight = parse_double(fields[2]);
        if (from == index.end() || to == index.end()) {
            throw data_error("weights csv: unknown zone id '" +
                             (from == index.end() ? fields[0] : fields[1]) + "'");
        }
        if (!weight || !(*weight > 0.0)) throw data_error("weights csv: bad weight value");
        if (from->second == to->second) throw data_error("weights csv: self-neighbor not allowed");
        w.rows[static_cast<std::size_t>(from->second)].push_back({to->second, *weight});
    }
    for (auto& row : w.rows) {
        std::sort(row.begin(), row.end(),
                  [](const WeightEntry& a, const WeightEntry& b) { return a.index < b.index; });
    }
    return w;
}

}  // namespace hotspot
