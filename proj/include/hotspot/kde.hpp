#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hotspot/csv.hpp"
#include "hotspot/errors.hpp"
#include "hotspot/geo.hpp"
#include "hotspot/parallel.hpp"

namespace hotspot {

// Kernel contributions are dropped beyond this many bandwidths. A 2-D
// Gaussian holds all but exp(-18) ~ 1.5e-8 of its mass inside radius 6h.
inline constexpr double kKdeCutoffBandwidths = 6.0;

struct GridSpec {
    PlanarPoint origin;   // lower-left corner
    double cell_size = 0.0;
    int n_cols = 0;
    int n_rows = 0;

    double center_x(int col) const { return origin.x + (col + 0.5) * cell_size; }
    double center_y(int row) const { return origin.y + (row + 0.5) * cell_size; }
    std::size_t cells() const {
        return static_cast<std::size_t>(n_cols) * static_cast<std::size_t>(n_rows);
    }
};

inline constexpr std::size_t kDefaultCellCap = 4'000'000;

inline void validate_grid(const GridSpec& spec, std::size_t cell_cap = kDefaultCellCap) {
    if (!(spec.cell_size > 0.0)) throw config_error("grid: cell size must be positive");
    if (spec.n_cols < 1 || spec.n_rows < 1) throw config_error("grid: need at least one cell");
    if (spec.cells() > cell_cap) {
        throw config_error("grid: " + std::to_string(spec.cells()) + " cells exceeds cap of " +
                           std::to_string(cell_cap));
    }
}

// Row 0 is the bottom row; the ESRI writer flips to top-to-bottom on export.
struct KdeGrid {
    GridSpec spec;
    std::vector<double> values;  // row-major, 1/m^2
    double bandwidth = 0.0;
    std::string kernel = "gaussian";

    double value(int row, int col) const {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(spec.n_cols) +
                      static_cast<std::size_t>(col)];
    }

    // Riemann mass: sum of values times cell area.
    double mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * spec.cell_size * spec.cell_size;
    }
};

// Silverman's rule with pooled axes:
//   h = 1.06 * min(sigma_pooled, IQR_pooled / 1.34) * n^(-1/5)
// sigma_pooled is the mean of the per-axis sample standard deviations and
// IQR_pooled the mean of the per-axis interquartile ranges (linearly
// interpolated quantiles). A zero IQR falls back to sigma alone.
inline double silverman_bandwidth(std::span<const PlanarPoint> points) {
    const auto n = points.size();
    if (n < 2) throw degeneracy_error("bandwidth: need at least 2 points");

    auto axis_sd = [&](bool x_axis) {
        double mean = 0.0;
        for (const auto& p : points) mean += x_axis ? p.x : p.y;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (const auto& p : points) {
            double d = (x_axis ? p.x : p.y) - mean;
            ss += d * d;
        }
        return std::sqrt(ss / static_cast<double>(n - 1));
    };
    auto axis_iqr = [&](bool x_axis) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = x_axis ? points[i].x : points[i].y;
        std::sort(v.begin(), v.end());
        auto quantile = [&](double q) {
            double idx = q * static_cast<double>(n - 1);
            auto lo = static_cast<std::size_t>(idx);
            std::size_t hi = std::min(lo + 1, n - 1);
            double frac = idx - static_cast<double>(lo);
            return v[lo] + frac * (v[hi] - v[lo]);
        };
        return quantile(0.75) - quantile(0.25);
    };

    double sigma = 0.5 * (axis_sd(true) + axis_sd(false));
    double iqr = 0.5 * (axis_iqr(true) + axis_iqr(false));
    if (sigma <= 0.0 && iqr <= 0.0) {
        throw degeneracy_error("bandwidth: all points identical (zero spread)");
    }
    double scale = iqr > 0.0 ? std::min(sigma, iqr / 1.34) : sigma;
    return 1.06 * scale * std::pow(static_cast<double>(n), -0.2);
}

// Grid fitted to the data extent plus `pad_bandwidths` * h on every side.
inline GridSpec auto_grid(std::span<const PlanarPoint> points, double bandwidth, double cell_size,
                          double pad_bandwidths = kKdeCutoffBandwidths,
                          std::size_t cell_cap = kDefaultCellCap) {
    if (points.empty()) throw data_error("grid: empty point set");
    double x_min = points[0].x, x_max = points[0].x;
    double y_min = points[0].y, y_max = points[0].y;
    for (const auto& p : points) {
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    }
    double pad = pad_bandwidths * bandwidth;
    GridSpec spec;
    spec.origin = {x_min - pad, y_min - pad};
    spec.cell_size = cell_size;
    spec.n_cols = std::max(1, static_cast<int>(std::ceil((x_max + pad - spec.origin.x) / cell_size)));
    spec.n_rows = std::max(1, static_cast<int>(std::ceil((y_max + pad - spec.origin.y) / cell_size)));
    validate_grid(spec, cell_cap);
    return spec;
}

// Gaussian KDE at cell centers:
//   density(c) = (1/n) sum_p (1 / (2 pi h^2)) exp(-|c - p|^2 / (2 h^2))
// truncated at 6h. Work is split over row bands; each band accumulates its
// cells over points in input order, so the surface is independent of the
// worker count.
inline KdeGrid kde_grid(std::span<const PlanarPoint> points, double bandwidth,
                        const GridSpec& spec, int workers = 1) {
    if (points.empty()) throw data_error("kde: empty point set");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw config_error("kde: bandwidth must be positive");
    }
    validate_grid(spec);
    KdeGrid grid;
    grid.spec = spec;
    grid.bandwidth = bandwidth;
    grid.values.assign(spec.cells(), 0.0);

    const double cutoff = kKdeCutoffBandwidths * bandwidth;
    const double cutoff2 = cutoff * cutoff;
    const double inv_2h2 = 1.0 / (2.0 * bandwidth * bandwidth);

    parallel_for_ranges(static_cast<std::size_t>(spec.n_rows), workers,
                        [&](std::size_t row_begin, std::size_t row_end) {
        std::vector<double> ex;  // per-point exp terms over its column range
        for (const auto& p : points) {
            // column range within the cutoff box
            int col_lo = std::max(0, static_cast<int>(std::floor((p.x - cutoff - spec.origin.x) /
                                                                 spec.cell_size - 0.5)));
            int col_hi = std::min(spec.n_cols - 1,
                                  static_cast<int>(std::ceil((p.x + cutoff - spec.origin.x) /
                                                             spec.cell_size - 0.5)));
            if (col_lo > col_hi) continue;
            int row_lo = std::max(static_cast<int>(row_begin),
                                  static_cast<int>(std::floor((p.y - cutoff - spec.origin.y) /
                                                              spec.cell_size - 0.5)));
            int row_hi = std::min(static_cast<int>(row_end) - 1,
                                  static_cast<int>(std::ceil((p.y + cutoff - spec.origin.y) /
                                                             spec.cell_size - 0.5)));
            if (row_lo > row_hi) continue;
            ex.resize(static_cast<std::size_t>(col_hi - col_lo + 1));
            for (int c = col_lo; c <= col_hi; ++c) {
                double dx = spec.center_x(c) - p.x;
                ex[static_cast<std::size_t>(c - col_lo)] = std::exp(-dx * dx * inv_2h2);
            }
            for (int r = row_lo; r <= row_hi; ++r) {
                double dy = spec.center_y(r) - p.y;
                double ey = std::exp(-dy * dy * inv_2h2);
                double dy2 = dy * dy;
                auto* row_vals = &grid.values[static_cast<std::size_t>(r) *
                                              static_cast<std::size_t>(spec.n_cols)];
                for (int c = col_lo; c <= col_hi; ++c) {
                    double dx = spec.center_x(c) - p.x;
                    if (dx * dx + dy2 > cutoff2) continue;
                    row_vals[c] += ey * ex[static_cast<std::size_t>(c - col_lo)];
                }
            }
        }
    });
    // normalize once at the end so the raw accumulation stays comparable
    // across point sets
    const double norm = 1.0 / (2.0 * 3.14159265358979323846 * bandwidth * bandwidth *
                               static_cast<double>(points.size()));
    for (double& v : grid.values) v *= norm;
    return grid;
}

// ---- raster export ----

// ESRI ASCII grid, data rows top-to-bottom, values in scientific notation
// with 9 significant digits.
inline void write_esri_ascii(std::ostream& out, const KdeGrid& grid) {
    out << "ncols " << grid.spec.n_cols << '\n';
    out << "nrows " << grid.spec.n_rows << '\n';
    out << "xllcorner " << format_double(grid.spec.origin.x) << '\n';
    out << "yllcorner " << format_double(grid.spec.origin.y) << '\n';
    out << "cellsize " << format_double(grid.spec.cell_size) << '\n';
    out << "NODATA_value -9999\n";
    char buf[40];
    for (int r = grid.spec.n_rows - 1; r >= 0; --r) {
        for (int c = 0; c < grid.spec.n_cols; ++c) {
            std::snprintf(buf, sizeof(buf), "%.8e", grid.value(r, c));
            if (c) out << ' ';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw data_error("esri ascii: write failed");
}

inline KdeGrid read_esri_ascii(std::istream& in) {
    auto header_line = [&](const char* key) {
        std::string name;
        double value;
        if (!(in >> name >> value) || name != key) {
            throw data_error(std::string("esri ascii: expected header '") + key + "'");
        }
        return value;
    };
    KdeGrid grid;
    grid.spec.n_cols = static_cast<int>(header_line("ncols"));
    grid.spec.n_rows = static_cast<int>(header_line("nrows"));
    grid.spec.origin.x = header_line("xllcorner");
    grid.spec.origin.y = header_line("yllcorner");
    grid.spec.cell_size = header_line("cellsize");
    header_line("NODATA_value");
    validate_grid(grid.spec);
    grid.values.assign(grid.spec.cells(), 0.0);
    for (int r = grid.spec.n_rows - 1; r >= 0; --r) {
        for (int c = 0; c < grid.spec.n_cols; ++c) {
            double v;
            if (!(in >> v)) throw data_error("esri ascii: truncated data section");
            grid.values[static_cast<std::size_t>(r) * static_cast<std::size_t>(grid.spec.n_cols) +
                        static_cast<std::size_t>(c)] = v;
        }
    }
    return grid;
}

// 8-bit binary PGM, min-max normalized; a constant surface renders as
// uniform mid gray.
inline void write_pgm(std::ostream& out, const KdeGrid& grid) {
    double lo = grid.values[0], hi = grid.values[0];
    for (double v : grid.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    out << "P5\n" << grid.spec.n_cols << ' ' << grid.spec.n_rows << "\n255\n";
    double range = hi - lo;
    for (int r = grid.spec.n_rows - 1; r >= 0; --r) {
        for (int c = 0; c < grid.spec.n_cols; ++c) {
            int gray = range > 0.0
                           ? static_cast<int>(std::lround((grid.value(r, c) - lo) / range * 255.0))
                           : 128;
            out.put(static_cast<char>(std::clamp(gray, 0, 255)));
        }
    }
    if (!out) throw data_error("pgm: write failed");
}

}  // namespace hotspot
