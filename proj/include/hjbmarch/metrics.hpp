#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjbmarch/geometry.hpp"
#include "hjbmarch/problem.hpp"

namespace hjb {

/// l1 is the node average of |error|; every node counts, Dirichlet nodes included.
struct ErrorReport {
    double l1 = 0.0;
    double linf = 0.0;
    std::size_t nodes_compared = 0;
    double slice_time = 0.0;
};

namespace detail {

struct NormAccumulator {
    double sum = 0.0;
    double max = 0.0;
    std::size_t count = 0;

    void add(double e) {
        const double a = std::abs(e);
        sum += a;
        max = std::max(max, a);
        ++count;
    }

    ErrorReport report(double t) const {
        return {count ? sum / static_cast<double>(count) : 0.0, max, count, t};
    }
};

}  // namespace detail

inline ErrorReport error_vs_analytic(const Field& field, const IsotropicProblem& p, double t) {
    if (!p.has_analytic()) throw std::invalid_argument("problem '" + p.id + "' has no analytic solution");
    const GridSpec& g = field.grid();
    detail::NormAccumulator acc;
    for (std::size_t x = 0; x < g.size(); ++x) acc.add(field[x] - p.exact(g.point(x), t));
    return acc.report(t);
}

inline ErrorReport error_vs_analytic_1d(const Field& field, const Advection1DProblem& p, double t) {
    const GridSpec& g = field.grid();
    detail::NormAccumulator acc;
    for (std::size_t x = 0; x < g.size(); ++x) {
        acc.add(field[x] - p.exact(g.coordinate(static_cast<std::ptrdiff_t>(x)), t));
    }
    return acc.report(t);
}

/// Integer ratio between the fine and coarse cell counts; throws if the grids do not nest.
inline std::size_t nesting_stride(const GridSpec& coarse, const GridSpec& fine) {
    if (coarse.dim() != fine.dim() || coarse.extents().lo != fine.extents().lo ||
        coarse.extents().hi != fine.extents().hi) {
        throw std::invalid_argument("grids cover different domains");
    }
    const std::size_t c = coarse.cells_per_axis();
    const std::size_t f = fine.cells_per_axis();
    if (f < c || f % c != 0) {
        throw std::invalid_argument("grid with " + std::to_string(c) + " cells does not nest in " + std::to_string(f));
    }
    return f / c;
}

/// Norms over the coarse nodes, each compared with the coinciding reference node.
inline ErrorReport error_vs_reference(const Field& field, const Field& reference, std::size_t stride,
                                      double slice_time = 0.0) {
    if (stride == 0 || nesting_stride(field.grid(), reference.grid()) != stride) {
        throw std::invalid_argument("stride does not match the grid nesting");
    }
    const GridSpec& g = field.grid();
    const GridSpec& rg = reference.grid();
    const auto s = static_cast<std::ptrdiff_t>(stride);
    detail::NormAccumulator acc;
    for (std::size_t x = 0; x < g.size(); ++x) {
        const Node n = g.node(x);
        acc.add(field[x] - reference.at({n.i * s, n.j * s}));
    }
    return acc.report(slice_time);
}

struct SweepRecord {
    std::string scheme;
    std::size_t resolution = 0;
    double k = 0.0;
    double r = 1.0;
    double wall_ms = 0.0;
    std::size_t updates = 0;
    ErrorReport error;
};

inline const char* sweep_csv_header() { return "scheme,resolution,k,r,wall_ms,updates,l1,linf"; }

inline void write_sweep_row(std::ostream& os, const SweepRecord& rec) {
    std::string line = rec.scheme + "," + std::to_string(rec.resolution) + ",";
    detail::append_double(line, rec.k);
    line += ",";
    detail::append_double(line, rec.r);
    line += ",";
    detail::append_double(line, rec.wall_ms);
    line += "," + std::to_string(rec.updates) + ",";
    detail::append_double(line, rec.error.l1);
    line += ",";
    detail::append_double(line, rec.error.linf);
    os << line << '\n';
}

inline void write_sweep_csv(std::ostream& os, std::span<const SweepRecord> records) {
    os << sweep_csv_header() << '\n';
    for (const auto& rec : records) write_sweep_row(os, rec);
}

/// Least-squares slope of log(error) against log(h).
inline double convergence_slope(std::span<const double> h, std::span<const double> error) {
    if (h.size() != error.size()) throw std::invalid_argument("h and error lists differ in length");
    if (h.size() < 3) throw std::invalid_argument("convergence slope needs at least 3 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !(error[i] > 0.0)) throw std::invalid_argument("slope fit needs positive h and error");
        const double lx = std::log(h[i]);
        const double ly = std::log(error[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) throw std::invalid_argument("convergence slope needs distinct h values");
    return (n * sxy - sx * sy) / denom;
}

/// Slope over the L1 errors of `records` with the given scheme (h = 1 / resolution).
inline double convergence_slope(std::span<const SweepRecord> records, const std::string& scheme) {
    std::vector<double> h;
    std::vector<double> e;
    for (const auto& rec : records) {
        if (rec.scheme != scheme) continue;
        if (std::find(h.begin(), h.end(), 1.0 / static_cast<double>(rec.resolution)) != h.end()) continue;
        h.push_back(1.0 / static_cast<double>(rec.resolution));
        e.push_back(rec.error.l1);
    }
    return convergence_slope(h, e);
}

}  // namespace hjb
