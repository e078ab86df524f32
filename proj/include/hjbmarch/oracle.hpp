#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "hjbmarch/fast_marching.hpp"
#include "hjbmarch/local_updates.hpp"

/// Slow reference solvers used to cross-check the production paths.
namespace hjb::oracle {

struct OracleResult {
    Field field;
    std::size_t iterations = 0;
    bool converged = false;
    double max_change = kInf;
};

namespace detail {

// Root of sum_{a < V} ((V - a)/h)^2 = ((cap - V)/(k f))^2 on [min a, cap].
// The left side is nondecreasing and the right side strictly decreasing there.
inline double solve_node(std::array<double, 2> mins, double cap, double h, double kf) {
    const double lowest = std::min(mins[0], mins[1]);
    if (!(lowest < cap)) return cap;
    auto residual = [&](double v) {
        double lhs = 0.0;
        for (double a : mins) {
            if (a < v) lhs += (v - a) * (v - a) / (h * h);
        }
        const double rhs = (cap - v) / kf;
        return lhs - rhs * rhs;
    };
    double lo = lowest;
    double hi = cap;
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/**
 * Gauss-Seidel iteration of the coupled backward-Euler upwind system on one
 * slice. Free nodes start at their stay-in-place caps; sweeps cycle through
 * the four axis orderings starting from `first_ordering`.
 */
inline OracleResult gauss_seidel_slice(const SliceInputs& in, double tol, std::size_t max_sweeps,
                                       int first_ordering = 0) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const GridSpec& g = in.v_next.grid();
    const double h = g.spacing();
    OracleResult r;
    r.field = Field(g);
    Field& v = r.field;
    bool any_free = false;
    for (std::size_t f = 0; f < g.size(); ++f) {
        if (in.fixed[f]) {
            v[f] = in.fixed_values[f];
        } else {
            v[f] = stay_in_place(in.v_next[f], in.k, in.cost[f]);
            any_free = true;
        }
    }
    if (!any_free) {
        r.converged = true;
        r.max_change = 0.0;
        return r;
    }
    const auto m = static_cast<std::ptrdiff_t>(g.points_per_axis());
    const std::ptrdiff_t rows = g.dim() == 2 ? m : 1;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        const int ordering = static_cast<int>((sweep + static_cast<std::size_t>(first_ordering)) % 4);
        const bool i_up = ordering == 0 || ordering == 3;
        const bool j_up = ordering == 0 || ordering == 1;
        double change = 0.0;
        for (std::ptrdiff_t jj = 0; jj < rows; ++jj) {
            const std::ptrdiff_t j = j_up ? jj : rows - 1 - jj;
            for (std::ptrdiff_t ii = 0; ii < m; ++ii) {
                const std::ptrdiff_t i = i_up ? ii : m - 1 - ii;
                const std::size_t f = g.flat({i, j});
                if (in.fixed[f]) continue;
                const double cap = stay_in_place(in.v_next[f], in.k, in.cost[f]);
                const double updated = detail::solve_node(axis_minima(v, f), cap, h, in.k * in.speed[f]);
                change = std::max(change, std::abs(updated - v[f]));
                v[f] = updated;
            }
        }
        r.iterations = sweep + 1;
        r.max_change = change;
        if (change < tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

enum class LocalEquation { OneSided, TwoSided };

/// Bisection on the local quadratic residual over [max(W1[, W2]), W0 + kK].
inline std::optional<double> bisect_local(LocalEquation kind, const QuadraticInputs& in, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (kind == LocalEquation::TwoSided && !in.w2) throw std::invalid_argument("two-sided solve needs W2");
    const bool two = kind == LocalEquation::TwoSided;
    const double floor = two ? std::max(in.w1, *in.w2) : in.w1;
    const double cap = in.cap();
    if (!std::isfinite(floor) || !(floor < cap)) return std::nullopt;
    auto residual = [&](double v) {
        double lhs = (v - in.w1) * (v - in.w1);
        if (two) lhs += (v - *in.w2) * (v - *in.w2);
        lhs /= in.h * in.h;
        const double rhs = (in.w0 - v + in.k * in.K) / (in.k * in.f);
        return lhs - rhs * rhs;
    };
    if (residual(floor) > 0.0) return std::nullopt;
    double lo = floor;
    double hi = cap;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    if (!(in.w0 - root + in.k * in.K > 0.0)) return std::nullopt;
    return root;
}

/**
 * Owning storage for a randomized slice problem on the unit square: smooth
 * speed in [0.1, 5] and cost in [0.5, 2], uniform random V^{n+1} in [0, 1],
 * boundary nodes fixed at random values in [0, 1], and a step between the
 * CFL bound and 100 times it.
 */
struct RandomSlice {
    Field v_next;
    std::vector<unsigned char> fixed;
    Field fixed_values;
    std::vector<double> speed;
    std::vector<double> cost;
    double k = 0.0;

    SliceInputs inputs() const { return {v_next, fixed, fixed_values, speed, cost, k}; }
};

inline RandomSlice random_slice(std::size_t cells, std::uint64_t seed) {
    using std::numbers::pi;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const GridSpec g = unit_grid(2, cells);
    RandomSlice s;
    s.v_next = Field(g);
    s.fixed_values = Field(g);
    s.fixed.assign(g.size(), 0);
    s.speed.resize(g.size());
    s.cost.resize(g.size());
    const double a1 = 1.0 + 3.0 * unit(rng), b1 = 1.0 + 3.0 * unit(rng), c1 = 2.0 * pi * unit(rng);
    const double a2 = 1.0 + 3.0 * unit(rng), b2 = 1.0 + 3.0 * unit(rng), c2 = 2.0 * pi * unit(rng);
    for (std::size_t x = 0; x < g.size(); ++x) {
        const Point q = g.point(x);
        const double sf = std::sin(a1 * q.x + b1 * q.y + c1);
        const double sk = std::sin(a2 * q.x - b2 * q.y + c2);
        s.speed[x] = 0.1 + 4.9 * sf * sf;
        s.cost[x] = 0.5 + 1.5 * sk * sk;
        s.v_next[x] = unit(rng);
        if (g.on_boundary(g.node(x))) {
            s.fixed[x] = 1;
            s.fixed_values[x] = unit(rng);
        }
    }
    const double k_hat = g.spacing() / (std::numbers::sqrt2 * 5.0);
    s.k = k_hat * std::pow(100.0, unit(rng));
    return s;
}

}  // namespace hjb::oracle
