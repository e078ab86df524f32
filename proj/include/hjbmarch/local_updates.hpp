#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "hjbmarch/geometry.hpp"
#include "hjbmarch/problem.hpp"

namespace hjb {

/// Upwind one-sided slopes gx = max(D-x V, -D+x V, 0), likewise gy; off-grid differences are skipped.
struct UpwindGradientSample {
    double gx = 0.0;
    double gy = 0.0;
    double norm() const { return std::sqrt(gx * gx + gy * gy); }
};

/// Smallest existing neighbor value along each axis (+inf when none exists).
inline std::array<double, 2> axis_minima(const Field& v, std::size_t flat) {
    const GridSpec& g = v.grid();
    std::array<double, 2> out{kInf, kInf};
    const Node n = g.node(flat);
    const auto last = static_cast<std::ptrdiff_t>(g.points_per_axis() - 1);
    const std::size_t stride = g.points_per_axis();
    if (n.i > 0) out[0] = std::min(out[0], v[flat - 1]);
    if (n.i < last) out[0] = std::min(out[0], v[flat + 1]);
    if (g.dim() == 2) {
        if (n.j > 0) out[1] = std::min(out[1], v[flat - stride]);
        if (n.j < last) out[1] = std::min(out[1], v[flat + stride]);
    }
    return out;
}

inline UpwindGradientSample upwind_gradient(const Field& v, std::size_t flat) {
    const double h = v.grid().spacing();
    const double c = v[flat];
    const auto mins = axis_minima(v, flat);
    UpwindGradientSample s;
    if (mins[0] < c) s.gx = (c - mins[0]) / h;
    if (mins[1] < c) s.gy = (c - mins[1]) / h;
    return s;
}

/// V^n = V^{n+1} + k (K - f |grad V^{n+1}|), the linear explicit update.
inline double explicit_update_value(double center, UpwindGradientSample g, double f, double K, double k) {
    return center + k * (K - f * g.norm());
}

inline double explicit_node_update(const Field& v_next, std::size_t flat, const IsotropicProblem& p, double k,
                                   double t_n) {
    const Point x = v_next.grid().point(flat);
    return explicit_update_value(v_next[flat], upwind_gradient(v_next, flat), p.speed(x, t_n), p.cost(x, t_n), k);
}

/// Value of staying put for one step: W0 + k K.
inline double stay_in_place(double w0, double k, double K) { return w0 + k * K; }

/**
 * Data for one local solve of the implicit slice equation at a node:
 * W0 is the node's value in the known slice t_{n+1}, W1 the newly accepted
 * neighbor, W2 the smaller accepted neighbor on the transverse axis.
 */
struct QuadraticInputs {
    double w0 = 0.0;
    double w1 = 0.0;
    std::optional<double> w2;
    double h = 1.0;
    double k = 1.0;
    double f = 1.0;
    double K = 1.0;

    double cap() const { return stay_in_place(w0, k, K); }
};

struct QuadraticRoots {
    std::array<double, 2> values{};
    int count = 0;
};

/**
 * Real roots of a x^2 + b x + c = 0 in ascending order, via
 * q = -(b + sign(b) sqrt(disc)) / 2 with roots q/a and c/q. A slightly
 * negative discriminant (within 1e-12 of the coefficient scale squared) is
 * treated as a double root.
 */
inline QuadraticRoots solve_quadratic(double a, double b, double c) {
    QuadraticRoots r;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (scale == 0.0) return r;
    if (std::abs(a) <= 1e-15 * scale) {
        if (b != 0.0) {
            r.values[0] = -c / b;
            r.count = 1;
        }
        return r;
    }
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        if (disc < -1e-12 * scale * scale) return r;
        disc = 0.0;
    }
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    if (q == 0.0) {
        // b == 0 and disc == 0, hence c == 0: double root at zero.
        r.values[0] = 0.0;
        r.count = 1;
        return r;
    }
    double x1 = q / a;
    double x2 = c / q;
    if (x1 > x2) std::swap(x1, x2);
    r.values[0] = x1;
    if (x2 == x1) {
        r.count = 1;
    } else {
        r.values[1] = x2;
        r.count = 2;
    }
    return r;
}

namespace detail {

// Admissible: V >= every used neighbor and the modified-speed denominator
// W0 - V + kK stays strictly positive.
inline std::optional<double> smallest_admissible(const QuadraticRoots& roots, double shift, double floor,
                                                 const QuadraticInputs& in) {
    for (int r = 0; r < roots.count; ++r) {
        const double v = shift + roots.values[r];
        if (v >= floor && in.w0 - v + in.k * in.K > 0.0) return v;
    }
    return std::nullopt;
}

}  // namespace detail

/// Smallest admissible V of ((V - W1)/h)^2 = ((W0 - V + kK)/(kf))^2, or nullopt.
inline std::optional<double> quadratic_one_sided(const QuadraticInputs& in) {
    if (!std::isfinite(in.w1)) return std::nullopt;
    const double s = in.k * in.f;
    const double h = in.h;
    const double gap = in.cap() - in.w1;  // D in the shifted variable d = V - W1
    if (!(gap > 0.0)) return std::nullopt;
    // s^2 d^2 - h^2 (D - d)^2 = 0
    const double a = s * s - h * h;
    const double b = 2.0 * h * h * gap;
    const double c = -h * h * gap * gap;
    return detail::smallest_admissible(solve_quadratic(a, b, c), in.w1, in.w1, in);
}

/// Smallest admissible V of ((V-W1)/h)^2 + ((V-W2)/h)^2 = ((W0 - V + kK)/(kf))^2; nullopt means fall back.
inline std::optional<double> quadratic_two_sided(const QuadraticInputs& in) {
    if (!in.w2 || !std::isfinite(in.w1) || !std::isfinite(*in.w2)) return std::nullopt;
    const double w2 = *in.w2;
    const double base = std::min(in.w1, w2);
    const double d1 = in.w1 - base;
    const double d2 = w2 - base;
    const double s = in.k * in.f;
    const double h = in.h;
    const double gap = in.cap() - base;
    if (!(gap > 0.0)) return std::nullopt;
    const double s2 = s * s;
    const double h2 = h * h;
    // s^2 [(d - d1)^2 + (d - d2)^2] - h^2 (D - d)^2 = 0
    const double a = 2.0 * s2 - h2;
    const double b = -2.0 * s2 * (d1 + d2) + 2.0 * h2 * gap;
    const double c = s2 * (d1 * d1 + d2 * d2) - h2 * gap * gap;
    return detail::smallest_admissible(solve_quadratic(a, b, c), base, std::max(in.w1, w2), in);
}

/// Trial value used by the marcher: two-sided when admissible, else one-sided, else +inf.
inline double local_solve(const QuadraticInputs& in) {
    if (in.w2) {
        if (auto v = quadratic_two_sided(in)) return *v;
    }
    if (auto v = quadratic_one_sided(in)) return *v;
    return kInf;
}

/**
 * Full node value given both neighbor minima: the smallest of the cap, the
 * one-sided solves from W1 and from W2, and the two-sided solve. This is the
 * value Fast Marching settles on once both neighbors are accepted, and unlike
 * a single trial it is monotone in W0, W1 and W2.
 */
inline double upwind_node_value(const QuadraticInputs& in) {
    double best = std::min(in.cap(), local_solve(in));
    if (in.w2) {
        QuadraticInputs other = in;
        other.w1 = *in.w2;
        other.w2.reset();
        best = std::min(best, local_solve(other));
    }
    return best;
}

/// Residual of the backward-Euler upwind equation at `flat`, using `v`'s own neighbors.
inline double implicit_residual(const Field& v, const Field& v_next, std::size_t flat, double f, double K, double k) {
    return (v_next[flat] - v[flat]) / k + K - f * upwind_gradient(v, flat).norm();
}

}  // namespace hjb
