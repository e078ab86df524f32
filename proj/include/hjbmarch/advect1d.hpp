#pragma once

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hjbmarch/geometry.hpp"
#include "hjbmarch/problem.hpp"

namespace hjb::advect {

enum class Scheme { Explicit, Implicit, Hybrid, SemiLagrangian };

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::Explicit: return "explicit";
        case Scheme::Implicit: return "implicit";
        case Scheme::Hybrid: return "hybrid";
        case Scheme::SemiLagrangian: return "semi-lagrangian";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& name) {
    for (Scheme s : {Scheme::Explicit, Scheme::Implicit, Scheme::Hybrid, Scheme::SemiLagrangian}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown 1D scheme '" + name + "'");
}

// Slack on the CFL test so that k = h / max f is not rejected by rounding.
inline constexpr double kCflSlack = 1e-12;

/// lambda_i^n = (k / h) f(ih, nk)
inline double courant(const Advection1DProblem& p, double h, double k, double x, double t) {
    return k / h * p.speed(x, t);
}

inline double cfl_step_1d(const Advection1DProblem& p, double h) { return h / p.speed_max; }

struct StepStats {
    std::size_t cfl_violations = 0;
    std::size_t explicit_nodes = 0;
    std::size_t implicit_nodes = 0;
};

namespace detail {

inline void check_1d(const Field& v) {
    if (v.grid().dim() != 1) throw std::invalid_argument("1D advection needs a 1D field");
}

inline double source(const Advection1DProblem& p, double x, double t) {
    return p.has_source ? p.source(x, t) : 0.0;
}

inline double explicit_value(const Field& vn, const Advection1DProblem& p, double h, double k, double t_n,
                             std::size_t i, double lambda) {
    const double x = vn.grid().coordinate(static_cast<std::ptrdiff_t>(i));
    return lambda * vn[i - 1] + (1.0 - lambda) * vn[i] + k * source(p, x, t_n);
}

inline double implicit_value(double old_value, double left_new, const Advection1DProblem& p, double k, double x,
                             double t_next, double lambda) {
    return (old_value + lambda * left_new + k * source(p, x, t_next)) / (1.0 + lambda);
}

}  // namespace detail

/// Forward Euler upwind step from t_n to t_n + k. Counts (but tolerates) CFL violations.
inline Field step_explicit_1d(const Field& vn, const Advection1DProblem& p, double k, double t_n,
                              StepStats* stats = nullptr) {
    detail::check_1d(vn);
    const GridSpec& g = vn.grid();
    const double h = g.spacing();
    Field out(g);
    out[0] = p.inflow(t_n + k);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double x = g.coordinate(static_cast<std::ptrdiff_t>(i));
        const double lambda = courant(p, h, k, x, t_n);
        if (stats) {
            ++stats->explicit_nodes;
            if (lambda > 1.0 + kCflSlack) ++stats->cfl_violations;
        }
        out[i] = detail::explicit_value(vn, p, h, k, t_n, i, lambda);
    }
    return out;
}

/// Backward Euler upwind step, solved by one left-to-right sweep.
inline Field step_implicit_1d(const Field& vn, const Advection1DProblem& p, double k, double t_next,
                              StepStats* stats = nullptr) {
    detail::check_1d(vn);
    const GridSpec& g = vn.grid();
    const double h = g.spacing();
    Field out(g);
    out[0] = p.inflow(t_next);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double x = g.coordinate(static_cast<std::ptrdiff_t>(i));
        const double lambda = courant(p, h, k, x, t_next);
        out[i] = detail::implicit_value(vn[i], out[i - 1], p, k, x, t_next, lambda);
    }
    if (stats) stats->implicit_nodes += g.size() - 1;
    return out;
}

/**
 * Explicit update wherever lambda_i^n <= 1, then an implicit left-to-right
 * sweep over the remaining nodes. Needs f > 0 so that the sweep order follows
 * the flow.
 */
inline Field step_hybrid_1d(const Field& vn, const Advection1DProblem& p, double k, double t_n,
                            StepStats* stats = nullptr) {
    detail::check_1d(vn);
    const GridSpec& g = vn.grid();
    const double h = g.spacing();
    const double t_next = t_n + k;
    Field out(g);
    std::vector<unsigned char> done(g.size(), 0);
    out[0] = p.inflow(t_next);
    done[0] = 1;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double x = g.coordinate(static_cast<std::ptrdiff_t>(i));
        const double lambda = courant(p, h, k, x, t_n);
        if (lambda <= 1.0 + kCflSlack) {
            out[i] = detail::explicit_value(vn, p, h, k, t_n, i, lambda);
            done[i] = 1;
            if (stats) ++stats->explicit_nodes;
        }
    }
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (done[i]) continue;
        const double x = g.coordinate(static_cast<std::ptrdiff_t>(i));
        const double lambda = courant(p, h, k, x, t_next);
        out[i] = detail::implicit_value(vn[i], out[i - 1], p, k, x, t_next, lambda);
        if (stats) ++stats->implicit_nodes;
    }
    return out;
}

/**
 * First-order semi-Lagrangian step: follow the characteristic back from
 * (x_i, t_{n+1}) with the frozen speed f(x_i, t_{n+1}) and interpolate
 * linearly in V^n. Feet left of x = 0 take the inflow data, linearly
 * interpolated in time between t_n and t_{n+1}.
 */
inline Field step_semilagrangian_1d(const Field& vn, const Advection1DProblem& p, double k, double t_next,
                                   StepStats* stats = nullptr) {
    detail::check_1d(vn);
    const GridSpec& g = vn.grid();
    const double h = g.spacing();
    const double lo = g.extents().lo;
    const double t_n = t_next - k;
    const double beta_old = p.inflow(t_n);
    const double beta_new = p.inflow(t_next);
    Field out(g);
    out[0] = beta_new;
    const auto last = g.size() - 1;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double x = g.coordinate(static_cast<std::ptrdiff_t>(i));
        const double f = p.speed(x, t_next);
        const double foot = x - k * f;
        if (foot < lo) {
            const double travel = (x - lo) / f;  // < k
            const double w = travel / k;         // weight of beta(t_n)
            out[i] = travel * detail::source(p, x, t_next) + w * beta_old + (1.0 - w) * beta_new;
            continue;
        }
        const double s = (std::min(foot, g.extents().hi) - lo) / h;
        auto j = static_cast<std::size_t>(std::ceil(s));
        j = std::clamp<std::size_t>(j, 1, last);
        const double xi1 = std::clamp(s - static_cast<double>(j - 1), 0.0, 1.0);
        out[i] = k * detail::source(p, x, t_next) + xi1 * vn[j] + (1.0 - xi1) * vn[j - 1];
    }
    if (stats) stats->implicit_nodes += g.size() - 1;
    return out;
}

struct March1DResult {
    Field final_field;
    double final_time = 0.0;
    double step = 0.0;
    std::size_t steps = 0;
    std::size_t updates = 0;
    StepStats stats;
    double wall_ms = 0.0;
};

/// Marches forward from t = 0 to `end_time` with N = ceil(T / k_requested) uniform steps.
inline March1DResult march_1d(const Advection1DProblem& p, const GridSpec& grid, Scheme scheme, double k_requested,
                              double end_time) {
    if (grid.dim() != 1) throw std::invalid_argument("march_1d needs a 1D grid");
    if (!(p.speed_min > 0.0)) throw std::invalid_argument("1D schemes need f > 0 for left-to-right flow");
    const auto start = std::chrono::steady_clock::now();
    const TimeSpec time = TimeSpec::covering(end_time, k_requested);
    const double k = time.step();
    Field v(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = p.initial(grid.coordinate(static_cast<std::ptrdiff_t>(i)));
    v[0] = p.inflow(0.0);
    March1DResult r;
    for (std::size_t n = 0; n < time.num_steps(); ++n) {
        const double t_n = time.time(n);
        const double t_next = time.time(n + 1);
        switch (scheme) {
            case Scheme::Explicit: v = step_explicit_1d(v, p, k, t_n, &r.stats); break;
            case Scheme::Implicit: v = step_implicit_1d(v, p, k, t_next, &r.stats); break;
            case Scheme::Hybrid: v = step_hybrid_1d(v, p, k, t_n, &r.stats); break;
            case Scheme::SemiLagrangian: v = step_semilagrangian_1d(v, p, k, t_next, &r.stats); break;
        }
        r.updates += grid.size() - 1;
    }
    if (!v.all_finite()) throw std::runtime_error("1D march produced a non-finite value");
    r.final_field = std::move(v);
    r.final_time = time.terminal_time();
    r.step = k;
    r.steps = time.num_steps();
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace hjb::advect
