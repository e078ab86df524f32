#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjbmarch/geometry.hpp"

namespace hjb {

using SpaceTimeFn = std::function<double(Point, double)>;
using SpaceFn = std::function<double(Point)>;
/// Fills one value per grid node at time t; optional fast path for sampling a whole slice.
using SliceSampler = std::function<void(const GridSpec&, double, std::span<double>)>;

/**
 * Terminal-value problem  v_t + K - f |grad v| = 0  on the unit square,
 * v = q on the Dirichlet part of the boundary, v = q_T at t = T.
 */
struct IsotropicProblem {
    std::string id;
    std::map<std::string, double> parameters;

    double terminal_time = 1.0;
    SpaceTimeFn speed;
    SpaceTimeFn cost;
    SpaceTimeFn dirichlet;
    SpaceFn terminal;
    EdgeKinds edges{};

    double speed_min = 1.0;  // F1
    double speed_max = 1.0;  // F2
    double cost_min = 1.0;   // K1
    double cost_max = 1.0;   // K2

    bool speed_time_invariant = false;
    bool cost_time_invariant = false;
    SliceSampler speed_slice;

    std::optional<SpaceTimeFn> analytic;

    bool has_analytic() const { return analytic.has_value(); }

    double exact(Point p, double t) const {
        if (!analytic) throw std::logic_error("problem '" + id + "' has no analytic solution");
        return (*analytic)(p, t);
    }

    void sample_speed(const GridSpec& grid, double t, std::span<double> out) const {
        if (speed_slice) {
            speed_slice(grid, t, out);
            return;
        }
        for (std::size_t f = 0; f < grid.size(); ++f) out[f] = speed(grid.point(f), t);
    }

    void sample_cost(const GridSpec& grid, double t, std::span<double> out) const {
        for (std::size_t f = 0; f < grid.size(); ++f) out[f] = cost(grid.point(f), t);
    }
};

/// Forward problem  v_t + f v_x = g  on (0,1), v(x,0) = alpha, v(0,t) = beta.
struct Advection1DProblem {
    std::string id;
    std::function<double(double, double)> speed;
    std::function<double(double)> initial;
    std::function<double(double)> inflow;
    std::function<double(double, double)> source;
    std::optional<std::function<double(double, double)>> analytic;

    double speed_max = 1.0;  // analytic bound, drives the CFL step
    double speed_min = 1.0;
    double report_time = 1.0;
    bool has_source = false;

    double exact(double x, double t) const {
        if (!analytic) throw std::logic_error("problem '" + id + "' has no analytic solution");
        return (*analytic)(x, t);
    }
};

/// Distance to the boundary of the unit square.
inline double distance_to_boundary(Point p) { return std::min({p.x, p.y, 1.0 - p.x, 1.0 - p.y}); }

inline IsotropicProblem experiment1() {
    IsotropicProblem p;
    p.id = "experiment1";
    p.terminal_time = 1.2;
    const double T = p.terminal_time;
    p.speed = [](Point, double) { return 1.0; };
    p.cost = [](Point, double) { return 1.0; };
    p.dirichlet = [](Point, double) { return 0.0; };
    p.terminal = [](Point) { return 0.0; };
    p.edges = EdgeKinds::all_dirichlet();
    p.speed_min = p.speed_max = 1.0;
    p.speed_time_invariant = p.cost_time_invariant = true;
    p.analytic = [T](Point x, double t) { return std::min(distance_to_boundary(x), T - t); };
    return p;
}

inline IsotropicProblem experiment2(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("experiment2 needs lambda > 0");
    IsotropicProblem p;
    p.id = "experiment2";
    p.parameters["lambda"] = lambda;
    p.terminal_time = 1.2;
    const double T = p.terminal_time;
    auto u = [lambda](Point x, double t) {
        const double s = x.y + x.y * x.y;
        return s + std::exp(lambda * (t + s));
    };
    p.speed = [](Point x, double) { return 1.0 / (2.0 * x.y + 1.0); };
    p.cost = [](Point, double) { return 1.0; };
    p.dirichlet = u;
    p.terminal = [u, T](Point x) { return u(x, T); };
    p.edges = {NodeKind::Outflow, NodeKind::Outflow, NodeKind::Dirichlet, NodeKind::Outflow};
    p.speed_min = 1.0 / 3.0;
    p.speed_max = 1.0;
    p.speed_time_invariant = p.cost_time_invariant = true;
    p.analytic = u;
    return p;
}

inline double experiment3_boundary(double t) {
    const double e8 = std::exp(8.0);
    return (e8 - std::exp(8.0 * (1.0 - t))) / (e8 - 1.0);
}

/// Minimal time to reach the boundary with speed ((1 + 2 phi) / 2)^gamma.
inline double experiment3_exit_time(double phi, double gamma) {
    return std::pow(2.0, gamma - 1.0) / (gamma - 1.0) * (1.0 - std::pow(1.0 + 2.0 * phi, -(gamma - 1.0)));
}

inline IsotropicProblem experiment3(double gamma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("experiment3 needs gamma > 1");
    IsotropicProblem p;
    p.id = "experiment3";
    p.parameters["gamma"] = gamma;
    p.terminal_time = 1.0;
    const double T = p.terminal_time;
    auto u = [gamma](Point x, double t) {
        const double tau = experiment3_exit_time(distance_to_boundary(x), gamma);
        return tau + experiment3_boundary(t + tau);
    };
    p.speed = [gamma](Point x, double) { return std::pow((1.0 + 2.0 * distance_to_boundary(x)) / 2.0, gamma); };
    p.cost = [](Point, double) { return 1.0; };
    p.dirichlet = [](Point, double t) { return experiment3_boundary(t); };
    p.terminal = [u, T](Point x) { return u(x, T); };
    p.edges = EdgeKinds::all_dirichlet();
    p.speed_min = std::pow(0.5, gamma);
    p.speed_max = 1.0;
    p.speed_time_invariant = p.cost_time_invariant = true;
    p.analytic = u;
    return p;
}

inline IsotropicProblem experiment4() {
    using std::numbers::pi;
    IsotropicProblem p;
    p.id = "experiment4";
    p.terminal_time = 4.0;
    auto pow16 = [](double s) {
        const double s2 = s * s;
        const double s4 = s2 * s2;
        const double s8 = s4 * s4;
        return s8 * s8;
    };
    p.speed = [pow16](Point x, double t) {
        const double st = std::sin(pi * t);
        return 0.1 + 4.9 * st * st * pow16(std::sin(8.0 * pi * x.x)) * pow16(std::sin(8.0 * pi * x.y));
    };
    // Separable in x and y; avoids 2 sin calls per node per slice.
    p.speed_slice = [pow16](const GridSpec& g, double t, std::span<double> out) {
        const std::size_t m = g.points_per_axis();
        std::vector<double> axis(m);
        for (std::size_t i = 0; i < m; ++i) axis[i] = pow16(std::sin(8.0 * pi * g.coordinate(static_cast<std::ptrdiff_t>(i))));
        const double st = std::sin(pi * t);
        const double amp = 4.9 * st * st;
        if (g.dim() == 1) {
            for (std::size_t i = 0; i < m; ++i) out[i] = 0.1 + amp * axis[i] * axis[0];
            return;
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double row = amp * axis[j];
            for (std::size_t i = 0; i < m; ++i) out[j * m + i] = 0.1 + row * axis[i];
        }
    };
    p.cost = [](Point, double) { return 1.0; };
    p.dirichlet = [](Point, double) { return 0.0; };
    p.terminal = [](Point) { return 0.0; };
    p.edges = EdgeKinds::all_dirichlet();
    p.speed_min = 0.1;
    p.speed_max = 5.0;
    p.cost_time_invariant = true;
    return p;
}

/// Builds a catalog problem from its name and parameter map (as read from a config file).
inline IsotropicProblem make_problem(const std::string& name, const std::map<std::string, double>& params) {
    auto param = [&](const char* key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    if (name == "experiment1") return experiment1();
    if (name == "experiment2") return experiment2(param("lambda", 0.1));
    if (name == "experiment3") return experiment3(param("gamma", 11.0));
    if (name == "experiment4") return experiment4();
    throw std::invalid_argument("unknown problem '" + name + "'");
}

inline bool is_isotropic_problem(const std::string& name) {
    return name == "experiment1" || name == "experiment2" || name == "experiment3" || name == "experiment4";
}

namespace detail {

// Travel time from x = 0 to x along dx/dt = f(x); exact solution of a
// time-independent advection problem is beta(t - S(x)) once t >= S(x).
inline Advection1DProblem characteristic_case(std::string id, std::function<double(double)> f,
                                              std::function<double(double)> travel, double fmin, double fmax,
                                              double report_time, double alpha) {
    using std::numbers::pi;
    Advection1DProblem p;
    p.id = std::move(id);
    p.speed = [f](double x, double) { return f(x); };
    p.initial = [alpha](double) { return alpha; };
    p.inflow = [](double t) { return std::sin(10.0 * pi * t); };
    p.source = [](double, double) { return 0.0; };
    p.analytic = [travel, alpha](double x, double t) {
        const double s = travel(x);
        return t >= s ? std::sin(10.0 * pi * (t - s)) : alpha;
    };
    p.speed_min = fmin;
    p.speed_max = fmax;
    p.report_time = report_time;
    return p;
}

}  // namespace detail

inline const std::vector<std::string>& advection_cases() {
    static const std::vector<std::string> cases{"fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b"};
    return cases;
}

/**
 * The 1D speed suite. `alpha` is the constant initial value used by the
 * fig2/fig3 cases, whose initial data only matter before the inflow signal
 * has crossed the domain.
 */
inline Advection1DProblem advection_catalog(const std::string& case_id, double alpha = 0.0) {
    using std::numbers::pi;
    if (case_id == "fig1a") {
        Advection1DProblem p;
        p.id = case_id;
        p.speed = [](double x, double) { return 1.0 / (2.0 * x + 1.0); };
        p.initial = [](double x) { return std::exp(x * x + x); };
        p.inflow = [](double t) { return std::exp(-t); };
        p.source = [](double, double) { return 0.0; };
        p.analytic = [](double x, double t) { return std::exp(x * x + x - t); };
        p.speed_min = 1.0 / 3.0;
        p.speed_max = 1.0;
        p.report_time = 1.5;
        return p;
    }
    if (case_id == "fig1b") {
        // With unit speed, e^{x+t} solves v_t + v_x = 2 e^{x+t}.
        Advection1DProblem p;
        p.id = case_id;
        p.speed = [](double, double) { return 1.0; };
        p.initial = [](double x) { return std::exp(x); };
        p.inflow = [](double t) { return std::exp(t); };
        p.source = [](double x, double t) { return 2.0 * std::exp(x + t); };
        p.has_source = true;
        p.analytic = [](double x, double t) { return std::exp(x + t); };
        p.speed_min = p.speed_max = 1.0;
        p.report_time = 1.5;
        return p;
    }
    if (case_id == "fig2a") {
        return detail::characteristic_case(
            case_id, [](double x) { return std::pow(1.0 + x, 10); },
            [](double x) { return (1.0 - std::pow(1.0 + x, -9)) / 9.0; }, 1.0, 1024.0, 1.0, alpha);
    }
    if (case_id == "fig2b") {
        return detail::characteristic_case(
            case_id, [](double x) { return 100.0 / (50.5 + 49.5 * std::cos(2.0 * pi * x)); },
            [](double x) { return 0.505 * x + 49.5 / (200.0 * pi) * std::sin(2.0 * pi * x); }, 1.0, 100.0, 1.0,
            alpha);
    }
    if (case_id == "fig2c") {
        return detail::characteristic_case(
            case_id, [](double x) { return std::pow(2.0 - x, 10); },
            [](double x) { return (std::pow(2.0 - x, -9) - std::pow(2.0, -9)) / 9.0; }, 1.0, 1024.0, 1.0, alpha);
    }
    if (case_id == "fig2d") {
        return detail::characteristic_case(
            case_id, [](double x) { return (2.0 - x) * (2.0 - x); },
            [](double x) { return 1.0 / (2.0 - x) - 0.5; }, 1.0, 4.0, 1.0, alpha);
    }
    if (case_id == "fig3a") {
        return detail::characteristic_case(
            case_id, [](double x) { return std::pow(2.0 - x, 8); },
            [](double x) { return (std::pow(2.0 - x, -7) - std::pow(2.0, -7)) / 7.0; }, 1.0, 256.0, 0.184, alpha);
    }
    if (case_id == "fig3b") {
        return detail::characteristic_case(
            case_id, [](double x) { return 50.0 / (25.5 + 24.5 * std::cos(2.0 * pi * x)); },
            [](double x) { return 0.51 * x + 24.5 / (100.0 * pi) * std::sin(2.0 * pi * x); }, 1.0, 50.0, 0.663,
            alpha);
    }
    throw std::invalid_argument("unknown advection case '" + case_id + "'");
}

}  // namespace hjb
