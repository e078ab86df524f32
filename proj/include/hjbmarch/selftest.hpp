#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hjbmarch/advect1d.hpp"
#include "hjbmarch/fast_marching.hpp"
#include "hjbmarch/local_updates.hpp"
#include "hjbmarch/marchers.hpp"
#include "hjbmarch/metrics.hpp"
#include "hjbmarch/oracle.hpp"

/// Randomized invariant suites runnable on an end-user machine.
namespace hjb::selftest {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double wall_ms = 0.0;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

inline QuadraticInputs random_inputs(std::mt19937_64& rng, bool two_sided) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    QuadraticInputs q;
    q.w0 = u(rng);
    q.w1 = 1.5 * u(rng);
    q.h = 0.01 + 0.1 * u(rng);
    q.k = std::pow(10.0, -3.0 + 3.0 * u(rng));
    q.f = 0.1 + 4.9 * u(rng);
    q.K = 0.5 + 1.5 * u(rng);
    if (two_sided) q.w2 = 1.5 * u(rng);
    return q;
}

}  // namespace detail

/// Fast Marching vs Gauss-Seidel on random slices; returns the worst L-infinity gap.
inline CheckResult oracle_equivalence(std::uint64_t seed, std::size_t instances = 20, std::size_t cells = 15) {
    CheckResult r{"oracle equivalence (Fast Marching vs Gauss-Seidel)"};
    double worst = 0.0;
    bool converged = true;
    for (std::size_t i = 0; i < instances; ++i) {
        const auto s = oracle::random_slice(cells, seed + i);
        const Field v = solve_slice(s.inputs());
        const auto ref = oracle::gauss_seidel_slice(s.inputs(), 1e-13, 50000);
        converged = converged && ref.converged;
        for (std::size_t x = 0; x < v.size(); ++x) worst = std::max(worst, std::abs(v[x] - ref.field[x]));
    }
    r.pass = converged && worst <= 1e-10;
    r.detail = std::to_string(instances) + " instances, max |FMM - GS| = " + detail::fmt(worst) +
               (converged ? "" : ", oracle did not converge");
    return r;
}

inline CheckResult causal_acceptance(std::uint64_t seed) {
    CheckResult r{"causal acceptance ordering"};
    std::size_t violations = 0;
    std::size_t changed = 0;
    std::size_t accepted = 0;
    for (std::uint64_t i = 0; i < 10; ++i) {
        const auto s = oracle::random_slice(48, seed + 100 + i);
        std::vector<std::size_t> order;
        std::vector<double> values;
        SliceStats stats;
        stats.acceptance_order = &order;
        stats.acceptance_values = &values;
        const Field v = solve_slice(s.inputs(), &stats);
        violations += stats.order_violations;
        accepted += stats.accepted;
        for (std::size_t n = 0; n < order.size(); ++n) {
            if (n && values[n] < values[n - 1]) ++violations;
            if (v[order[n]] != values[n]) ++changed;
        }
        if (order.size() != v.size()) ++violations;
    }
    r.pass = violations == 0 && changed == 0;
    r.detail = std::to_string(accepted) + " acceptances, " + std::to_string(violations) + " order violations, " +
               std::to_string(changed) + " values changed after acceptance";
    return r;
}

inline CheckResult local_monotonicity(std::uint64_t seed) {
    CheckResult r{"local-solve monotonicity"};
    std::mt19937_64 rng(seed);
    std::size_t bad = 0;
    constexpr double d = 1e-3;
    for (int t = 0; t < 10000; ++t) {
        const auto q = detail::random_inputs(rng, t % 2 == 1);
        const double base = upwind_node_value(q);
        auto q0 = q;
        q0.w0 += d;
        auto q1 = q;
        q1.w1 += d;
        if (upwind_node_value(q0) < base || upwind_node_value(q1) < base) ++bad;
        if (q.w2) {
            auto q2 = q;
            *q2.w2 += d;
            if (upwind_node_value(q2) < base) ++bad;
        }
    }
    r.pass = bad == 0;
    r.detail = "10000 tuples, " + std::to_string(bad) + " decreases";
    return r;
}

inline CheckResult closed_form_vs_bisection(std::uint64_t seed) {
    CheckResult r{"closed-form vs bisection local solves"};
    std::mt19937_64 rng(seed + 1);
    std::size_t mismatches = 0;
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const bool two = t % 2 == 1;
        const auto q = detail::random_inputs(rng, two);
        const auto closed = two ? quadratic_two_sided(q) : quadratic_one_sided(q);
        const auto bis =
            oracle::bisect_local(two ? oracle::LocalEquation::TwoSided : oracle::LocalEquation::OneSided, q, 1e-13);
        if (closed.has_value() != bis.has_value()) {
            ++mismatches;
        } else if (closed) {
            worst = std::max(worst, std::abs(*closed - *bis));
        }
    }
    r.pass = mismatches == 0 && worst <= 1e-9;
    r.detail = std::to_string(mismatches) + " existence mismatches, max gap " + detail::fmt(worst);
    return r;
}

inline CheckResult pde_residuals(std::uint64_t seed) {
    CheckResult r{"implicit-equation residuals"};
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10; ++i) {
        const auto s = oracle::random_slice(32, seed + 200 + i);
        const Field v = solve_slice(s.inputs());
        for (std::size_t x = 0; x < v.size(); ++x) {
            if (s.fixed[x]) continue;
            worst = std::max(worst, std::abs(implicit_residual(v, s.v_next, x, s.speed[x], s.cost[x], s.k)));
        }
    }
    r.pass = worst <= 1e-9;
    r.detail = "max residual over 10 random 33x33 slices = " + detail::fmt(worst);
    return r;
}

inline CheckResult comparison_principle(std::uint64_t seed) {
    CheckResult r{"comparison principle"};
    std::mt19937_64 rng(seed + 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_low = 0.0;
    double worst_high = 0.0;
    for (const auto& base : {experiment3(5.0), experiment4(), experiment2(0.5)}) {
        for (Scheme s : {Scheme::Explicit, Scheme::Implicit, Scheme::Hybrid}) {
            const double c = u(rng);
            auto raised = base;
            raised.terminal = [t = base.terminal, c](Point x) { return t(x) + c; };
            auto cfg = make_config(base, s, 16, s == Scheme::Explicit ? 1.0 : 4.0);
            for (std::size_t n = 0; n <= cfg.time.num_steps(); ++n) cfg.record_slices.insert(n);
            const auto a = march(base, cfg);
            const auto b = march(raised, cfg);
            for (const auto& [n, fa] : a.slices) {
                const Field& fb = b.slice(n);
                for (std::size_t x = 0; x < fa.size(); ++x) {
                    const double d = fb[x] - fa[x];
                    worst_low = std::max(worst_low, -d);
                    worst_high = std::max(worst_high, d - c);
                }
            }
        }
    }
    r.pass = worst_low <= 1e-12 && worst_high <= 1e-12;
    r.detail = "3 problems x 3 schemes on 17x17; max drop " + detail::fmt(worst_low) + ", max excess " +
               detail::fmt(worst_high);
    return r;
}

inline CheckResult determinism(std::uint64_t seed) {
    CheckResult r{"determinism (bitwise reproducibility)"};
    const auto s = oracle::random_slice(64, seed + 300);
    const bool slices_equal = solve_slice(s.inputs()) == solve_slice(s.inputs());
    const auto p = experiment4();
    const auto cfg = make_config(p, Scheme::Hybrid, 32, 4.0);
    const bool marches_equal = march(p, cfg).slice(0) == march(p, cfg).slice(0);
    r.pass = slices_equal && marches_equal;
    r.detail = std::string("slice solve ") + (slices_equal ? "identical" : "differs") + ", hybrid march " +
               (marches_equal ? "identical" : "differs");
    return r;
}

inline CheckResult hybrid_endpoints() {
    CheckResult r{"hybrid endpoint equivalences"};
    auto run = [](const IsotropicProblem& p, Scheme s, double m) { return march(p, make_config(p, s, 32, m)).slice(0); };
    const auto p3 = experiment3(11.0);
    const auto p4 = experiment4();
    const bool low = run(p3, Scheme::Hybrid, 1.0) == run(p3, Scheme::Explicit, 1.0) &&
                     run(p4, Scheme::Hybrid, 1.0) == run(p4, Scheme::Explicit, 1.0);
    const bool high = run(p4, Scheme::Hybrid, 64.0) == run(p4, Scheme::Implicit, 64.0);
    r.pass = low && high;
    r.detail = std::string("k = k_hat: ") + (low ? "equals explicit" : "differs from explicit") +
               "; all nodes failing the CFL test: " + (high ? "equals implicit" : "differs from implicit");
    return r;
}

inline CheckResult advection_invariants(std::uint64_t seed) {
    CheckResult r{"1D exact shift and maximum principle"};
    Advection1DProblem p;
    p.id = "selftest";
    p.speed = [](double x, double) { return 1.0 + 3.0 * std::sin(3.0 * x) * std::sin(3.0 * x); };
    p.speed_min = 1.0;
    p.speed_max = 4.0;
    p.initial = [](double) { return 0.0; };
    p.inflow = [](double t) { return std::cos(9.0 * t); };
    p.source = [](double, double) { return 0.0; };
    const GridSpec g = unit_grid(1, 64);
    const double h = g.spacing();
    std::mt19937_64 rng(seed + 3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double excursion = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Field v(g);
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = u(rng);
        const double t = 0.1 * trial;
        for (double m : {0.5, 1.0, 4.0, 16.0}) {
            const double k = m * advect::cfl_step_1d(p, h);
            double lo = std::min(p.inflow(t), p.inflow(t + k));
            double hi = std::max(p.inflow(t), p.inflow(t + k));
            for (double x : v.values()) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            std::vector<Field> outs{advect::step_implicit_1d(v, p, k, t + k), advect::step_hybrid_1d(v, p, k, t),
                                    advect::step_semilagrangian_1d(v, p, k, t + k)};
            if (m <= 1.0) outs.push_back(advect::step_explicit_1d(v, p, k, t));
            for (const auto& out : outs) {
                for (double x : out.values()) excursion = std::max({excursion, x - hi, lo - x});
            }
        }
    }
    // Unit Courant number: the explicit step is an exact shift.
    Advection1DProblem c = p;
    c.speed = [](double, double) { return 1.0; };
    c.speed_min = c.speed_max = 1.0;
    c.inflow = [](double t) { return std::sin(3.0 * t); };
    Field v(g);
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::sin(-3.0 * g.coordinate(static_cast<std::ptrdiff_t>(i)));
    double shift_err = 0.0;
    for (int n = 0; n < 64; ++n) {
        v = advect::step_explicit_1d(v, c, h, n * h);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.coordinate(static_cast<std::ptrdiff_t>(i));
            shift_err = std::max(shift_err, std::abs(v[i] - std::sin(3.0 * ((n + 1) * h - x))));
        }
    }
    r.pass = excursion <= 1e-14 && shift_err <= 1e-14;
    r.detail = "max excursion " + detail::fmt(excursion) + ", shift error " + detail::fmt(shift_err);
    return r;
}

/// Runs every suite in a fixed order; `seed` varies the random instances.
inline std::vector<CheckResult> run_all(std::uint64_t seed) {
    const std::vector<std::function<CheckResult()>> suites{
        [&] { return oracle_equivalence(seed); },
        [&] { return causal_acceptance(seed); },
        [&] { return local_monotonicity(seed); },
        [&] { return closed_form_vs_bisection(seed); },
        [&] { return pde_residuals(seed); },
        [&] { return comparison_principle(seed); },
        [&] { return determinism(seed); },
        [] { return hybrid_endpoints(); },
        [&] { return advection_invariants(seed); },
    };
    std::vector<CheckResult> out;
    for (const auto& suite : suites) {
        const auto start = std::chrono::steady_clock::now();
        CheckResult r = suite();
        r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace hjb::selftest
