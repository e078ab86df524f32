#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hjbmarch/local_updates.hpp"
#include "hjbmarch/metrics.hpp"
#include "hjbmarch/oracle.hpp"

namespace hjb {
namespace {

QuadraticInputs inputs(double w0, double w1, std::optional<double> w2, double h, double k, double f, double K) {
    QuadraticInputs q;
    q.w0 = w0;
    q.w1 = w1;
    q.w2 = w2;
    q.h = h;
    q.k = k;
    q.f = f;
    q.K = K;
    return q;
}

Field grid3(double h, std::vector<double> values) {
    const GridSpec g = make_grid(2, 3, {0.0, 2.0 * h});
    return Field(g, std::move(values));
}

TEST(ExplicitUpdate, FlatFieldAccruesCost) {
    const Field v = grid3(0.5, std::vector<double>(9, 4.0));
    EXPECT_DOUBLE_EQ(explicit_update_value(4.0, upwind_gradient(v, 4), 1.0, 1.0, 0.1), 4.1);
}

TEST(ExplicitUpdate, HandComputedStencil) {
    // Row-major 3x3 with h = 1: left 1, right 3, up = down = 2, center 2.
    const Field v = grid3(1.0, {0, 2, 0, 1, 2, 3, 0, 2, 0});
    const auto g = upwind_gradient(v, 4);
    EXPECT_DOUBLE_EQ(g.gx, 1.0);
    EXPECT_DOUBLE_EQ(g.gy, 0.0);
    EXPECT_DOUBLE_EQ(explicit_update_value(2.0, g, 1.0, 1.0, 0.5), 2.0);
}

TEST(ExplicitUpdate, OffGridDifferencesExcluded) {
    // Node (0,1) on the left edge: only the right x-neighbor exists.
    const Field v = grid3(1.0, {5, 5, 5, 2, 5, 5, 5, 5, 5});
    const auto g = upwind_gradient(v, 3);
    EXPECT_DOUBLE_EQ(g.gx, 0.0);
    EXPECT_DOUBLE_EQ(g.gy, 0.0);
    const Field w = grid3(1.0, {5, 5, 5, 2, 1, 5, 5, 5, 5});
    EXPECT_DOUBLE_EQ(upwind_gradient(w, 3).gx, 1.0);
}

TEST(ExplicitUpdate, NodeUpdateUsesProblemData) {
    const auto p = experiment1();
    const GridSpec g = unit_grid(2, 4);
    Field v(g);
    for (std::size_t x = 0; x < g.size(); ++x) v[x] = g.point(x).x;
    const std::size_t c = g.flat({2, 2});
    EXPECT_DOUBLE_EQ(explicit_node_update(v, c, p, 0.1, 0.0), 0.5 + 0.1 * (1.0 - 1.0));
}

TEST(StayInPlace, Examples) {
    EXPECT_DOUBLE_EQ(stay_in_place(1.0, 0.1, 1.0), 1.1);
    EXPECT_DOUBLE_EQ(stay_in_place(0.0, 0.3, 2.0), 0.6);
}

TEST(SolveQuadratic, StableRootsAndDegenerateCases) {
    auto r = solve_quadratic(1.0, -3.0, 2.0);
    ASSERT_EQ(r.count, 2);
    EXPECT_DOUBLE_EQ(r.values[0], 1.0);
    EXPECT_DOUBLE_EQ(r.values[1], 2.0);
    r = solve_quadratic(1.0, -2.0, 1.0);
    ASSERT_EQ(r.count, 1);
    EXPECT_DOUBLE_EQ(r.values[0], 1.0);
    r = solve_quadratic(0.0, 2.0, -1.0);
    ASSERT_EQ(r.count, 1);
    EXPECT_DOUBLE_EQ(r.values[0], 0.5);
    EXPECT_EQ(solve_quadratic(1.0, 0.0, 1.0).count, 0);
    r = solve_quadratic(1.0, -1e8, 1.0);  // cancellation-prone small root
    ASSERT_EQ(r.count, 2);
    EXPECT_NEAR(r.values[0], 1e-8, 1e-22);
}

TEST(OneSided, SymmetricCase) {
    const auto v = quadratic_one_sided(inputs(1.0, 0.0, {}, 1.0, 1.0, 1.0, 0.0));
    ASSERT_TRUE(v);
    EXPECT_NEAR(*v, 0.5, 1e-15);
}

TEST(OneSided, ZeroDenominatorIsNoSolution) {
    EXPECT_FALSE(quadratic_one_sided(inputs(1.0, 1.5, {}, 0.2, 0.5, 1.0, 1.0)));
    EXPECT_FALSE(quadratic_one_sided(inputs(1.0, 2.0, {}, 0.2, 0.5, 1.0, 1.0)));
}

TEST(OneSided, LinearFamilyMatchesBisection) {
    const auto q = inputs(3.0, 3.0, {}, 0.1, 0.5, 2.0, 1.0);
    const auto v = quadratic_one_sided(q);
    ASSERT_TRUE(v);
    EXPECT_NEAR(*v, 33.5 / 11.0, 1e-14);
    const auto b = oracle::bisect_local(oracle::LocalEquation::OneSided, q, 1e-14);
    ASSERT_TRUE(b);
    EXPECT_NEAR(*v, *b, 1e-12);
}

TEST(TwoSided, ClosedFormSqrt2Minus1) {
    const auto v = quadratic_two_sided(inputs(1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0));
    ASSERT_TRUE(v);
    EXPECT_NEAR(*v, std::sqrt(2.0) - 1.0, 1e-15);
}

TEST(TwoSided, FarTransverseNeighborFallsBack) {
    const auto q = inputs(1.0, 0.0, 0.9, 1.0, 1.0, 1.0, 0.0);
    EXPECT_FALSE(quadratic_two_sided(q));
    EXPECT_DOUBLE_EQ(local_solve(q), *quadratic_one_sided(q));
}

TEST(TwoSided, SymmetricReducesToScaledOneSided) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const double w = u(rng), h = 0.01 + 0.2 * u(rng);
        const auto q2 = inputs(u(rng), w, w, h, 0.01 + u(rng), 0.1 + 5 * u(rng), 0.5 + 1.5 * u(rng));
        auto q1 = q2;
        q1.w2.reset();
        q1.h = h / std::sqrt(2.0);
        const auto a = quadratic_two_sided(q2);
        const auto b = quadratic_one_sided(q1);
        ASSERT_EQ(a.has_value(), b.has_value());
        if (a) EXPECT_NEAR(*a, *b, 1e-12 * (1 + std::abs(*b)));
    }
}

TEST(LocalSolve, NoNeighborsBelowCapGiveInfinity) {
    EXPECT_EQ(local_solve(inputs(0.0, 5.0, {}, 0.1, 0.1, 1.0, 1.0)), kInf);
}

QuadraticInputs random_inputs(std::mt19937_64& rng, bool two_sided) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto q = inputs(u(rng), 1.5 * u(rng), {}, 0.01 + 0.1 * u(rng), std::pow(10.0, -3.0 + 3.0 * u(rng)),
                    0.1 + 4.9 * u(rng), 0.5 + 1.5 * u(rng));
    if (two_sided) q.w2 = 1.5 * u(rng);
    return q;
}

TEST(NodeValue, MonotoneInEveryInput) {
    std::mt19937_64 rng(11);
    constexpr double d = 1e-3;
    for (int t = 0; t < 10000; ++t) {
        const auto q = random_inputs(rng, t % 2 == 1);
        const double base = upwind_node_value(q);
        auto q0 = q;
        q0.w0 += d;
        auto q1 = q;
        q1.w1 += d;
        EXPECT_GE(upwind_node_value(q0), base);
        EXPECT_GE(upwind_node_value(q1), base);
        if (q.w2) {
            auto q2 = q;
            *q2.w2 += d;
            EXPECT_GE(upwind_node_value(q2), base);
        }
    }
}

TEST(NodeValue, MatchesScalarUpwindEquation) {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 10000; ++t) {
        const auto q = random_inputs(rng, true);
        const double ref = oracle::detail::solve_node({q.w1, *q.w2}, q.cap(), q.h, q.k * q.f);
        EXPECT_NEAR(upwind_node_value(q), ref, 1e-9);
    }
}

TEST(NodeValue, NeverAboveCapOrBelowSmallestNeighbor) {
    std::mt19937_64 rng(16);
    for (int t = 0; t < 10000; ++t) {
        const auto q = random_inputs(rng, t % 2 == 1);
        const double v = upwind_node_value(q);
        EXPECT_LE(v, q.cap());
        EXPECT_GE(v, std::min({q.cap(), q.w1, q.w2.value_or(kInf)}));
    }
}

TEST(LocalSolve, OutputIsCausal) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 10000; ++t) {
        const auto q = random_inputs(rng, t % 2 == 1);
        if (auto v = quadratic_one_sided(q)) {
            EXPECT_GE(*v, q.w1);
            EXPECT_GT(q.cap() - *v, 0.0);
        }
        if (q.w2) {
            if (auto v = quadratic_two_sided(q)) {
                EXPECT_GE(*v, std::max(q.w1, *q.w2));
                EXPECT_GT(q.cap() - *v, 0.0);
            }
        }
    }
}

TEST(LocalSolve, ClosedFormMatchesBisection) {
    std::mt19937_64 rng(13);
    std::size_t solved = 0;
    for (int t = 0; t < 10000; ++t) {
        const bool two = t % 2 == 1;
        const auto q = random_inputs(rng, two);
        const auto closed = two ? quadratic_two_sided(q) : quadratic_one_sided(q);
        const auto bis =
            oracle::bisect_local(two ? oracle::LocalEquation::TwoSided : oracle::LocalEquation::OneSided, q, 1e-13);
        ASSERT_EQ(closed.has_value(), bis.has_value()) << t;
        if (closed) {
            EXPECT_NEAR(*closed, *bis, 1e-9);
            ++solved;
        }
    }
    EXPECT_GT(solved, 2000u);
}

TEST(LocalSolve, TwoSidedRootSatisfiesImplicitEquation) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t checked = 0;
    for (int t = 0; t < 2000; ++t) {
        const double h = 0.02 + 0.1 * u(rng);
        const auto q = inputs(u(rng), u(rng), u(rng), h, 0.01 + u(rng), 0.1 + 4.9 * u(rng), 0.5 + 1.5 * u(rng));
        const auto v = quadratic_two_sided(q);
        if (!v || !(*v > std::max(q.w1, *q.w2)) || !(q.cap() - *v > 0.0)) continue;
        // Center node with W1 on the left, W2 below, and large values elsewhere.
        const double big = *v + 10.0;
        Field now = grid3(h, {big, *q.w2, big, q.w1, *v, big, big, big, big});
        Field next = grid3(h, std::vector<double>(9, 0.0));
        next[4] = q.w0;
        EXPECT_LE(std::abs(implicit_residual(now, next, 4, q.f, q.K, q.k)), 1e-10);
        ++checked;
    }
    EXPECT_GT(checked, 200u);
}

TEST(LocalSolve, OneSidedIsFirstOrderConsistent) {
    // u(x) = x + x^2/2 solves K - f u' = 0 with K = 1, f = 1/u'; steady, so W0 = u(x0).
    auto u = [](double x) { return x + 0.5 * x * x; };
    const double x0 = 0.5;
    std::vector<double> hs, errs;
    for (double h = 0.1; h > 1e-4; h /= 2) {
        const auto v = quadratic_one_sided(inputs(u(x0), u(x0 - h), {}, h, 1.0, 1.0 / (1.0 + x0), 1.0));
        ASSERT_TRUE(v);
        hs.push_back(h);
        errs.push_back(std::abs(*v - u(x0)) / h);
    }
    const double slope = convergence_slope(hs, errs);
    EXPECT_GE(slope, 0.7);
    EXPECT_LE(slope, 1.1);
}

}  // namespace
}  // namespace hjb
