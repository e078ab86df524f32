#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjbmarch/fast_marching.hpp"
#include "hjbmarch/geometry.hpp"
#include "hjbmarch/local_updates.hpp"
#include "hjbmarch/problem.hpp"

namespace hjb {

enum class Scheme { Explicit, Implicit, Hybrid };

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::Explicit: return "explicit";
        case Scheme::Implicit: return "implicit";
        case Scheme::Hybrid: return "hybrid";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& name) {
    if (name == "explicit") return Scheme::Explicit;
    if (name == "implicit") return Scheme::Implicit;
    if (name == "hybrid") return Scheme::Hybrid;
    throw std::invalid_argument("unknown 2D scheme '" + name + "'");
}

/// Largest step keeping the explicit update monotone: k F2 <= h / sqrt(2).
inline double cfl_step_2d(const IsotropicProblem& p, double h) { return h / (std::numbers::sqrt2 * p.speed_max); }

// Relative slack in the per-node CFL test so k = k_hat passes at f = F2 despite rounding.
inline constexpr double kCflSlack2d = 1e-12;

/// Per-node hybrid test: f(x, t_n) <= h / (k sqrt 2).
inline bool passes_local_cfl(double f, double h, double k) {
    return k * f * std::numbers::sqrt2 <= h * (1.0 + kCflSlack2d);
}

struct MarchConfig {
    Scheme scheme = Scheme::Explicit;
    GridSpec grid;
    TimeSpec time{1.0, 1};
    std::set<std::size_t> record_slices{0};
};

/// k = r * k_hat rounded down so that N = ceil(T / (r k_hat)) steps cover [0, T].
inline MarchConfig make_config(const IsotropicProblem& p, Scheme scheme, std::size_t cells, double step_multiplier) {
    MarchConfig c;
    c.scheme = scheme;
    c.grid = unit_grid(2, cells);
    c.time = TimeSpec::covering(p.terminal_time, step_multiplier * cfl_step_2d(p, c.grid.spacing()));
    return c;
}

struct RunReport {
    std::size_t steps = 0;
    double step = 0.0;
    std::size_t updates = 0;       // node values computed (one per free node per slice)
    std::size_t local_solves = 0;  // quadratic solves inside Fast Marching
    std::size_t explicit_nodes = 0;
    std::size_t implicit_nodes = 0;
    std::vector<std::size_t> updates_per_slice;  // indexed by n
    std::size_t order_violations = 0;
    bool cfl_exceeded = false;  // explicit scheme run with k > k_hat
    double wall_ms = 0.0;
};

struct MarchResult {
    std::map<std::size_t, Field> slices;
    RunReport report;
    double step = 0.0;

    const Field& slice(std::size_t n) const {
        auto it = slices.find(n);
        if (it == slices.end()) throw std::out_of_range("slice " + std::to_string(n) + " was not recorded");
        return it->second;
    }
};

namespace detail {

inline void check_speed_bounds(const IsotropicProblem& p, std::span<const double> f, std::span<const double> K) {
    const double lo = p.speed_min * (1.0 - 1e-12);
    const double hi = p.speed_max * (1.0 + 1e-12);
    for (double v : f) {
        if (!(v >= lo && v <= hi)) {
            throw std::runtime_error("speed sample " + std::to_string(v) + " outside the declared bounds of '" + p.id +
                                     "'");
        }
    }
    for (double v : K) {
        if (!(v > 0.0)) throw std::runtime_error("running cost must stay positive");
    }
}

// Explicit update of every node not in `fixed`, reading v_next.
inline void explicit_pass(const Field& v_next, Field& out, std::span<unsigned char> fixed,
                          std::span<const double> f, std::span<const double> K, double k, bool mark_fixed,
                          const std::vector<unsigned char>* eligible) {
    const GridSpec& g = v_next.grid();
    const std::size_t m = g.points_per_axis();
    const double inv_h = 1.0 / g.spacing();
    const double* v = v_next.values().data();
    for (std::size_t j = 0; j < m; ++j) {
        const bool edge_row = j == 0 || j == m - 1;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t x = j * m + i;
            if (fixed[x]) continue;
            if (eligible && !(*eligible)[x]) continue;
            double gx = 0.0;
            double gy = 0.0;
            const double c = v[x];
            if (!edge_row && i != 0 && i != m - 1) {
                const double ax = std::min(v[x - 1], v[x + 1]);
                const double ay = std::min(v[x - m], v[x + m]);
                if (ax < c) gx = (c - ax) * inv_h;
                if (ay < c) gy = (c - ay) * inv_h;
                out[x] = c + k * (K[x] - f[x] * std::sqrt(gx * gx + gy * gy));
            } else {
                out[x] = explicit_update_value(c, upwind_gradient(v_next, x), f[x], K[x], k);
            }
            if (mark_fixed) fixed[x] = 1;
        }
    }
}

}  // namespace detail

/**
 * Backward time marching from t = T to t = 0.
 *
 * V^N = q_T everywhere. For each n = N-1 .. 0 the Dirichlet nodes take
 * q(x, t_n); the explicit scheme updates all other nodes from V^{n+1}; the
 * implicit scheme solves the slice by Fast Marching; the hybrid first
 * updates explicitly every node passing the local CFL test, then treats
 * those as extra boundary data for Fast Marching on the remainder.
 */
inline MarchResult march(const IsotropicProblem& p, const MarchConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const GridSpec& g = cfg.grid;
    if (g.dim() != 2) throw std::invalid_argument("march needs a 2D grid");
    const std::size_t N = cfg.time.num_steps();
    for (auto n : cfg.record_slices) {
        if (n > N) throw std::invalid_argument("recorded slice index beyond N");
    }
    const double k = cfg.time.step();
    const double h = g.spacing();
    const std::size_t size = g.size();

    MarchResult result;
    result.step = k;
    RunReport& rep = result.report;
    rep.steps = N;
    rep.step = k;
    rep.updates_per_slice.assign(N, 0);
    rep.cfl_exceeded = cfg.scheme == Scheme::Explicit && k > cfl_step_2d(p, h) * (1.0 + kCflSlack2d);

    const BoundaryMask mask(g, p.edges);
    std::vector<std::size_t> dirichlet_nodes;
    std::vector<Point> dirichlet_points;
    for (std::size_t x = 0; x < size; ++x) {
        if (mask.is_dirichlet(x)) {
            dirichlet_nodes.push_back(x);
            dirichlet_points.push_back(g.point(x));
        }
    }
    if (dirichlet_nodes.empty()) throw std::invalid_argument("problem has no Dirichlet boundary");

    Field current(g);
    for (std::size_t x = 0; x < size; ++x) current[x] = p.terminal(g.point(x));
    if (cfg.record_slices.count(N)) result.slices.emplace(N, current);

    std::vector<double> speed(size);
    std::vector<double> cost(size);
    bool speed_ready = false;
    bool cost_ready = false;
    std::vector<unsigned char> fixed(size);
    std::vector<unsigned char> eligible;
    Field next(g);
    SliceSolver solver;
    SliceStats stats;

    for (std::size_t n = N; n-- > 0;) {
        const double t = cfg.time.time(n);
        if (!speed_ready) {
            p.sample_speed(g, t, speed);
            speed_ready = p.speed_time_invariant;
        }
        if (!cost_ready) {
            p.sample_cost(g, t, cost);
            cost_ready = p.cost_time_invariant;
        }
        detail::check_speed_bounds(p, speed, cost);

        std::fill(fixed.begin(), fixed.end(), 0);
        for (std::size_t d = 0; d < dirichlet_nodes.size(); ++d) {
            next[dirichlet_nodes[d]] = p.dirichlet(dirichlet_points[d], t);
            fixed[dirichlet_nodes[d]] = 1;
        }
        const std::size_t free_nodes = size - dirichlet_nodes.size();
        rep.updates_per_slice[n] = free_nodes;
        rep.updates += free_nodes;

        switch (cfg.scheme) {
            case Scheme::Explicit:
                detail::explicit_pass(current, next, fixed, speed, cost, k, false, nullptr);
                rep.explicit_nodes += free_nodes;
                break;
            case Scheme::Hybrid: {
                eligible.assign(size, 0);
                std::size_t count = 0;
                for (std::size_t x = 0; x < size; ++x) {
                    if (!fixed[x] && passes_local_cfl(speed[x], h, k)) {
                        eligible[x] = 1;
                        ++count;
                    }
                }
                detail::explicit_pass(current, next, fixed, speed, cost, k, true, &eligible);
                rep.explicit_nodes += count;
                if (count == free_nodes) break;
                rep.implicit_nodes += free_nodes - count;
                stats = {};
                solver.solve_into({current, fixed, next, speed, cost, k}, next, &stats);
                rep.local_solves += stats.local_solves;
                rep.order_violations += stats.order_violations;
                break;
            }
            case Scheme::Implicit: {
                rep.implicit_nodes += free_nodes;
                stats = {};
                solver.solve_into({current, fixed, next, speed, cost, k}, next, &stats);
                rep.local_solves += stats.local_solves;
                rep.order_violations += stats.order_violations;
                break;
            }
        }
        if (!next.all_finite()) {
            throw std::runtime_error("march produced a non-finite value at slice " + std::to_string(n));
        }
        std::swap(current, next);
        if (cfg.record_slices.count(n)) result.slices.emplace(n, current);
    }
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

/// Slice index nearest to time t on the partition.
inline std::size_t slice_index(const TimeSpec& time, double t) {
    const double r = std::round(t / time.step());
    if (r < 0.0 || r > static_cast<double>(time.num_steps())) throw std::out_of_range("time outside [0, T]");
    return static_cast<std::size_t>(r);
}

inline std::string problem_key(const IsotropicProblem& p) {
    std::string key = p.id;
    for (const auto& [name, value] : p.parameters) {
        std::ostringstream os;
        os << value;
        key += "-" + name + "=" + os.str();
    }
    return key;
}

/// Cache directory: $HJBMARCH_CACHE when set, else ./hjbmarch-cache.
inline std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("HJBMARCH_CACHE"); env && *env) return env;
    return "hjbmarch-cache";
}

inline std::filesystem::path ground_truth_path(const std::filesystem::path& dir, const IsotropicProblem& p,
                                               std::size_t cells) {
    return dir / (problem_key(p) + "_" + std::to_string(cells) + ".csv");
}

inline std::string ground_truth_header(const IsotropicProblem& p, std::size_t cells) {
    return "hjbmarch-gt v1 " + problem_key(p) + " " + std::to_string(cells);
}

/// Reads a cached truth slice; empty optional on a missing, stale, or corrupt file.
inline std::optional<Field> load_ground_truth(const std::filesystem::path& file, const IsotropicProblem& p,
                                              std::size_t cells) {
    std::ifstream in(file);
    if (!in) return std::nullopt;
    std::string header;
    if (!std::getline(in, header) || header != ground_truth_header(p, cells)) return std::nullopt;
    try {
        Field f = read_csv(in, unit_grid(2, cells));
        if (!f.all_finite()) return std::nullopt;
        return f;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

struct GroundTruth {
    Field field;
    bool from_cache = false;
    std::filesystem::path file;
};

/**
 * Reference t = 0 slice for problems without a closed-form solution:
 * explicit marching at the CFL step on a fine grid, cached on disk.
 */
inline GroundTruth ground_truth(const IsotropicProblem& p, std::size_t fine_cells,
                                const std::filesystem::path& cache_dir = default_cache_dir()) {
    if (p.has_analytic()) {
        throw std::invalid_argument("problem '" + p.id + "' has an analytic solution; no ground truth needed");
    }
    GroundTruth gt;
    gt.file = ground_truth_path(cache_dir, p, fine_cells);
    if (auto cached = load_ground_truth(gt.file, p, fine_cells)) {
        gt.field = std::move(*cached);
        gt.from_cache = true;
        return gt;
    }
    MarchConfig cfg = make_config(p, Scheme::Explicit, fine_cells, 1.0);
    cfg.record_slices = {0};
    MarchResult r = march(p, cfg);
    gt.field = r.slice(0);
    std::filesystem::create_directories(cache_dir);
    const auto tmp = gt.file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write ground-truth cache " + tmp);
        out << ground_truth_header(p, fine_cells) << '\n';
        write_csv(out, gt.field);
    }
    std::filesystem::rename(tmp, gt.file);
    return gt;
}

}  // namespace hjb
