#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hjbmarch/geometry.hpp"
#include "hjbmarch/heap.hpp"
#include "hjbmarch/local_updates.hpp"

namespace hjb {

enum class NodeLabel : unsigned char { Far, Considered, Accepted };

/**
 * One implicit time slice: find V^n from the known slice V^{n+1}.
 *
 * `fixed` marks the nodes whose values are prescribed (Dirichlet data and,
 * for the hybrid scheme, explicitly updated nodes); their values are read
 * from `fixed_values`. `speed` and `cost` hold f and K sampled at t_n.
 */
struct SliceInputs {
    const Field& v_next;
    std::span<const unsigned char> fixed;
    const Field& fixed_values;
    std::span<const double> speed;
    std::span<const double> cost;
    double k;
};

struct SliceStats {
    std::size_t accepted = 0;
    std::size_t local_solves = 0;
    std::size_t improvements = 0;
    std::size_t order_violations = 0;  // accepted value below its predecessor
    std::vector<std::size_t>* acceptance_order = nullptr;
    std::vector<double>* acceptance_values = nullptr;
};

/**
 * Modified Fast Marching for the value-dependent speed k f / (V^{n+1} - V + kK).
 *
 * Every free node starts at its stay-in-place value V^{n+1} + kK and, unlike
 * textbook FMM, is placed on the heap right away at that value (labelled Far
 * until a neighbor lowers it). A Far node can therefore be accepted at its
 * cap before any neighbor reaches it, which keeps acceptance ordered for
 * arbitrary V^{n+1}. Trial values come from the newly accepted neighbor
 * (W1) and the smaller Accepted neighbor across the other axis (W2).
 */
class SliceSolver {
public:
    Field solve(const SliceInputs& in, SliceStats* stats = nullptr) {
        Field out(in.v_next.grid());
        solve_into(in, out, stats);
        return out;
    }

    void solve_into(const SliceInputs& in, Field& out, SliceStats* stats = nullptr) {
        const GridSpec& g = in.v_next.grid();
        const std::size_t n = g.size();
        if (in.fixed.size() != n || in.speed.size() != n || in.cost.size() != n || in.fixed_values.size() != n) {
            throw std::invalid_argument("slice inputs do not match the grid");
        }
        if (!(in.k > 0.0)) throw std::invalid_argument("time step must be positive");
        if (out.grid() != g) out = Field(g);

        labels_.assign(n, NodeLabel::Far);
        heap_.reset(n);
        std::size_t fixed_count = 0;
        for (std::size_t f = 0; f < n; ++f) {
            if (in.fixed[f]) {
                const double v = in.fixed_values[f];
                if (!std::isfinite(v)) throw std::invalid_argument("prescribed slice value is not finite");
                out[f] = v;
                labels_[f] = NodeLabel::Considered;
                ++fixed_count;
            } else {
                out[f] = stay_in_place(in.v_next[f], in.k, in.cost[f]);
            }
            heap_.push_unordered(f, out[f]);
        }
        if (fixed_count == 0) throw std::invalid_argument("slice needs at least one prescribed node");
        heap_.heapify();

        const double h = g.spacing();
        const std::size_t m = g.points_per_axis();
        const auto last = static_cast<std::ptrdiff_t>(m - 1);
        const bool planar = g.dim() == 2;
        double previous = -kInf;

        while (!heap_.empty()) {
            const auto [value, x] = heap_.pop();
            labels_[x] = NodeLabel::Accepted;
            if (stats) {
                ++stats->accepted;
                if (value < previous) ++stats->order_violations;
                if (stats->acceptance_order) stats->acceptance_order->push_back(x);
                if (stats->acceptance_values) stats->acceptance_values->push_back(value);
            }
            previous = value;

            const Node xn = g.node(x);
            for (int axis = 0; axis < (planar ? 2 : 1); ++axis) {
                for (int dir : {-1, +1}) {
                    Node yn = xn;
                    (axis == 0 ? yn.i : yn.j) += dir;
                    if (yn.i < 0 || yn.i > last || (planar && (yn.j < 0 || yn.j > last))) continue;
                    const std::size_t y = g.flat(yn);
                    if (labels_[y] == NodeLabel::Accepted || in.fixed[y]) continue;
                    if (!(value < out[y])) continue;

                    QuadraticInputs q;
                    q.w0 = in.v_next[y];
                    q.w1 = value;
                    q.h = h;
                    q.k = in.k;
                    q.f = in.speed[y];
                    q.K = in.cost[y];
                    if (planar) {
                        // Transverse axis of y: accepted neighbors only.
                        double w2 = kInf;
                        const int other = 1 - axis;
                        for (int d2 : {-1, +1}) {
                            Node zn = yn;
                            (other == 0 ? zn.i : zn.j) += d2;
                            if (zn.i < 0 || zn.i > last || zn.j < 0 || zn.j > last) continue;
                            const std::size_t z = g.flat(zn);
                            if (labels_[z] == NodeLabel::Accepted) w2 = std::min(w2, out[z]);
                        }
                        if (std::isfinite(w2)) q.w2 = w2;
                    }
                    const double trial = local_solve(q);
                    if (stats) ++stats->local_solves;
                    if (trial < out[y]) {
                        out[y] = trial;
                        labels_[y] = NodeLabel::Considered;
                        heap_.decrease(y, trial);
                        if (stats) ++stats->improvements;
                    }
                }
            }
        }
    }

    const std::vector<NodeLabel>& labels() const { return labels_; }

private:
    std::vector<NodeLabel> labels_;
    ConsideredHeap heap_;
};

inline Field solve_slice(const SliceInputs& in, SliceStats* stats = nullptr) {
    SliceSolver solver;
    return solver.solve(in, stats);
}

}  // namespace hjb
