#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace hjb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Grid coordinates of a node. `j` is unused (zero) on 1D grids.
struct Node {
    std::ptrdiff_t i = 0;
    std::ptrdiff_t j = 0;
    friend bool operator==(const Node&, const Node&) = default;
};

/**
 * Uniform lattice on [lo, hi]^dim including the boundary nodes.
 *
 * Nodes are stored row-major: flat = j * points + i, so a row of the field
 * is a line of constant y. The same extents and point count apply to every
 * axis, which keeps the spacing isotropic.
 */
class GridSpec {
public:
    GridSpec() = default;

    GridSpec(int dim, std::size_t points_per_axis, Interval extents)
        : dim_(dim), points_(points_per_axis), extents_(extents) {
        if (dim != 1 && dim != 2) {
            throw std::invalid_argument("grid dimension must be 1 or 2");
        }
        if (points_per_axis < 3) {
            throw std::invalid_argument("grid needs at least 3 points per axis, got " +
                                        std::to_string(points_per_axis));
        }
        if (!(extents.hi > extents.lo) || !std::isfinite(extents.lo) || !std::isfinite(extents.hi)) {
            throw std::invalid_argument("grid extents must satisfy lo < hi");
        }
        h_ = (extents.hi - extents.lo) / static_cast<double>(points_per_axis - 1);
    }

    int dim() const { return dim_; }
    std::size_t points_per_axis() const { return points_; }
    /// Number of cells per axis, the "resolution" used by the sweeps.
    std::size_t cells_per_axis() const { return points_ - 1; }
    double spacing() const { return h_; }
    Interval extents() const { return extents_; }

    std::size_t size() const { return dim_ == 1 ? points_ : points_ * points_; }

    std::size_t flat(Node n) const {
        assert(contains(n));
        return static_cast<std::size_t>(n.j) * (dim_ == 1 ? 0 : points_) + static_cast<std::size_t>(n.i);
    }

    Node node(std::size_t flat) const {
        assert(flat < size());
        if (dim_ == 1) return {static_cast<std::ptrdiff_t>(flat), 0};
        return {static_cast<std::ptrdiff_t>(flat % points_), static_cast<std::ptrdiff_t>(flat / points_)};
    }

    bool contains(Node n) const {
        const auto m = static_cast<std::ptrdiff_t>(points_);
        if (n.i < 0 || n.i >= m) return false;
        if (dim_ == 1) return n.j == 0;
        return n.j >= 0 && n.j < m;
    }

    /// Coordinate along one axis; the last node lands on `hi` exactly.
    double coordinate(std::ptrdiff_t index) const {
        if (index == static_cast<std::ptrdiff_t>(points_ - 1)) return extents_.hi;
        return extents_.lo + static_cast<double>(index) * h_;
    }

    Point point(Node n) const {
        return {coordinate(n.i), dim_ == 1 ? 0.0 : coordinate(n.j)};
    }
    Point point(std::size_t flat) const { return point(node(flat)); }

    bool on_boundary(Node n) const {
        const auto last = static_cast<std::ptrdiff_t>(points_ - 1);
        if (n.i == 0 || n.i == last) return true;
        return dim_ == 2 && (n.j == 0 || n.j == last);
    }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.dim_ == b.dim_ && a.points_ == b.points_ && a.extents_.lo == b.extents_.lo &&
               a.extents_.hi == b.extents_.hi;
    }

private:
    int dim_ = 1;
    std::size_t points_ = 3;
    Interval extents_{};
    double h_ = 0.5;
};

inline GridSpec make_grid(int dim, std::size_t points_per_axis, Interval extents = {0.0, 1.0}) {
    return GridSpec(dim, points_per_axis, extents);
}

/// Unit interval/square with `cells` intervals per axis (h = 1/cells).
inline GridSpec unit_grid(int dim, std::size_t cells) { return GridSpec(dim, cells + 1, {0.0, 1.0}); }

class TimeSpec {
public:
    TimeSpec(double terminal_time, std::size_t num_steps) : terminal_(terminal_time), steps_(num_steps) {
        if (!(terminal_time > 0.0) || !std::isfinite(terminal_time)) {
            throw std::invalid_argument("terminal time must be positive");
        }
        if (num_steps == 0) throw std::invalid_argument("need at least one time step");
        k_ = terminal_ / static_cast<double>(steps_);
    }

    /// Uniform partition whose step does not exceed `requested_step`: N = ceil(T / k).
    static TimeSpec covering(double terminal_time, double requested_step) {
        if (!(requested_step > 0.0)) throw std::invalid_argument("time step must be positive");
        const double ratio = terminal_time / requested_step;
        auto n = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
        return TimeSpec(terminal_time, std::max<std::size_t>(n, 1));
    }

    double terminal_time() const { return terminal_; }
    std::size_t num_steps() const { return steps_; }
    double step() const { return k_; }

    /// t_n = n k, with t_N reported as T exactly.
    double time(std::size_t n) const {
        if (n == steps_) return terminal_;
        return static_cast<double>(n) * k_;
    }

private:
    double terminal_;
    std::size_t steps_;
    double k_;
};

/// One time slice of grid values. +inf is a legal value meaning "no finite value".
class Field {
public:
    Field() = default;
    explicit Field(const GridSpec& grid, double fill = 0.0) : grid_(grid), values_(grid.size(), fill) {}
    Field(const GridSpec& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw std::invalid_argument("field length does not match grid node count");
        }
    }

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t flat) { return values_[flat]; }
    double operator[](std::size_t flat) const { return values_[flat]; }
    double& at(Node n) { return values_[grid_.flat(n)]; }
    double at(Node n) const { return values_[grid_.flat(n)]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    friend bool operator==(const Field& a, const Field& b) { return a.grid_ == b.grid_ && a.values_ == b.values_; }

private:
    GridSpec grid_{};
    std::vector<double> values_;
};

enum class NodeKind : unsigned char { Interior, Dirichlet, Outflow };

/// Classification of the four sides of the unit square (two ends in 1D).
struct EdgeKinds {
    NodeKind x_lo = NodeKind::Dirichlet;
    NodeKind x_hi = NodeKind::Dirichlet;
    NodeKind y_lo = NodeKind::Dirichlet;
    NodeKind y_hi = NodeKind::Dirichlet;

    static EdgeKinds all_dirichlet() { return {}; }
};

/**
 * Per-node boundary classification built from per-edge kinds. Corner nodes
 * shared by a Dirichlet edge and an Outflow edge are Dirichlet.
 */
class BoundaryMask {
public:
    BoundaryMask() = default;
    BoundaryMask(const GridSpec& grid, EdgeKinds edges) : edges_(edges), kinds_(grid.size(), NodeKind::Interior) {
        for (std::size_t f = 0; f < grid.size(); ++f) {
            const Node n = grid.node(f);
            if (!grid.on_boundary(n)) continue;
            const auto last = static_cast<std::ptrdiff_t>(grid.points_per_axis() - 1);
            bool dirichlet = false;
            bool outflow = false;
            auto mark = [&](bool on_edge, NodeKind kind) {
                if (!on_edge || kind == NodeKind::Interior) return;
                (kind == NodeKind::Dirichlet ? dirichlet : outflow) = true;
            };
            mark(n.i == 0, edges.x_lo);
            mark(n.i == last, edges.x_hi);
            if (grid.dim() == 2) {
                mark(n.j == 0, edges.y_lo);
                mark(n.j == last, edges.y_hi);
            }
            kinds_[f] = dirichlet ? NodeKind::Dirichlet : (outflow ? NodeKind::Outflow : NodeKind::Dirichlet);
        }
    }

    NodeKind operator[](std::size_t flat) const { return kinds_[flat]; }
    bool is_dirichlet(std::size_t flat) const { return kinds_[flat] == NodeKind::Dirichlet; }
    std::size_t size() const { return kinds_.size(); }
    const EdgeKinds& edges() const { return edges_; }

    std::size_t count(NodeKind kind) const {
        return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), kind));
    }

private:
    EdgeKinds edges_{};
    std::vector<NodeKind> kinds_;
};

struct Neighbor {
    int axis = 0;       // 0 = x, 1 = y
    int direction = 0;  // -1 or +1
    std::optional<std::size_t> node;  // empty when off-grid
};

struct NeighborList {
    std::array<Neighbor, 4> items{};
    std::size_t count = 0;

    const Neighbor* begin() const { return items.data(); }
    const Neighbor* end() const { return items.data() + count; }
    std::size_t present() const {
        return static_cast<std::size_t>(std::count_if(begin(), end(), [](const Neighbor& n) { return n.node.has_value(); }));
    }
};

/// The 2*dim von Neumann neighbors of `flat`, in the order (x-, x+, y-, y+).
inline NeighborList neighbors(const GridSpec& grid, std::size_t flat) {
    NeighborList out;
    const Node n = grid.node(flat);
    for (int axis = 0; axis < grid.dim(); ++axis) {
        for (int dir : {-1, +1}) {
            Node m = n;
            (axis == 0 ? m.i : m.j) += dir;
            Neighbor nb{axis, dir, std::nullopt};
            if (grid.contains(m)) nb.node = grid.flat(m);
            out.items[out.count++] = nb;
        }
    }
    return out;
}

namespace detail {

inline void append_double(std::string& out, double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    assert(ec == std::errc{});
    out.append(buf.data(), ptr);
}

inline double parse_double(std::string_view token) {
    while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r')) token.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw std::runtime_error("malformed number '" + std::string(token) + "'");
    }
    return v;
}

}  // namespace detail

/// One CSV row per grid row (constant y), shortest round-trip formatting.
inline void write_csv(std::ostream& os, const Field& field) {
    const GridSpec& g = field.grid();
    const std::size_t cols = g.points_per_axis();
    const std::size_t rows = g.dim() == 1 ? 1 : cols;
    std::string line;
    for (std::size_t r = 0; r < rows; ++r) {
        line.clear();
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) line.push_back(',');
            detail::append_double(line, field[r * cols + c]);
        }
        line.push_back('\n');
        os << line;
    }
}

inline Field read_csv(std::istream& is, const GridSpec& grid) {
    std::vector<double> values;
    values.reserve(grid.size());
    std::string line;
    const std::size_t cols = grid.points_per_axis();
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        std::size_t start = 0;
        std::size_t count = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const auto token = std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            values.push_back(detail::parse_double(token));
            ++count;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (count != cols) {
            throw std::runtime_error("csv row " + std::to_string(row) + " has " + std::to_string(count) +
                                     " columns, expected " + std::to_string(cols));
        }
        ++row;
    }
    if (values.size() != grid.size()) {
        throw std::runtime_error("csv holds " + std::to_string(values.size()) + " values, grid has " +
                                 std::to_string(grid.size()));
    }
    return Field(grid, std::move(values));
}

}  // namespace hjb
