#pragma once

// Geometry of the hypercubic lattice Z^d and of the d=2 dual lattice.
//
// Every simulation window is a finite axis-aligned box. Vertices inside a box
// are linearized row-major (last coordinate fastest), which coincides with
// lexicographic order of the points. Edge slots are `vertex_index * dim + axis`;
// a slot is a real edge only when base + unit(axis) is also inside the box.

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace cdp {

inline constexpr int kMaxDim = 4;

/// A vertex of Z^d, d <= kMaxDim. Unused coordinates are kept at zero so that
/// comparisons and hashing can look at the whole array.
struct Point {
    int dim = 0;
    std::array<std::int32_t, kMaxDim> c{};

    Point() = default;
    Point(std::initializer_list<std::int32_t> coords);
    static Point zero(int dim);

    std::int32_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    std::int32_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

    Point shifted(int axis, std::int32_t by) const {
        Point p = *this;
        p[axis] += by;
        return p;
    }

    friend bool operator==(const Point&, const Point&) = default;
    friend auto operator<=>(const Point&, const Point&) = default;
};

/// Undirected nearest-neighbour edge in canonical form: it joins `base` and
/// `base + unit(axis)`.
struct Edge {
    Point base;
    int axis = 0;

    Point head() const { return base.shifted(axis, 1); }

    /// Canonical edge joining two adjacent points, in either order.
    static Edge between(const Point& u, const Point& v);

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A window or a query region lies too close to the edge of the simulated box.
class MarginViolation : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

std::int64_t l1_distance(const Point& u, const Point& v);
std::int64_t linf_distance(const Point& u, const Point& v);

/// Finite box [lo_i, hi_i] in every axis (inclusive).
class Box {
public:
    Box() = default;
    Box(Point lo, Point hi);

    /// [center - radius, center + radius]^d.
    static Box cube(const Point& center, std::int32_t radius);
    /// Smallest box containing every point of `pts`, grown by `pad` on each side.
    static Box bounding(std::span<const Point> pts, std::int32_t pad = 0);

    int dim() const { return lo_.dim; }
    const Point& lo() const { return lo_; }
    const Point& hi() const { return hi_; }
    std::int32_t extent(int axis) const { return hi_[axis] - lo_[axis] + 1; }

    std::size_t num_vertices() const { return num_vertices_; }
    std::size_t num_edge_slots() const { return num_vertices_ * static_cast<std::size_t>(dim()); }

    bool contains(const Point& p) const;
    bool contains(const Box& other) const;
    /// True when p lies on the outer frame of the box.
    bool on_frame(const Point& p) const;

    std::size_t index(const Point& p) const;
    Point point(std::size_t index) const;
    std::size_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }

    std::size_t edge_slot(const Edge& e) const { return index(e.base) * dim() + e.axis; }
    Edge edge(std::size_t slot) const;
    bool has_edge(const Edge& e) const { return contains(e.base) && contains(e.head()); }
    bool slot_is_edge(std::size_t slot) const;

    /// Calls f(edge_slot, neighbour_index) for every edge incident to vertex
    /// `v` inside the box.
    template <class F>
    void for_each_incident(std::size_t v, F&& f) const {
        const Point p = point(v);
        for (int a = 0; a < dim(); ++a) {
            const std::size_t s = stride(a);
            if (p[a] < hi_[a]) f(v * dim() + a, v + s);
            if (p[a] > lo_[a]) f((v - s) * dim() + a, v - s);
        }
    }

    /// Minimum distance from p to the complement of the box along any axis.
    std::int32_t margin(const Point& p) const;

    friend bool operator==(const Box&, const Box&) = default;

private:
    Point lo_, hi_;
    std::array<std::size_t, kMaxDim> stride_{};
    std::size_t num_vertices_ = 0;
};

using VertexSet = std::vector<Point>;

/// Region descriptors. B_r(Lambda) is an L1 (graph-distance) ball around a set;
/// the dual-lattice boxes use the L-infinity metric.
struct L1Ball {
    VertexSet centers;
    std::int32_t radius = 0;
};
struct LInfBox {
    Point center;
    std::int32_t radius = 0;
};

bool contains(const L1Ball& ball, const Point& p);
bool contains(const LInfBox& box, const Point& p);
/// Sorted member list.
VertexSet members(const L1Ball& ball);
VertexSet members(const LInfBox& box);

/// delta(A, B) = min over pairs of graph distance.
std::int64_t set_distance(std::span<const Point> a, std::span<const Point> b);

struct Boundaries {
    VertexSet inner;        // vertices of Gamma with a neighbour outside
    VertexSet outer;        // vertices outside Gamma with a neighbour inside
    std::vector<Edge> edges;  // edges with exactly one endpoint in Gamma
};

/// Vertex, external-vertex and external-edge boundaries of a finite set.
Boundaries boundaries(std::span<const Point> gamma);

/// Edges with both endpoints in gamma, sorted.
std::vector<Edge> edge_set(std::span<const Point> gamma);

// ---------------------------------------------------------------------------
// d = 2 dual lattice. DualVertex (a, b) stands for the point (a + 1/2, b + 1/2).

struct DualVertex {
    std::int32_t a = 0, b = 0;
    friend bool operator==(const DualVertex&, const DualVertex&) = default;
    friend auto operator<=>(const DualVertex&, const DualVertex&) = default;
};

struct DualEdge {
    DualVertex base;
    int axis = 0;  // joins base and base + unit(axis)
    DualVertex head() const {
        return axis == 0 ? DualVertex{base.a + 1, base.b} : DualVertex{base.a, base.b + 1};
    }
    friend bool operator==(const DualEdge&, const DualEdge&) = default;
    friend auto operator<=>(const DualEdge&, const DualEdge&) = default;
};

/// Primal {(a,b),(a+1,b)} crosses dual {(a+1/2,b-1/2),(a+1/2,b+1/2)};
/// primal {(a,b),(a,b+1)} crosses dual {(a-1/2,b+1/2),(a+1/2,b+1/2)}.
DualEdge dual_of(const Edge& e);
Edge primal_of(const DualEdge& e);

}  // namespace cdp

template <>
struct std::hash<cdp::Point> {
    std::size_t operator()(const cdp::Point& p) const noexcept {
        std::size_t h = static_cast<std::size_t>(p.dim);
        for (auto v : p.c) h = h * 0x9E3779B97F4A7C15ull + static_cast<std::uint32_t>(v);
        return h;
    }
};
