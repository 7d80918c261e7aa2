#include "cdp/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <queue>
#include <unordered_set>

namespace cdp {

Point::Point(std::initializer_list<std::int32_t> coords) {
    if (coords.size() == 0 || coords.size() > static_cast<std::size_t>(kMaxDim))
        throw std::invalid_argument("Point: dimension must be in [1, 4]");
    dim = static_cast<int>(coords.size());
    std::copy(coords.begin(), coords.end(), c.begin());
}

Point Point::zero(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Point: dimension must be in [1, 4]");
    Point p;
    p.dim = dim;
    return p;
}

Edge Edge::between(const Point& u, const Point& v) {
    if (u.dim != v.dim) throw DimensionMismatch("Edge::between: dimension mismatch");
    if (l1_distance(u, v) != 1) throw std::invalid_argument("Edge::between: points are not adjacent");
    for (int a = 0; a < u.dim; ++a) {
        if (u[a] != v[a]) return u[a] < v[a] ? Edge{u, a} : Edge{v, a};
    }
    return {};  // unreachable
}

std::int64_t l1_distance(const Point& u, const Point& v) {
    if (u.dim != v.dim) throw DimensionMismatch("l1_distance: dimension mismatch");
    std::int64_t s = 0;
    for (int i = 0; i < u.dim; ++i) s += std::llabs(static_cast<std::int64_t>(u[i]) - v[i]);
    return s;
}

std::int64_t linf_distance(const Point& u, const Point& v) {
    if (u.dim != v.dim) throw DimensionMismatch("linf_distance: dimension mismatch");
    std::int64_t m = 0;
    for (int i = 0; i < u.dim; ++i) m = std::max<std::int64_t>(m, std::llabs(static_cast<std::int64_t>(u[i]) - v[i]));
    return m;
}

// ---------------------------------------------------------------------------

Box::Box(Point lo, Point hi) : lo_(lo), hi_(hi) {
    if (lo.dim != hi.dim) throw DimensionMismatch("Box: dimension mismatch");
    if (lo.dim < 1) throw std::invalid_argument("Box: empty dimension");
    std::size_t n = 1;
    for (int a = lo.dim - 1; a >= 0; --a) {
        if (hi[a] < lo[a]) throw std::invalid_argument("Box: hi < lo");
        stride_[static_cast<std::size_t>(a)] = n;
        n *= static_cast<std::size_t>(hi[a] - lo[a] + 1);
    }
    num_vertices_ = n;
}

Box Box::cube(const Point& center, std::int32_t radius) {
    Point lo = center, hi = center;
    for (int a = 0; a < center.dim; ++a) {
        lo[a] -= radius;
        hi[a] += radius;
    }
    return Box(lo, hi);
}

Box Box::bounding(std::span<const Point> pts, std::int32_t pad) {
    if (pts.empty()) throw std::invalid_argument("Box::bounding: empty point set");
    Point lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        if (p.dim != lo.dim) throw DimensionMismatch("Box::bounding: dimension mismatch");
        for (int a = 0; a < p.dim; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    for (int a = 0; a < lo.dim; ++a) {
        lo[a] -= pad;
        hi[a] += pad;
    }
    return Box(lo, hi);
}

bool Box::contains(const Point& p) const {
    if (p.dim != dim()) return false;
    for (int a = 0; a < dim(); ++a)
        if (p[a] < lo_[a] || p[a] > hi_[a]) return false;
    return true;
}

bool Box::contains(const Box& other) const { return contains(other.lo_) && contains(other.hi_); }

bool Box::on_frame(const Point& p) const {
    for (int a = 0; a < dim(); ++a)
        if (p[a] == lo_[a] || p[a] == hi_[a]) return true;
    return false;
}

std::size_t Box::index(const Point& p) const {
    std::size_t i = 0;
    for (int a = 0; a < dim(); ++a) i += static_cast<std::size_t>(p[a] - lo_[a]) * stride(a);
    return i;
}

Point Box::point(std::size_t index) const {
    Point p = Point::zero(dim());
    for (int a = 0; a < dim(); ++a) {
        const std::size_t s = stride(a);
        p[a] = lo_[a] + static_cast<std::int32_t>(index / s);
        index %= s;
    }
    return p;
}

Edge Box::edge(std::size_t slot) const {
    const auto d = static_cast<std::size_t>(dim());
    return Edge{point(slot / d), static_cast<int>(slot % d)};
}

bool Box::slot_is_edge(std::size_t slot) const {
    const auto d = static_cast<std::size_t>(dim());
    const std::size_t v = slot / d;
    const int axis = static_cast<int>(slot % d);
    // Coordinate along `axis` of vertex v, recovered from the strides.
    const auto coord = static_cast<std::int32_t>((v / stride(axis)) % static_cast<std::size_t>(extent(axis)));
    return lo_[axis] + coord < hi_[axis];
}

std::int32_t Box::margin(const Point& p) const {
    std::int32_t m = std::numeric_limits<std::int32_t>::max();
    for (int a = 0; a < dim(); ++a) m = std::min({m, p[a] - lo_[a], hi_[a] - p[a]});
    return m;
}

// ---------------------------------------------------------------------------

bool contains(const L1Ball& ball, const Point& p) {
    for (const auto& c : ball.centers)
        if (l1_distance(c, p) <= ball.radius) return true;
    return false;
}

bool contains(const LInfBox& box, const Point& p) { return linf_distance(box.center, p) <= box.radius; }

VertexSet members(const L1Ball& ball) {
    if (ball.centers.empty()) return {};
    const Box bb = Box::bounding(ball.centers, ball.radius);
    VertexSet out;
    for (std::size_t i = 0; i < bb.num_vertices(); ++i) {
        Point p = bb.point(i);
        if (contains(ball, p)) out.push_back(p);
    }
    return out;  // Box enumeration is already lexicographic.
}

VertexSet members(const LInfBox& box) {
    const Box bb = Box::cube(box.center, box.radius);
    VertexSet out;
    out.reserve(bb.num_vertices());
    for (std::size_t i = 0; i < bb.num_vertices(); ++i) out.push_back(bb.point(i));
    return out;
}

std::int64_t set_distance(std::span<const Point> a, std::span<const Point> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("set_distance: empty set");
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& x : a)
        for (const auto& y : b) best = std::min(best, l1_distance(x, y));
    return best;
}

Boundaries boundaries(std::span<const Point> gamma) {
    if (gamma.empty()) throw std::invalid_argument("boundaries: empty set");
    const int d = gamma[0].dim;
    std::unordered_set<Point> in(gamma.begin(), gamma.end());
    std::unordered_set<Point> inner, outer;
    std::vector<Edge> edges;
    for (const auto& u : in) {
        if (u.dim != d) throw DimensionMismatch("boundaries: dimension mismatch");
        for (int a = 0; a < d; ++a) {
            for (int s : {-1, 1}) {
                Point v = u.shifted(a, s);
                if (in.count(v)) continue;
                inner.insert(u);
                outer.insert(v);
                edges.push_back(Edge::between(u, v));
            }
        }
    }
    Boundaries b{{inner.begin(), inner.end()}, {outer.begin(), outer.end()}, std::move(edges)};
    std::sort(b.inner.begin(), b.inner.end());
    std::sort(b.outer.begin(), b.outer.end());
    std::sort(b.edges.begin(), b.edges.end());
    return b;
}

std::vector<Edge> edge_set(std::span<const Point> gamma) {
    std::unordered_set<Point> in(gamma.begin(), gamma.end());
    std::vector<Edge> out;
    for (const auto& u : in)
        for (int a = 0; a < u.dim; ++a)
            if (in.count(u.shifted(a, 1))) out.push_back(Edge{u, a});
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

DualEdge dual_of(const Edge& e) {
    if (e.base.dim != 2) throw DimensionMismatch("dual_of: the dual lattice is defined for d = 2 only");
    const auto a = e.base[0], b = e.base[1];
    if (e.axis == 0) return DualEdge{{a, b - 1}, 1};
    return DualEdge{{a - 1, b}, 0};
}

Edge primal_of(const DualEdge& e) {
    const auto a = e.base.a, b = e.base.b;
    if (e.axis == 1) return Edge{Point{a, b + 1}, 0};
    return Edge{Point{a + 1, b}, 1};
}

}  // namespace cdp
