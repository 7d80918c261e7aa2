#include "cdp/influence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "cdp/bounds.hpp"
#include "cdp/parallel.hpp"

namespace cdp {

ClockSource ClockSource::from_field(const Box& window, std::span<const double> clocks) {
    if (clocks.size() != window.num_edge_slots()) throw std::invalid_argument("ClockSource: clock array size mismatch");
    ClockSource s;
    s.window_ = window;
    s.clocks_ = clocks;
    return s;
}

ClockSource ClockSource::lazy(const Box& window, const SeedSpec& seed, Stream stream) {
    ClockSource s;
    s.window_ = window;
    s.seed_ = seed;
    s.stream_ = stream;
    s.lazy_ = true;
    return s;
}

double ClockSource::operator()(std::size_t slot) const {
    if (!lazy_) return clocks_[slot];
    if (!window_.slot_is_edge(slot)) return std::numeric_limits<double>::infinity();
    return edge_clock(seed_, window_.edge(slot), stream_);
}

ClusterWorkspace::ClusterWorkspace(const Box& window) : window_(window), stamp_(window.num_vertices(), 0) {}

void ClusterWorkspace::reset() {
    if (++epoch_ == 0) {  // wrapped: clear for real
        std::fill(stamp_.begin(), stamp_.end(), 0);
        epoch_ = 1;
    }
}

std::vector<std::size_t> interval_cluster(const ClockSource& clocks, std::span<const std::size_t> seeds, double a,
                                          double b, ClusterWorkspace& ws, std::span<const std::uint8_t> restriction) {
    if (!(0.0 <= a && a <= b && b <= 1.0)) throw std::invalid_argument("interval_cluster: need 0 <= a <= b <= 1");
    const Box& w = clocks.window();
    if (!(ws.window() == w)) throw std::invalid_argument("interval_cluster: workspace belongs to another window");
    if (!restriction.empty() && restriction.size() != w.num_vertices())
        throw std::invalid_argument("interval_cluster: restriction mask size mismatch");
    ws.reset();
    std::vector<std::size_t> out;
    out.reserve(seeds.size() * 2);
    for (std::size_t s : seeds) {
        if (s >= w.num_vertices()) throw MarginViolation("interval_cluster: seed outside the window");
        if (!ws.marked(s)) {
            ws.mark(s);
            out.push_back(s);
        }
    }
    if (a == b) return out;
    for (std::size_t head = 0; head < out.size(); ++head) {
        const std::size_t v = out[head];
        if (!restriction.empty() && !restriction[v]) continue;
        w.for_each_incident(v, [&](std::size_t slot, std::size_t nb) {
            if (ws.marked(nb)) return;
            if (!restriction.empty() && !restriction[nb]) return;
            const double u = clocks(slot);
            if (a < u && u <= b) {
                ws.mark(nb);
                out.push_back(nb);
            }
        });
    }
    return out;
}

std::vector<std::size_t> interval_cluster(const ClockSource& clocks, std::span<const std::size_t> seeds, double a,
                                          double b, std::span<const std::uint8_t> restriction) {
    ClusterWorkspace ws(clocks.window());
    return interval_cluster(clocks, seeds, a, b, ws, restriction);
}

namespace {

std::vector<std::size_t> indices_of(const Box& w, std::span<const Point> pts) {
    std::vector<std::size_t> idx;
    idx.reserve(pts.size());
    for (const auto& p : pts) {
        if (!w.contains(p)) throw MarginViolation("point outside the window");
        idx.push_back(w.index(p));
    }
    return idx;
}

std::int64_t distance_to_set(const Point& x, std::span<const Point> base) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& b : base) best = std::min(best, l1_distance(x, b));
    return best;
}

}  // namespace

VertexSet interval_cluster(const ClockSource& clocks, std::span<const Point> seeds, double a, double b) {
    const auto idx = indices_of(clocks.window(), seeds);
    const auto found = interval_cluster(clocks, idx, a, b);
    VertexSet out;
    out.reserve(found.size());
    for (auto i : found) out.push_back(clocks.window().point(i));
    std::sort(out.begin(), out.end());
    return out;
}

int influence_layer_count(double t, int d) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("influence: t must lie in [0, 1]");
    if (t == 0.0) return 0;
    return std::max(1, static_cast<int>(std::ceil(2.0 * d * t)));
}

VertexSet InfluenceSet::points(const Box& window) const {
    VertexSet out;
    out.reserve(members.size());
    for (auto i : members) out.push_back(window.point(i));
    std::sort(out.begin(), out.end());
    return out;
}

InfluenceSet influence_set(const ClockSource& clocks, std::span<const Point> base, double t, ClusterWorkspace& ws) {
    if (base.empty()) throw std::invalid_argument("influence_set: empty base set");
    const Box& w = clocks.window();
    const int d = w.dim();
    InfluenceSet out;
    out.base.assign(base.begin(), base.end());
    out.t = t;
    out.m = influence_layer_count(t, d);
    std::vector<std::size_t> current = indices_of(w, base);
    const double width = 1.0 / (2.0 * d);
    for (int j = out.m; j >= 1; --j) {
        const double lo = static_cast<double>(j - 1) * width;
        const double hi = j == out.m ? t : static_cast<double>(j) * width;
        current = interval_cluster(clocks, current, lo, hi, ws);
        out.layers.push_back(current);
    }
    out.members = current;
    for (auto i : out.members) {
        const Point x = w.point(i);
        out.radius = std::max(out.radius, distance_to_set(x, base));
        if (w.on_frame(x)) out.touches_frame = true;
    }
    return out;
}

InfluenceSet influence_set(const ClockSource& clocks, std::span<const Point> base, double t) {
    ClusterWorkspace ws(clocks.window());
    return influence_set(clocks, base, t, ws);
}

bool xi_holds(const ClockSource& clocks, std::span<const Point> base, double t, std::int64_t r) {
    if (r < 0) throw std::invalid_argument("xi_holds: r must be non-negative");
    for (const auto& p : base)
        if (!clocks.window().contains(p) || clocks.window().margin(p) < r + 1)
            throw MarginViolation("xi_holds: B_{r+1}(Lambda) must lie inside the window");
    return influence_set(clocks, base, t).radius <= r;
}

LocalityResult locality_check(const SeedSpec& seed, const ConstraintLaw& law, std::span<const Point> base, double t,
                              std::int64_t r, const Box& window) {
    if (base.empty()) throw std::invalid_argument("locality_check: empty base set");
    for (const auto& p : base)
        if (!window.contains(p) || window.margin(p) < std::max<std::int64_t>(3 * r, r + 1))
            throw MarginViolation("locality_check: window margin around Lambda must be at least 3r");

    LocalityResult res;
    const EnvironmentField env = sample_environment(seed, window, law);
    if (!xi_holds(ClockSource::from_field(window, env.clock), base, t, r)) return res;

    std::vector<std::uint8_t> keep_vertex(window.num_vertices(), 0);
    for (std::size_t v = 0; v < keep_vertex.size(); ++v)
        keep_vertex[v] = distance_to_set(window.point(v), base) <= r + 1 ? 1 : 0;
    std::vector<std::uint8_t> keep_edge(window.num_edge_slots(), 0);
    const auto d = static_cast<std::size_t>(window.dim());
    for (std::size_t v = 0; v < keep_vertex.size(); ++v) {
        if (!keep_vertex[v]) {
            ++res.resampled_vertices;
            continue;
        }
        for (std::size_t a = 0; a < d; ++a) {
            const std::size_t slot = v * d + a;
            if (window.slot_is_edge(slot) && keep_vertex[v + window.stride(static_cast<int>(a))]) keep_edge[slot] = 1;
        }
    }
    const EnvironmentField fresh = resample_outside(env, seed, law, keep_vertex, keep_edge);

    const Configuration before = config_at(evolve(env), t);
    const Configuration after = config_at(evolve(fresh), t);
    for (std::size_t s = 0; s < before.open.size(); ++s) res.changed_edges_outside += before.open[s] != after.open[s];

    res.verdict = LocalityVerdict::Pass;
    for (const Edge& e : edge_set(base)) {
        const std::size_t slot = window.edge_slot(e);
        if (before.open[slot] != after.open[slot]) {
            res.verdict = LocalityVerdict::Fail;
            break;
        }
    }
    return res;
}

RadiusTail radius_tail(std::uint64_t seed, const Point& v, std::int64_t r_max, std::uint64_t n, unsigned workers) {
    if (r_max < 1) throw std::invalid_argument("radius_tail: r_max must be positive");
    if (n == 0) throw std::invalid_argument("radius_tail: need at least one sample");
    const Box window = Box::cube(v, static_cast<std::int32_t>(2 * r_max));
    const Point base[] = {v};

    struct Sample {
        std::int64_t radius = 0;
        std::uint32_t size = 0;
        std::uint8_t truncated = 0;
    };
    const auto samples = map_replicates<Sample>(n, workers, [&](std::size_t i) {
        thread_local std::optional<ClusterWorkspace> ws;
        if (!ws || !(ws->window() == window)) ws.emplace(window);
        const auto clocks = ClockSource::lazy(window, SeedSpec{seed, static_cast<std::uint32_t>(i)});
        const InfluenceSet inf = influence_set(clocks, base, 1.0, *ws);
        return Sample{inf.radius, static_cast<std::uint32_t>(inf.members.size()), inf.touches_frame ? std::uint8_t{1} : std::uint8_t{0}};
    });

    RadiusTail out;
    out.n = n;
    out.r_max = r_max;
    out.exceed.assign(static_cast<std::size_t>(r_max) + 1, 0);
    double sum = 0, sum_sq = 0;
    for (const auto& s : samples) {
        for (std::int64_t r = 0; r <= r_max && r < s.radius; ++r) ++out.exceed[static_cast<std::size_t>(r)];
        sum += s.size;
        sum_sq += static_cast<double>(s.size) * s.size;
        out.truncated += s.truncated;
    }
    const double nd = static_cast<double>(n);
    out.mean_size = sum / nd;
    out.mean_size_se = n > 1 ? std::sqrt(std::max(0.0, (sum_sq - nd * out.mean_size * out.mean_size) / (nd - 1.0)) / nd) : 0.0;

    const double psi = psi_of(v.dim);
    const double c2 = c2_of(v.dim);
    for (std::int64_t r = 0; r <= r_max; ++r) {
        out.survival.push_back(static_cast<double>(out.exceed[static_cast<std::size_t>(r)]) / nd);
        out.bound.push_back(c2 * std::exp(-4.0 * psi * static_cast<double>(r)));
    }

    constexpr std::uint64_t kMinSurvivors = 50;
    for (std::int64_t r = 0; r <= r_max; ++r)
        if (out.exceed[static_cast<std::size_t>(r)] >= kMinSurvivors) out.fit_r_last = r;
    if (out.fit_r_last >= 1) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double k = static_cast<double>(out.fit_r_last + 1);
        for (std::int64_t r = 0; r <= out.fit_r_last; ++r) {
            const double x = static_cast<double>(r);
            const double y = std::log(out.survival[static_cast<std::size_t>(r)]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        out.fit_slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        out.fit_intercept = (sy - out.fit_slope * sx) / k;
    }
    return out;
}

DecouplingReport decoupling_estimate(std::uint64_t seed, std::span<const Point> lambda1, std::span<const Point> lambda2,
                                     const LocalEvent& a1, const LocalEvent& a2, const ConstraintLaw& law, double t,
                                     std::uint64_t n, std::int32_t pad, unsigned workers) {
    if (lambda1.empty() || lambda2.empty()) throw std::invalid_argument("decoupling_estimate: empty region");
    for (const auto& p : lambda1)
        if (std::find(lambda2.begin(), lambda2.end(), p) != lambda2.end())
            throw std::invalid_argument("decoupling_estimate: regions overlap");
    auto lives_on = [](const LocalEvent& ev, std::span<const Point> region) {
        for (const Edge& e : ev.support) {
            const bool in_base = std::find(region.begin(), region.end(), e.base) != region.end();
            const bool in_head = std::find(region.begin(), region.end(), e.head()) != region.end();
            if (!in_base || !in_head) return false;
        }
        return true;
    };
    if (!lives_on(a1, lambda1) || !lives_on(a2, lambda2))
        throw std::invalid_argument("decoupling_estimate: each event must live on the edges of its region");
    if (n < 2) throw std::invalid_argument("decoupling_estimate: need at least two replicates");
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("decoupling_estimate: t must lie in [0, 1]");

    VertexSet all(lambda1.begin(), lambda1.end());
    all.insert(all.end(), lambda2.begin(), lambda2.end());
    const Box window = Box::bounding(all, pad);

    const auto bits = map_replicates<std::uint8_t>(n, workers, [&](std::size_t i) -> std::uint8_t {
        const EnvironmentField env = sample_environment(SeedSpec{seed, static_cast<std::uint32_t>(i)}, window, law);
        const Configuration c = config_at(evolve(env, t), t);
        return static_cast<std::uint8_t>((a1.evaluate(c) ? 1 : 0) | (a2.evaluate(c) ? 2 : 0));
    });

    std::uint64_t c1 = 0, c2 = 0, c12 = 0;
    for (auto b : bits) {
        c1 += b & 1;
        c2 += (b >> 1) & 1;
        c12 += b == 3;
    }
    DecouplingReport rep;
    rep.lambda1.assign(lambda1.begin(), lambda1.end());
    rep.lambda2.assign(lambda2.begin(), lambda2.end());
    rep.event1 = a1.name;
    rep.event2 = a2.name;
    rep.n = n;
    const double nd = static_cast<double>(n);
    rep.p1 = static_cast<double>(c1) / nd;
    rep.p2 = static_cast<double>(c2) / nd;
    rep.p12 = static_cast<double>(c12) / nd;
    rep.cov_hat = rep.p12 - rep.p1 * rep.p2;
    // Standard error from the influence function of the plug-in covariance.
    double ss = 0;
    for (auto b : bits) {
        const double phi = ((b & 1) - rep.p1) * (((b >> 1) & 1) - rep.p2) - rep.cov_hat;
        ss += phi * phi;
    }
    rep.se = std::sqrt(ss / (nd - 1.0) / nd);
    rep.delta = set_distance(lambda1, lambda2);
    const int d = lambda1[0].dim;
    const double boundary = static_cast<double>(boundaries(lambda1).inner.size() + boundaries(lambda2).inner.size());
    rep.bound = c3_of(d) * boundary * std::exp(-psi_of(d) * static_cast<double>(rep.delta));
    return rep;
}

}  // namespace cdp
