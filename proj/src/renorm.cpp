#include "cdp/renorm.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cdp/bounds.hpp"
#include "cdp/parallel.hpp"
#include "cdp/union_find.hpp"

namespace cdp {
namespace {

void require_2d(const Box& w, const char* what) {
    if (w.dim() != 2) throw DimensionMismatch(std::string(what) + ": the dual lattice is only defined for d = 2");
}

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

}  // namespace

bool dual_edge_open(const Configuration& config, const DualEdge& e) {
    require_2d(config.window, "dual_edge_open");
    const Edge p = primal_of(e);
    if (!config.window.has_edge(p)) throw MarginViolation("dual_edge_open: crossed primal edge outside the window");
    return config.open[config.window.edge_slot(p)] != 0;
}

Box annulus_primal_box(const DualVertex& x, std::int32_t N) {
    return Box(Point{x.a - 2 * N, x.b - 2 * N}, Point{x.a + 2 * N + 1, x.b + 2 * N + 1});
}

bool annulus_dual_crossing(const Configuration& config, const DualVertex& x, std::int32_t N) {
    require_2d(config.window, "annulus_dual_crossing");
    if (N < 1) throw std::invalid_argument("annulus_dual_crossing: N must be positive");
    if (!config.window.contains(annulus_primal_box(x, N)))
        throw MarginViolation("annulus_dual_crossing: window does not cover B*_{2N}(x)");

    const Box& w = config.window;
    const std::int32_t side = 4 * N + 1;
    const std::int32_t a0 = x.a - 2 * N, b0 = x.b - 2 * N;
    auto local = [&](std::int32_t i, std::int32_t j) { return static_cast<std::size_t>(i) * side + j; };
    // Dual (a,b)-(a+1,b) crosses primal (a+1,b) axis 1; dual (a,b)-(a,b+1)
    // crosses primal (a,b+1) axis 0.
    auto closed_right = [&](std::int32_t i, std::int32_t j) {
        return config.open[w.index(Point{a0 + i + 1, b0 + j}) * 2 + 1] == 0;
    };
    auto closed_up = [&](std::int32_t i, std::int32_t j) {
        return config.open[w.index(Point{a0 + i, b0 + j + 1}) * 2 + 0] == 0;
    };

    std::vector<std::uint8_t> seen(static_cast<std::size_t>(side) * side, 0);
    std::vector<std::pair<std::int32_t, std::int32_t>> queue;
    for (std::int32_t i = N; i <= 3 * N; ++i)
        for (std::int32_t j = N; j <= 3 * N; ++j) {
            seen[local(i, j)] = 1;
            queue.emplace_back(i, j);
        }
    auto is_target = [&](std::int32_t i, std::int32_t j) { return i == 0 || j == 0 || i == side - 1 || j == side - 1; };
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto [i, j] = queue[head];
        if (is_target(i, j)) return true;
        auto visit = [&](std::int32_t ni, std::int32_t nj) {
            auto& s = seen[local(ni, nj)];
            if (!s) {
                s = 1;
                queue.emplace_back(ni, nj);
            }
        };
        if (i + 1 < side && closed_right(i, j)) visit(i + 1, j);
        if (i > 0 && closed_right(i - 1, j)) visit(i - 1, j);
        if (j + 1 < side && closed_up(i, j)) visit(i, j + 1);
        if (j > 0 && closed_up(i, j - 1)) visit(i, j - 1);
    }
    return false;
}

std::vector<PstarEstimate> estimate_pstar(std::uint64_t seed, const ConstraintLaw& law, std::span<const double> ts,
                                          std::int32_t N, std::int32_t pad, std::uint64_t n, unsigned workers) {
    if (law.dim() != 2) throw DimensionMismatch("estimate_pstar: the dual lattice is only defined for d = 2");
    if (pad < 2) throw std::invalid_argument("estimate_pstar: pad must be at least 2");
    if (N < 1) throw std::invalid_argument("estimate_pstar: N must be positive");
    if (n == 0) throw std::invalid_argument("estimate_pstar: need at least one replicate");
    if (ts.empty()) throw std::invalid_argument("estimate_pstar: empty t grid");
    for (double t : ts)
        if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("estimate_pstar: t must lie in [0, 1]");
    const double horizon = *std::max_element(ts.begin(), ts.end());
    const DualVertex origin{0, 0};

    auto run = [&](std::int32_t p, std::uint64_t count) {
        const Box window = Box::cube(Point{0, 0}, 2 * N + 1 + p);
        return map_replicates<std::vector<std::uint8_t>>(count, workers, [&](std::size_t i) {
            const EnvironmentField env = sample_environment(SeedSpec{seed, static_cast<std::uint32_t>(i)}, window, law);
            const Trajectory traj = evolve(env, horizon);
            std::vector<std::uint8_t> hit(ts.size());
            for (std::size_t k = 0; k < ts.size(); ++k)
                hit[k] = annulus_dual_crossing(config_at(traj, ts[k]), origin, N) ? 1 : 0;
            return hit;
        });
    };
    auto tally = [&](const std::vector<std::vector<std::uint8_t>>& hits, std::size_t k, std::uint64_t count) {
        std::uint64_t s = 0;
        for (std::uint64_t i = 0; i < count; ++i) s += hits[i][k];
        return make_estimate(s, count);
    };

    const auto hits = run(pad, n);
    const std::uint64_t check_n = std::max<std::uint64_t>(1, n / 10);
    const auto doubled = run(2 * pad, check_n);

    std::vector<PstarEstimate> out;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        PstarEstimate e;
        e.t = ts[k];
        e.N = N;
        e.pad = pad;
        e.estimate = tally(hits, k, n);
        e.check_n = check_n;
        e.check_base = tally(hits, k, check_n);
        e.check_doubled = tally(doubled, k, check_n);
        e.shift = e.check_doubled.p_hat - e.check_base.p_hat;
        e.combined_se = std::hypot(e.check_base.se, e.check_doubled.se);
        out.push_back(e);
    }
    return out;
}

PstarEstimate estimate_pstar(std::uint64_t seed, const ConstraintLaw& law, double t, std::int32_t N, std::int32_t pad,
                             std::uint64_t n, unsigned workers) {
    const double ts[] = {t};
    return estimate_pstar(seed, law, ts, N, pad, n, workers).front();
}

double crossing_time(const EnvironmentField& env) {
    const Box& w = env.window;
    require_2d(w, "crossing_time");
    const Trajectory traj = evolve(env);
    std::vector<std::pair<std::uint64_t, std::uint32_t>> order;
    for (std::size_t s = 0; s < traj.opened.size(); ++s)
        if (traj.opened[s]) order.emplace_back(std::bit_cast<std::uint64_t>(traj.clock[s]), static_cast<std::uint32_t>(s));
    std::sort(order.begin(), order.end());

    const std::size_t nv = w.num_vertices();
    const auto left = static_cast<std::uint32_t>(nv), right = static_cast<std::uint32_t>(nv + 1);
    DisjointSets ds(nv + 2);
    for (std::int32_t j = w.lo()[1]; j <= w.hi()[1]; ++j) {
        ds.unite(left, static_cast<std::uint32_t>(w.index(Point{w.lo()[0], j})));
        ds.unite(right, static_cast<std::uint32_t>(w.index(Point{w.hi()[0], j})));
    }
    if (ds.same(left, right)) return 0.0;
    for (const auto& [bits, slot] : order) {
        const std::uint32_t u = slot / 2;
        const auto v = static_cast<std::uint32_t>(u + w.stride(static_cast<int>(slot % 2)));
        ds.unite(u, v);
        if (ds.same(left, right)) return std::bit_cast<double>(bits);
    }
    return std::numeric_limits<double>::infinity();
}

std::vector<double> crossing_times(std::uint64_t seed, const ConstraintLaw& law, std::int32_t L, std::uint64_t n,
                                   unsigned workers) {
    if (law.dim() != 2) throw DimensionMismatch("crossing_times: only d = 2 is supported");
    if (L < 4) throw std::invalid_argument("crossing_times: L must be at least 4");
    const Box box(Point{0, 0}, Point{L - 1, L - 1});
    return map_replicates<double>(n, workers, [&](std::size_t i) {
        return crossing_time(sample_environment(SeedSpec{seed, static_cast<std::uint32_t>(i)}, box, law));
    });
}

Estimate crossing_estimate(std::span<const double> times, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("crossing_estimate: t must lie in [0, 1]");
    std::uint64_t s = 0;
    for (double c : times) s += c <= t;
    return make_estimate(s, times.size());
}

Estimate crossing_probability(std::uint64_t seed, const ConstraintLaw& law, double t, std::int32_t L,
                              std::uint64_t n, unsigned workers) {
    return crossing_estimate(crossing_times(seed, law, L, n, workers), t);
}

std::string_view to_string(PeierlsOutcome o) {
    switch (o) {
        case PeierlsOutcome::FiniteWithCircuit: return "finite_with_circuit";
        case PeierlsOutcome::TouchesBoundary: return "touches_boundary";
        case PeierlsOutcome::OpenUnboundedInWindow: return "open_unbounded_in_window";
        case PeierlsOutcome::CircuitCheckFailed: return "circuit_check_failed";
    }
    return "?";
}

PeierlsResult peierls_certificate(const Configuration& config, std::int32_t L, bool classify_spanning) {
    const Box& w = config.window;
    require_2d(w, "peierls_certificate");
    if (L < 0) throw std::invalid_argument("peierls_certificate: L must be non-negative");
    if (!w.contains(Point{0, 0}) || !w.contains(Point{L, 0}) || w.margin(Point{0, 0}) < 1 || w.margin(Point{L, 0}) < 1)
        throw MarginViolation("peierls_certificate: the segment must lie strictly inside the window");

    const std::size_t nv = w.num_vertices();
    DisjointSets ds(nv);
    for (std::size_t s = 0; s < config.open.size(); ++s)
        if (config.open[s]) ds.unite(static_cast<std::uint32_t>(s / 2), static_cast<std::uint32_t>(s / 2 + w.stride(static_cast<int>(s % 2))));
    const std::uint32_t root = ds.find(static_cast<std::uint32_t>(w.index(Point{0, 0})));
    for (std::int32_t a = 1; a <= L; ++a) ds.unite(root, static_cast<std::uint32_t>(w.index(Point{a, 0})));
    const std::uint32_t cluster = ds.find(root);

    PeierlsResult res;
    std::vector<std::uint8_t> in(nv, 0);
    bool side[4] = {false, false, false, false};  // x-lo, x-hi, y-lo, y-hi
    for (std::size_t v = 0; v < nv; ++v) {
        if (ds.find(static_cast<std::uint32_t>(v)) != cluster) continue;
        in[v] = 1;
        ++res.cluster_size;
        const Point p = w.point(v);
        side[0] |= p[0] == w.lo()[0];
        side[1] |= p[0] == w.hi()[0];
        side[2] |= p[1] == w.lo()[1];
        side[3] |= p[1] == w.hi()[1];
    }
    res.spans_window = (side[0] && side[1]) || (side[2] && side[3]);
    if (side[0] || side[1] || side[2] || side[3]) {
        res.outcome = classify_spanning && res.spans_window ? PeierlsOutcome::OpenUnboundedInWindow
                                                            : PeierlsOutcome::TouchesBoundary;
        return res;
    }

    // Exterior: vertices outside O_L reachable from the frame through vertices
    // outside O_L. Everything else is O_L with its holes filled.
    std::vector<std::uint8_t> outside(nv, 0);
    std::vector<std::size_t> queue;
    for (std::size_t v = 0; v < nv; ++v)
        if (!in[v] && w.on_frame(w.point(v))) {
            outside[v] = 1;
            queue.push_back(v);
        }
    for (std::size_t head = 0; head < queue.size(); ++head)
        w.for_each_incident(queue[head], [&](std::size_t, std::size_t nb) {
            if (!in[nb] && !outside[nb]) {
                outside[nb] = 1;
                queue.push_back(nb);
            }
        });

    // Dual edges crossing the primal edges between the filled set and the
    // exterior; every one must be closed.
    std::vector<DualEdge> circuit;
    for (std::size_t s = 0; s < config.open.size(); ++s) {
        if (!w.slot_is_edge(s)) continue;
        const std::size_t u = s / 2, v = u + w.stride(static_cast<int>(s % 2));
        if (outside[u] == outside[v]) continue;
        if (config.open[s]) return res;  // an open edge leaving O_L: impossible for a genuine cluster
        circuit.push_back(dual_of(w.edge(s)));
    }
    if (circuit.empty()) return res;

    // Each dual vertex must have degree 2 and the edges must form one cycle.
    std::vector<DualVertex> ends;
    ends.reserve(2 * circuit.size());
    for (const auto& e : circuit) {
        ends.push_back(e.base);
        ends.push_back(e.head());
    }
    std::sort(ends.begin(), ends.end());
    for (std::size_t i = 0; i < ends.size(); i += 2)
        if (!(ends[i] == ends[i + 1]) || (i + 2 < ends.size() && ends[i + 2] == ends[i])) return res;
    std::vector<DualVertex> verts;
    for (std::size_t i = 0; i < ends.size(); i += 2) verts.push_back(ends[i]);
    auto vid = [&](const DualVertex& x) {
        return static_cast<std::uint32_t>(std::lower_bound(verts.begin(), verts.end(), x) - verts.begin());
    };
    DisjointSets cyc(verts.size());
    for (const auto& e : circuit) cyc.unite(vid(e.base), vid(e.head()));
    if (cyc.size_of(0) != verts.size()) return res;

    // Ray from (0,0) along +x crosses the dual edges of primal edges {(a,0),(a+1,0)}, a >= 0.
    std::size_t crossings = 0;
    for (const auto& e : circuit) {
        const Edge p = primal_of(e);
        crossings += p.axis == 0 && p.base[1] == 0 && p.base[0] >= 0;
    }
    if (crossings % 2 == 0) return res;
    res.outcome = PeierlsOutcome::FiniteWithCircuit;
    res.circuit_length = circuit.size();
    return res;
}

std::uint64_t next_scale(std::uint64_t L) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(L)));
    while (r * r > L) --r;
    while ((r + 1) * (r + 1) <= L) ++r;
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(r, L, &out)) throw std::overflow_error("next_scale: L_{k+1} overflows 64 bits");
    return out;
}

ScaleRow evaluate_conditions(std::uint64_t L, double psi, double c3, double c6, double c7) {
    ScaleRow row;
    row.L = L;
    const double x = static_cast<double>(L);
    const double lx = std::log(x);
    row.log_c1_lhs = lx - psi * x + 8.0 * lx;
    row.log_c2_lhs = std::log(32.0 * (20.0 * c3 + 1.0)) - lx;
    row.log_c3_lhs = std::log(c7) + 2.0 * lx + x * std::log(c6) + 4.0 * lx;
    row.c1 = row.log_c1_lhs <= 0.0;
    row.c2 = row.log_c2_lhs <= 0.0;
    row.c3 = row.log_c3_lhs <= 0.0;
    return row;
}

ScalePlan scale_plan(std::uint64_t L0, std::size_t count, std::optional<double> c5, int d) {
    if (L0 < 25) throw std::invalid_argument("scale_plan: L0 must be at least 25");
    if (count < 1) throw std::invalid_argument("scale_plan: count must be at least 1");
    const ConstantsTable table = constants(d, c5);
    ScalePlan plan;
    plan.L0 = L0;
    plan.psi = table.psi;
    plan.c3 = table.c3;
    plan.c6 = table.c6;
    plan.c7 = table.c7;
    std::uint64_t L = L0;
    for (std::size_t k = 0; k < count; ++k) {
        plan.scales.push_back(L);
        plan.rows.push_back(evaluate_conditions(L, plan.psi, plan.c3, plan.c6, plan.c7));
        if (k + 1 < count) L = next_scale(L);
    }

    // C-1 and C-3 fail at 25 and become true once the linear decay wins; the
    // log-left sides are eventually decreasing, so the first hit is the
    // threshold. C-2 has a closed form.
    auto first_hit = [&](auto&& cond) {
        for (std::uint64_t x = 25;; ++x) {
            if (cond(evaluate_conditions(x, plan.psi, plan.c3, plan.c6, plan.c7))) return x;
            if (x > (1ull << 40)) throw std::runtime_error("scale_plan: condition never met");
        }
    };
    plan.min_L_c1 = first_hit([](const ScaleRow& r) { return r.c1; });
    plan.min_L_c3 = first_hit([](const ScaleRow& r) { return r.c3; });
    plan.min_L_c2 = std::max<std::uint64_t>(25, static_cast<std::uint64_t>(std::ceil(32.0 * (20.0 * plan.c3 + 1.0))));
    while (plan.min_L_c2 > 25 && evaluate_conditions(plan.min_L_c2 - 1, plan.psi, plan.c3, plan.c6, plan.c7).c2)
        --plan.min_L_c2;
    while (!evaluate_conditions(plan.min_L_c2, plan.psi, plan.c3, plan.c6, plan.c7).c2) ++plan.min_L_c2;
    return plan;
}

InductionStep induction_rhs(std::uint64_t L_k, double pstar_k_bound, double c3, double psi) {
    if (L_k < 25) throw std::invalid_argument("induction_rhs: L_k must be at least 25");
    if (!(pstar_k_bound >= 0.0) || !(c3 >= 0.0)) throw std::invalid_argument("induction_rhs: negative input");
    InductionStep st;
    st.L_k = L_k;
    st.L_next = next_scale(L_k);
    st.delta = static_cast<std::int64_t>(st.L_next) - 4 * static_cast<std::int64_t>(L_k);
    const double lk = static_cast<double>(L_k), ln = static_cast<double>(st.L_next);
    const double ninf = -std::numeric_limits<double>::infinity();
    const double log_p2 = pstar_k_bound > 0.0 ? 2.0 * std::log(pstar_k_bound) : ninf;
    const double log_dec = c3 > 0.0 ? std::log(2.0 * c3 * 10.0 * lk) - psi * static_cast<double>(st.delta) : ninf;
    const double inner = log_add(log_p2, log_dec);
    st.log_rhs = inner == ninf ? ninf : std::log(32.0) + 2.0 * std::log(ln / lk) + inner;
    st.rhs = std::exp(st.log_rhs);
    st.log_target = -4.0 * std::log(ln);
    st.target_met = st.log_rhs <= st.log_target;
    return st;
}

}  // namespace cdp
