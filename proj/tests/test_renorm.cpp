#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <queue>

#include "cdp/bounds.hpp"
#include "cdp/renorm.hpp"

using namespace cdp;

namespace {

Configuration uniform_config(const Box& w, bool open) {
    Configuration c;
    c.window = w;
    c.t = 1.0;
    c.open.assign(w.num_edge_slots(), 0);
    if (open)
        for (std::size_t s = 0; s < c.open.size(); ++s) c.open[s] = w.slot_is_edge(s);
    return c;
}

void set_dual(Configuration& c, const DualEdge& d, bool open) { c.open[c.window.edge_slot(primal_of(d))] = open; }

// Brute-force left-right crossing at time t.
bool crosses(const Configuration& c) {
    const Box& w = c.window;
    std::vector<std::uint8_t> seen(w.num_vertices(), 0);
    std::queue<std::size_t> q;
    for (std::int32_t j = w.lo()[1]; j <= w.hi()[1]; ++j) {
        const auto v = w.index(Point{w.lo()[0], j});
        seen[v] = 1;
        q.push(v);
    }
    while (!q.empty()) {
        const auto v = q.front();
        q.pop();
        if (w.point(v)[0] == w.hi()[0]) return true;
        w.for_each_incident(v, [&](std::size_t slot, std::size_t nb) {
            if (c.open[slot] && !seen[nb]) {
                seen[nb] = 1;
                q.push(nb);
            }
        });
    }
    return false;
}

}  // namespace

TEST_SUITE("renorm") {

TEST_CASE("annulus events on fixed configurations") {
    const Box w = Box::cube(Point{0, 0}, 20);
    for (int N = 1; N <= 4; ++N) {
        CHECK_FALSE(annulus_dual_crossing(uniform_config(w, true), DualVertex{0, 0}, N));
        CHECK(annulus_dual_crossing(uniform_config(w, false), DualVertex{0, 0}, N));
    }
    const int N = 3;
    auto c = uniform_config(w, true);
    for (int a = 0; a < 2 * N - 1; ++a) set_dual(c, DualEdge{{a, 0}, 0}, false);
    CHECK_FALSE(annulus_dual_crossing(c, DualVertex{0, 0}, N));  // stops one short of the boundary
    set_dual(c, DualEdge{{2 * N - 1, 0}, 0}, false);
    CHECK(annulus_dual_crossing(c, DualVertex{0, 0}, N));
    CHECK_THROWS_AS(annulus_dual_crossing(uniform_config(Box::cube(Point{0, 0}, 4), true), DualVertex{0, 0}, 3),
                    MarginViolation);
}

TEST_CASE("flipping a primal edge flips exactly its dual") {
    const Box w = Box::cube(Point{0, 0}, 4);
    auto c = uniform_config(w, true);
    const Edge e{Point{1, -2}, 1};
    const DualEdge d = dual_of(e);
    CHECK(dual_edge_open(c, d));
    c.open[w.edge_slot(e)] = 0;
    CHECK_FALSE(dual_edge_open(c, d));
    std::size_t closed = 0;
    for (std::size_t s = 0; s < w.num_edge_slots(); ++s)
        if (w.slot_is_edge(s)) closed += !dual_edge_open(c, dual_of(w.edge(s)));
    CHECK(closed == 1);
}

TEST_CASE("P* estimates") {
    const ConstraintLaw law({0, 0, 0, 1}, 2);
    CHECK(estimate_pstar(1, law, 0.0, 3, 4, 50).estimate.p_hat == 1.0);
    CHECK_THROWS_AS(estimate_pstar(1, law, 0.5, 3, 1, 50), std::invalid_argument);

    // With every constraint at 4 the dynamics is Bernoulli on the same clocks.
    const ConstraintLaw free = ConstraintLaw::unconstrained(2);
    const int N = 3, pad = 4;
    const auto est = estimate_pstar(9, free, 0.45, N, pad, 300);
    const Box w = Box::cube(Point{0, 0}, 2 * N + 1 + pad);
    std::uint64_t hits = 0;
    for (std::uint32_t i = 0; i < 300; ++i) {
        const auto clocks = sample_clocks(SeedSpec{9, i}, w);
        Configuration c;
        c.window = w;
        c.t = 0.45;
        c.open.resize(clocks.size());
        for (std::size_t s = 0; s < clocks.size(); ++s) c.open[s] = clocks[s] <= 0.45;
        hits += annulus_dual_crossing(c, DualVertex{0, 0}, N);
    }
    CHECK(est.estimate.successes == hits);
    CHECK(est.check_n == 30);
}

TEST_CASE("crossing probability") {
    const ConstraintLaw law({0, 0, 0.5, 0.5}, 2);
    CHECK(crossing_probability(1, law, 0.0, 8, 100).p_hat == 0.0);
    CHECK(crossing_probability(1, ConstraintLaw::unconstrained(2), 1.0, 8, 100).p_hat == 1.0);
    CHECK_THROWS_AS(crossing_probability(1, law, 0.5, 3, 10), std::invalid_argument);

    // Crossing time agrees with a direct search just before and at that time.
    const Box box(Point{0, 0}, Point{11, 11});
    for (std::uint32_t i = 0; i < 40; ++i) {
        const auto env = sample_environment(SeedSpec{2, i}, box, law);
        const double tc = crossing_time(env);
        const auto traj = evolve(env);
        if (std::isinf(tc)) {
            CHECK_FALSE(crosses(config_at(traj, 1.0)));
            continue;
        }
        CHECK(crosses(config_at(traj, tc)));
        CHECK_FALSE(crosses(config_at(traj, std::nextafter(tc, 0.0))));
    }
}

TEST_CASE("Peierls certificate") {
    const Box w = Box::cube(Point{5, 0}, 20);
    const auto closed = peierls_certificate(uniform_config(w, false), 10);
    CHECK(closed.outcome == PeierlsOutcome::FiniteWithCircuit);
    CHECK(closed.cluster_size == 11);
    CHECK(closed.circuit_length == 2 * 11 + 2);
    CHECK(peierls_certificate(uniform_config(w, true), 10).outcome == PeierlsOutcome::TouchesBoundary);
    CHECK(peierls_certificate(uniform_config(w, true), 10, true).outcome == PeierlsOutcome::OpenUnboundedInWindow);
    CHECK_THROWS_AS(peierls_certificate(uniform_config(Box::cube(Point{0, 0}, 5), false), 5), MarginViolation);

    // A cluster with a hole: an open ring around a closed centre.
    auto c = uniform_config(w, false);
    for (int a = -1; a <= 11; ++a) {
        c.open[w.edge_slot(Edge{Point{a, 2}, 0})] = 1;
        c.open[w.edge_slot(Edge{Point{a, -2}, 0})] = 1;
    }
    for (int b = -2; b < 2; ++b) {
        c.open[w.edge_slot(Edge{Point{-1, b}, 1})] = 1;
        c.open[w.edge_slot(Edge{Point{12, b}, 1})] = 1;
    }
    c.open[w.edge_slot(Edge{Point{0, -1}, 1})] = 1;  // join the segment to the ring
    c.open[w.edge_slot(Edge{Point{0, -2}, 1})] = 1;
    CHECK(peierls_certificate(c, 10).outcome == PeierlsOutcome::FiniteWithCircuit);

    const ConstraintLaw two = ConstraintLaw::point_mass(2, 2);
    const Box big = Box::cube(Point{0, 0}, 60);
    int certified = 0;
    for (std::uint32_t i = 0; i < 20; ++i) {
        const auto cfg = config_at(evolve(sample_environment(SeedSpec{4, i}, big, two)), 1.0);
        const auto r = peierls_certificate(cfg, 5);
        CHECK(r.outcome != PeierlsOutcome::CircuitCheckFailed);
        certified += r.outcome == PeierlsOutcome::FiniteWithCircuit;
    }
    CHECK(certified > 0);
}

TEST_CASE("scale plan") {
    const auto plan = scale_plan(25, 4);
    CHECK(plan.scales == std::vector<std::uint64_t>{25, 125, 1375, 50875});
    CHECK_THROWS_AS(scale_plan(24, 4), std::invalid_argument);
    CHECK(plan.min_L_c1 > 3500);
    CHECK(plan.min_L_c1 < 5000);
    CHECK(static_cast<double>(plan.min_L_c2) == doctest::Approx(3.6e10).epsilon(0.01));
    CHECK(next_scale(1375) == 37 * 1375);
    CHECK(next_scale(99) == 9 * 99);
    CHECK(next_scale(100) == 10 * 100);
    for (std::uint64_t L = plan.min_L_c1; L < plan.min_L_c1 + 2000; ++L)
        CHECK(evaluate_conditions(L, plan.psi, plan.c3, plan.c6, plan.c7).c1);
}

TEST_CASE("induction step") {
    const double psi = psi_of(2), c3 = c3_of(2);
    const std::uint64_t L = scale_plan(25, 1).min_L_c2;
    const auto st = induction_rhs(L, std::pow(static_cast<double>(L), -4.0), c3, psi);
    CHECK(st.target_met);
    CHECK(induction_rhs(100, 0.0, 0.0, psi).rhs == 0.0);
    double prev = -INFINITY;
    for (double p : {0.0, 1e-9, 1e-6, 1e-3, 0.1, 1.0}) {
        const double v = induction_rhs(100, p, c3, psi).log_rhs;
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(induction_rhs(25, 0.1, c3, psi).delta == 125 - 100);
}

}
