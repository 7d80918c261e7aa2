#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cdp/coupling.hpp"
#include "cdp/dynamics.hpp"
#include "cdp/environment.hpp"
#include "cdp/oracle.hpp"

using namespace cdp;

TEST_SUITE("environment") {

TEST_CASE("constraint from uniform") {
    CHECK(constraint_from_uniform(0.999, ConstraintLaw({0, 0, 0, 1}, 2)) == 3);
    const ConstraintLaw half({0.5, 0.5, 0, 0}, 2);
    CHECK(constraint_from_uniform(0.25, half) == 0);
    CHECK(constraint_from_uniform(0.5, half) == 1);
    CHECK(constraint_from_uniform(1.0, half) == 1);
    CHECK(constraint_from_uniform(0.0, half) == 0);
    CHECK(constraint_from_uniform(1.0, ConstraintLaw({0.2, 0, 0.8, 0}, 2)) == 2);
    CHECK_THROWS_AS(constraint_from_uniform(1.5, half), std::invalid_argument);
    CHECK_THROWS_AS(constraint_from_uniform(-0.1, half), std::invalid_argument);
}

TEST_CASE("law validation") {
    CHECK_THROWS_AS(ConstraintLaw({0.5, 0.5, 0.1, 0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(ConstraintLaw({0.5, 0.5, 0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(ConstraintLaw({-0.1, 0.6, 0.5, 0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(ConstraintLaw({0, 0, 0, 0, 1}, 2), std::invalid_argument);  // needs validation mode
    CHECK_NOTHROW(ConstraintLaw({0, 0, 0, 0, 1}, 2, true));
    const ConstraintLaw law({0.1, 0.2, 0.3, 0.4}, 2);
    const auto c = law.cumulative();
    CHECK(std::is_sorted(c.begin(), c.end()));
    CHECK(c.back() == 1.0);
}

TEST_CASE("monotone in x") {
    const ConstraintLaw law({0.1, 0.2, 0.3, 0.4}, 2);
    int prev = 0;
    for (int i = 0; i <= 1000; ++i) {
        const int k = constraint_from_uniform(i / 1000.0, law);
        CHECK(k >= prev);
        prev = k;
    }
}

TEST_CASE("sampling is deterministic and window independent") {
    const ConstraintLaw law({0, 0, 0.5, 0.5}, 2);
    const SeedSpec seed{2024, 1};
    const Box small(Point{-3, -3}, Point{3, 4});
    const Box big(Point{-10, -8}, Point{9, 12});
    const auto a = sample_environment(seed, small, law);
    const auto b = sample_environment(seed, small, law);
    CHECK(a.x == b.x);
    CHECK(a.clock == b.clock);
    const auto c = sample_environment(seed, big, law);
    for (std::size_t v = 0; v < small.num_vertices(); ++v) {
        const Point p = small.point(v);
        CHECK(a.x[v] == c.x[big.index(p)]);
        CHECK(a.kappa[v] == c.kappa[big.index(p)]);
        CHECK(a.x[v] == vertex_uniform(seed, p));
    }
    for (std::size_t s = 0; s < small.num_edge_slots(); ++s) {
        if (!small.slot_is_edge(s)) {
            CHECK(std::isinf(a.clock[s]));
            continue;
        }
        const Edge e = small.edge(s);
        CHECK(a.clock[s] == c.clock_of(e));
        CHECK(a.clock[s] == edge_clock(seed, e));
    }
    const auto other = sample_environment(SeedSpec{2024, 2}, small, law);
    CHECK(other.x != a.x);
}

TEST_CASE("mean constraint at rho = (0,0,1/2,1/2)") {
    const ConstraintLaw law({0, 0, 0.5, 0.5}, 2);
    const auto x = sample_vertex_uniforms(SeedSpec{5, 0}, Box(Point{0, 0}, Point{316, 316}));
    const auto k = constraints_from_uniforms(x, law);
    const double mean = std::accumulate(k.begin(), k.end(), 0.0) / static_cast<double>(k.size());
    CHECK(std::abs(mean - 2.5) < 0.01);
}

TEST_CASE("resampling keeps the masked region") {
    const ConstraintLaw law({0.1, 0.2, 0.3, 0.4}, 2);
    const Box w(Point{0, 0}, Point{9, 9});
    const SeedSpec seed{8, 0};
    const auto base = sample_environment(seed, w, law);
    std::vector<std::uint8_t> kv(w.num_vertices(), 0), ke(w.num_edge_slots(), 0);
    for (std::size_t v = 0; v < 30; ++v) kv[v] = 1;
    for (std::size_t s = 0; s < 50; ++s) ke[s] = 1;
    const auto f = resample_outside(base, seed, law, kv, ke);
    std::size_t changed = 0;
    for (std::size_t v = 0; v < w.num_vertices(); ++v) {
        if (kv[v]) {
            CHECK(f.x[v] == base.x[v]);
            CHECK(f.kappa[v] == base.kappa[v]);
        } else {
            changed += f.x[v] != base.x[v];
        }
    }
    for (std::size_t s = 0; s < 50; ++s) CHECK(f.clock[s] == base.clock[s]);
    CHECK(changed == w.num_vertices() - 30);
}

TEST_CASE("coupled grid") {
    const Box w = Box::cube(Point{0, 0}, 8);
    const auto ev = edge_open_event(Edge{Point{0, 0}, 0});
    const ConstraintLaw law({0, 0, 0.5, 0.5}, 2);

    SUBCASE("single cell matches plain Monte Carlo") {
        const auto g = coupled_event_grid(3, w, {{law, 0.6}}, ev, 1000, 6);
        std::uint64_t hits = 0;
        for (std::uint32_t i = 0; i < 1000; ++i) {
            const auto env = sample_environment(SeedSpec{3, i}, w, law);
            hits += ev.evaluate(config_at(evolve(env), 0.6));
        }
        const Estimate plain = make_estimate(hits, 1000);
        CHECK(g.cells[0].successes == plain.successes);  // same streams, same estimator
    }
    SUBCASE("identical cells never flip") {
        const auto g = coupled_event_grid(4, w, {{law, 0.7}, {law, 0.7}}, ev, 500, 6);
        CHECK(g.flips[0].successes == 0);
        CHECK(g.cells[0].successes == g.cells[1].successes);
    }
    SUBCASE("extreme cells") {
        const ConstraintLaw three = ConstraintLaw::point_mass(3, 2);
        const auto g = coupled_event_grid(5, w, {{three, 1.0}, {three, 0.0}}, ev, 10000, 6);
        CHECK(g.cells[1].p_hat == 0.0);
        // Open at t = 1 unless the edge lost the race at one of its endpoints.
        TinyGraph star{"star", 2, {{0, 1}}, {3, 3}, {}};
        CHECK(g.cells[0].p_hat > 0.5);
        CHECK(exact_event_probability(star, 1.0, [](std::span<const std::uint8_t> s) { return s[0] != 0; }) == 1.0);
        CHECK(g.flips[0].p_hat == g.cells[0].p_hat);
    }
    SUBCASE("flip rate shrinks as cells approach") {
        const ConstraintLaw a({0, 0, 0.5, 0.5}, 2), b({0, 0, 0.45, 0.55}, 2), c({0, 0, 0.2, 0.8}, 2);
        const auto g = coupled_event_grid(6, w, {{a, 0.8}, {b, 0.8}, {a, 0.8}, {c, 0.8}}, ev, 4000, 6);
        CHECK(g.flips[0].p_hat < g.flips[2].p_hat);
    }
    CHECK_THROWS_AS(coupled_event_grid(1, w, {{law, 0.5}}, edge_open_event(Edge{Point{7, 0}, 0}), 10, 6),
                    MarginViolation);
}

}
