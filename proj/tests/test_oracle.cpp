#include <doctest.h>

#include <cmath>

#include "cdp/oracle.hpp"

using namespace cdp;

namespace {

bool edge0(std::span<const std::uint8_t> s) { return s[0] != 0; }
bool all_open(std::span<const std::uint8_t> s) {
    for (auto x : s)
        if (!x) return false;
    return true;
}

TinyGraph path3(std::uint8_t mid) { return {"path3", 3, {{0, 1}, {1, 2}}, {3, mid, 3}, {}}; }

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("closed forms") {
    const TinyGraph edge{"edge", 2, {{0, 1}}, {1, 1}, {}};
    for (double t : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        CHECK(exact_event_probability(edge, t, edge0) == doctest::Approx(t).epsilon(1e-15));
        CHECK(exact_event_probability(path3(1), t, edge0) == doctest::Approx(t - t * t / 2).epsilon(1e-14));
    }
    CHECK(exact_event_probability(path3(1), 0.5, edge0) == 0.375);
    const TinyGraph blocked{"blocked", 2, {{0, 1}}, {0, 3}, {}};
    CHECK(exact_event_probability(blocked, 0.7, edge0) == 0.0);
}

TEST_CASE("rational mode") {
    const Rational half(1, 2);
    CHECK(exact_event_probability_rational(path3(1), half, edge0) == Rational(3, 8));
    const Rational t(2, 7);
    CHECK(exact_event_probability_rational(path3(1), t, edge0) == t - t * t / 2);
    TinyGraph big{"big", 8, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}}, {1, 1, 1, 1, 1, 1, 1, 1}, {}};
    CHECK_THROWS_AS(exact_event_probability_rational(big, half, edge0), std::invalid_argument);
}

TEST_CASE("normalization and t = 0") {
    for (const auto& c : builtin_oracle_cases()) {
        auto complement = [&](std::span<const std::uint8_t> s) { return !c.event(s); };
        for (double t : {0.0, 0.25, 0.5, 0.9, 1.0}) {
            double p = 0, q = 0;
            if (c.graph.kappa.empty()) {
                p = exact_probability_over_constraints(c.graph, t, c.event);
                q = exact_probability_over_constraints(c.graph, t, complement);
            } else {
                p = exact_event_probability(c.graph, t, c.event);
                q = exact_event_probability(c.graph, t, complement);
            }
            CHECK(std::abs(p + q - 1.0) < 1e-12);
            CHECK(p >= -1e-15);
            CHECK(p <= 1 + 1e-15);
        }
        if (!c.graph.kappa.empty()) {
            const std::vector<std::uint8_t> closed(c.graph.edges.size(), 0);
            CHECK(exact_event_probability(c.graph, 0.0, c.event) == (c.event(closed) ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("rational and double agree on small cases") {
    for (const auto& c : builtin_oracle_cases()) {
        if (c.graph.kappa.empty() || c.graph.edges.size() > kOracleMaxRationalEdges) continue;
        const Rational r = exact_event_probability_rational(c.graph, Rational(9, 10), c.event);
        CHECK(static_cast<double>(r) == doctest::Approx(exact_event_probability(c.graph, 0.9, c.event)).epsilon(1e-13));
    }
}

TEST_CASE("averaging over constraints") {
    TinyGraph g{"edge", 2, {{0, 1}}, {}, {{0.5, 0, 0, 0.5}, {0.5, 0, 0, 0.5}}};
    CHECK(exact_probability_over_constraints(g, 1.0, edge0) == doctest::Approx(0.25));

    TinyGraph point{"path3", 3, {{0, 1}, {1, 2}}, {}, {{0, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 0, 1}}};
    for (double t : {0.2, 0.5, 1.0}) {
        CHECK(exact_probability_over_constraints(point, t, edge0) == exact_event_probability(path3(1), t, edge0));
        CHECK(exact_probability_over_constraints(point, t, all_open) == 0.0);
    }
}

TEST_CASE("Monte Carlo agrees with the oracle") {
    for (const auto& c : builtin_oracle_cases()) {
        const double exact = c.graph.kappa.empty() ? exact_probability_over_constraints(c.graph, 0.5, c.event)
                                                   : exact_event_probability(c.graph, 0.5, c.event);
        const Estimate mc = monte_carlo_event_probability(c.graph, 0.5, c.event, 17, 20000);
        CHECK(std::abs(mc.p_hat - exact) <= 4 * mc.se + 1e-12);
    }
}

TEST_CASE("limits and parsing") {
    TinyGraph ten{"ten", 10, {}, std::vector<std::uint8_t>(10, 3), {}};
    for (std::uint32_t i = 0; i < 9; ++i) ten.edges.push_back({i, i + 1});
    CHECK_NOTHROW(ten.validate());
    ten.edges.push_back({0, 9});
    CHECK_THROWS_AS(ten.validate(), std::invalid_argument);

    const auto g = parse_tiny_graph("# comment\nname p\nvertices 3\nedges 0-1 1-2\nconstraints 3 1 3\n");
    CHECK(g.name == "p");
    CHECK(g.edges.size() == 2);
    CHECK(exact_event_probability(g, 0.5, edge0) == 0.375);
    const auto h = parse_tiny_graph("vertices 2\nedges 0-1\nlaw 0.5 0 0 0.5\n");
    CHECK(exact_probability_over_constraints(h, 1.0, edge0) == doctest::Approx(0.25));
    CHECK_THROWS_AS(parse_tiny_graph("vertices 2\nedges 0-0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_tiny_graph("edges 0-1\n"), std::invalid_argument);
}

TEST_CASE("built-in cases") {
    const auto cases = builtin_oracle_cases();
    CHECK(cases.size() >= 10);
    for (const auto& c : cases) CHECK(c.graph.edges.size() <= 8);
}

}
