#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cdp/dynamics.hpp"
#include "cdp/environment.hpp"

using namespace cdp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Line of three vertices along axis 0: edges (0,0)-(1,0) and (1,0)-(2,0).
Trajectory path3(double u1, double u2, std::uint8_t k_mid) {
    const Box w(Point{0, 0}, Point{2, 0});
    std::vector<double> clocks(w.num_edge_slots(), kInf);
    clocks[w.edge_slot(Edge{Point{0, 0}, 0})] = u1;
    clocks[w.edge_slot(Edge{Point{1, 0}, 0})] = u2;
    const std::vector<std::uint8_t> kappa{3, k_mid, 3};
    return evolve(w, clocks, kappa);
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("single edge") {
    const Box w(Point{0, 0}, Point{1, 0});
    std::vector<double> clocks(w.num_edge_slots(), kInf);
    const Edge e{Point{0, 0}, 0};
    clocks[w.edge_slot(e)] = 0.4;
    CHECK(evolve(w, clocks, std::vector<std::uint8_t>{3, 3}).outcome(e) == Outcome::Opened);
    CHECK(evolve(w, clocks, std::vector<std::uint8_t>{0, 3}).outcome(e) == Outcome::Blocked);
    const auto traj = evolve(w, clocks, std::vector<std::uint8_t>{3, 3});
    CHECK_FALSE(config_at(traj, 0.39).is_open(e));
    CHECK(config_at(traj, 0.4).is_open(e));
}

TEST_CASE("path with a degree-one middle vertex") {
    const auto traj = path3(0.2, 0.3, 1);
    const Edge e1{Point{0, 0}, 0}, e2{Point{1, 0}, 0};
    CHECK(traj.outcome(e1) == Outcome::Opened);
    CHECK(traj.outcome(e2) == Outcome::Blocked);
    const auto c = config_at(traj, 0.25);
    CHECK(c.is_open(e1));
    CHECK_FALSE(c.is_open(e2));
    CHECK(config_at(traj, 0.0).open == std::vector<std::uint8_t>(c.open.size(), 0));
    const auto full = config_at(traj, 1.0);
    for (std::size_t s = 0; s < full.open.size(); ++s) CHECK(full.open[s] == traj.opened[s]);
}

TEST_CASE("equal clocks break ties by edge order") {
    const auto traj = path3(0.5, 0.5, 1);
    CHECK(traj.outcome(Edge{Point{0, 0}, 0}) == Outcome::Opened);
    CHECK(traj.outcome(Edge{Point{1, 0}, 0}) == Outcome::Blocked);
}

TEST_CASE("pathwise laws on random windows") {
    std::mt19937_64 gen(11);
    const ConstraintLaw law({0.1, 0.2, 0.3, 0.4}, 2);
    for (std::uint32_t rep = 0; rep < 100; ++rep) {
        const Box w(Point{0, 0}, Point{11, 9});
        const auto env = sample_environment(SeedSpec{gen(), rep}, w, law);
        const auto traj = evolve(env);
        const double s = 0.3, t = 0.7;
        const auto cs = config_at(traj, s), ct = config_at(traj, t);
        for (std::size_t v = 0; v < w.num_vertices(); ++v) {
            CHECK(ct.degree(v) <= env.kappa[v]);
            CHECK(traj.degree[v] <= env.kappa[v]);
        }
        for (std::size_t e = 0; e < ct.open.size(); ++e) {
            if (cs.open[e]) CHECK(ct.open[e]);
            if (ct.open[e]) CHECK(env.clock[e] <= t);
        }
        const auto trunc = evolve(env, t);
        CHECK(config_at(trunc, t).open == ct.open);
    }
}

TEST_CASE("unconstrained validation mode is Bernoulli") {
    const Box w(Point{0, 0}, Point{15, 15});
    const auto env = sample_environment(SeedSpec{9, 0}, w, ConstraintLaw::unconstrained(2));
    const auto c = config_at(evolve(env), 0.55);
    for (std::size_t e = 0; e < c.open.size(); ++e) CHECK(c.open[e] == (env.clock[e] <= 0.55 ? 1 : 0));
}

TEST_CASE("graph dynamics matches lattice dynamics") {
    const ConstraintLaw law({0.1, 0.2, 0.3, 0.4}, 2);
    const Box w(Point{0, 0}, Point{4, 3});
    const auto env = sample_environment(SeedSpec{21, 0}, w, law);
    std::vector<GraphEdge> edges;
    std::vector<double> clocks;
    std::vector<std::size_t> slots;
    for (std::size_t s = 0; s < w.num_edge_slots(); ++s) {
        if (!w.slot_is_edge(s)) continue;
        const Edge e = w.edge(s);
        edges.push_back({static_cast<std::uint32_t>(w.index(e.base)), static_cast<std::uint32_t>(w.index(e.head()))});
        clocks.push_back(env.clock[s]);
        slots.push_back(s);
    }
    const auto g = evolve_graph(edges, clocks, env.kappa, w.num_vertices());
    const auto traj = evolve(env);
    for (std::size_t i = 0; i < slots.size(); ++i) CHECK(g[i] == traj.opened[slots[i]]);
}

TEST_CASE("local events need their support in the window") {
    const Box w(Point{0, 0}, Point{2, 2});
    const auto env = sample_environment(SeedSpec{1, 0}, w, ConstraintLaw::point_mass(3, 2));
    const auto c = config_at(evolve(env), 1.0);
    CHECK_THROWS_AS(edge_open_event(Edge{Point{2, 2}, 0}).evaluate(c), MarginViolation);
    CHECK(sure_event().evaluate(c));
}

}
