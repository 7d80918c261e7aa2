#include "cdp/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "cdp/kernels.hpp"

namespace cdp {
namespace {

struct Ring {
    std::uint64_t clock_bits;  // positive doubles order like their bit patterns
    std::uint32_t id;
    friend bool operator<(const Ring& x, const Ring& y) {
        return x.clock_bits != y.clock_bits ? x.clock_bits < y.clock_bits : x.id < y.id;
    }
};

std::vector<Ring> ring_order(std::span<const double> clocks, double horizon) {
    std::vector<Ring> order;
    order.reserve(clocks.size());
    for (std::size_t i = 0; i < clocks.size(); ++i) {
        const double c = clocks[i];
        if (c <= horizon) {
            if (!(c >= 0.0)) throw std::invalid_argument("evolve: clocks must be non-negative");
            order.push_back({std::bit_cast<std::uint64_t>(c), static_cast<std::uint32_t>(i)});
        }
    }
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace

int Configuration::degree(std::size_t v) const {
    int deg = 0;
    window.for_each_incident(v, [&](std::size_t slot, std::size_t) { deg += open[slot]; });
    return deg;
}

Trajectory evolve(const Box& window, std::span<const double> clocks, std::span<const std::uint8_t> kappa,
                  double horizon) {
    if (clocks.size() != window.num_edge_slots() || kappa.size() != window.num_vertices())
        throw std::invalid_argument("evolve: field sizes do not match the window");
    Trajectory traj;
    traj.window = window;
    traj.horizon = horizon;
    traj.clock.assign(clocks.begin(), clocks.end());
    traj.opened.assign(clocks.size(), 0);
    traj.degree.assign(kappa.size(), 0);

    const auto d = static_cast<std::size_t>(window.dim());
    std::array<std::size_t, kMaxDim> stride{};
    for (std::size_t a = 0; a < d; ++a) stride[a] = window.stride(static_cast<int>(a));

    for (const Ring& r : ring_order(clocks, horizon)) {
        const std::size_t u = r.id / d;
        const std::size_t v = u + stride[r.id % d];
        if (traj.degree[u] < kappa[u] && traj.degree[v] < kappa[v]) {
            traj.opened[r.id] = 1;
            ++traj.degree[u];
            ++traj.degree[v];
        }
    }
    return traj;
}

Trajectory evolve(const EnvironmentField& env, double horizon) {
    return evolve(env.window, env.clock, env.kappa, horizon);
}

bool LocalEvent::evaluate(const Configuration& c) const {
    std::vector<std::uint8_t> states(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (!c.window.has_edge(support[i])) throw MarginViolation("LocalEvent: support edge outside the window");
        states[i] = c.open[c.window.edge_slot(support[i])];
    }
    return holds(states);
}

LocalEvent edge_open_event(const Edge& e) {
    return {"edge_open", {e}, [](std::span<const std::uint8_t> s) { return s[0] != 0; }};
}

LocalEvent sure_event() {
    return {"sure", {}, [](std::span<const std::uint8_t>) { return true; }};
}

Configuration config_at(const Trajectory& traj, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("config_at: t must lie in [0, 1]");
    Configuration c;
    c.window = traj.window;
    c.t = t;
    c.open.resize(traj.clock.size());
    kernels().open_mask(traj.clock, traj.opened, t, c.open);
    return c;
}

std::vector<std::uint8_t> evolve_graph(std::span<const GraphEdge> edges, std::span<const double> clocks,
                                       std::span<const std::uint8_t> kappa, std::size_t num_vertices,
                                       double horizon) {
    if (clocks.size() != edges.size() || kappa.size() != num_vertices)
        throw std::invalid_argument("evolve_graph: sizes do not match");
    std::vector<std::uint8_t> opened(edges.size(), 0);
    std::vector<std::uint8_t> degree(num_vertices, 0);
    for (const Ring& r : ring_order(clocks, horizon)) {
        const auto [u, v] = edges[r.id];
        if (degree[u] < kappa[u] && degree[v] < kappa[v]) {
            opened[r.id] = 1;
            ++degree[u];
            ++degree[v];
        }
    }
    return opened;
}

}  // namespace cdp
