#pragma once

// Constrained-degree dynamics: a single sorted-clock sweep at horizon 1
// determines omega_t for every t, because whether an edge opens depends only
// on edges whose clocks ring strictly earlier.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cdp/environment.hpp"
#include "cdp/lattice.hpp"

namespace cdp {

enum class Outcome : std::uint8_t { Blocked = 0, Opened = 1 };

struct Trajectory {
    Box window;
    std::vector<double> clock;          // copy of U, +inf on non-edge slots
    std::vector<std::uint8_t> opened;   // 1 = Opened, 0 = BlockedAtAttempt (or not an edge / not attempted)
    std::vector<std::uint8_t> degree;   // final degree of every vertex
    double horizon = 1.0;

    Outcome outcome(const Edge& e) const {
        return opened[window.edge_slot(e)] ? Outcome::Opened : Outcome::Blocked;
    }
};

struct Configuration {
    Box window;
    double t = 0.0;
    std::vector<std::uint8_t> open;  // per edge slot

    bool is_open(const Edge& e) const { return window.has_edge(e) && open[window.edge_slot(e)] != 0; }
    /// deg(v, t).
    int degree(std::size_t v) const;
};

/// Sweep all edges with clock <= horizon in increasing (clock, edge slot)
/// order; ties are broken by the canonical edge order.
Trajectory evolve(const EnvironmentField& env, double horizon = 1.0);
Trajectory evolve(const Box& window, std::span<const double> clocks, std::span<const std::uint8_t> kappa,
                  double horizon = 1.0);

Configuration config_at(const Trajectory& traj, double t);

/// An event living on a fixed finite edge set: the predicate only sees the
/// states of `support`, in that order.
struct LocalEvent {
    std::string name;
    std::vector<Edge> support;
    std::function<bool(std::span<const std::uint8_t>)> holds;

    bool evaluate(const Configuration& c) const;
};

LocalEvent edge_open_event(const Edge& e);
/// The sure event (empty support).
LocalEvent sure_event();

/// Edge endpoints of an arbitrary finite graph (vertex ids).
struct GraphEdge {
    std::uint32_t u = 0, v = 0;
};

/// Same dynamics on an arbitrary graph. Returns one Outcome byte per edge
/// (edges with clock > horizon are left Blocked).
std::vector<std::uint8_t> evolve_graph(std::span<const GraphEdge> edges, std::span<const double> clocks,
                                       std::span<const std::uint8_t> kappa, std::size_t num_vertices,
                                       double horizon = 1.0);

}  // namespace cdp
