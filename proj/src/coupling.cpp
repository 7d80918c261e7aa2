#include "cdp/coupling.hpp"

#include <algorithm>
#include <stdexcept>

#include "cdp/parallel.hpp"

namespace cdp {

CoupledGrid coupled_event_grid(std::uint64_t seed, const Box& window, const std::vector<GridCell>& grid,
                               const LocalEvent& event, std::uint64_t n, std::int32_t locality_radius,
                               unsigned workers) {
    if (grid.empty()) throw std::invalid_argument("coupled_event_grid: empty grid");
    if (n == 0) throw std::invalid_argument("coupled_event_grid: need at least one replicate");
    for (const auto& c : grid) {
        if (!(c.t >= 0.0 && c.t <= 1.0)) throw std::invalid_argument("coupled_event_grid: t must lie in [0, 1]");
        if (c.law.dim() != window.dim()) throw DimensionMismatch("coupled_event_grid: law and window dimensions differ");
    }
    for (const Edge& e : event.support)
        for (const Point& p : {e.base, e.head()})
            if (!window.contains(p) || window.margin(p) < locality_radius)
                throw MarginViolation("coupled_event_grid: event support too close to the window frame");

    // Cells sharing a law share one trajectory.
    std::vector<std::size_t> law_of(grid.size());
    std::vector<std::size_t> distinct;
    std::vector<double> horizon;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto same = [&](std::size_t j) {
            const auto a = grid[i].law.rho(), b = grid[j].law.rho();
            return std::equal(a.begin(), a.end(), b.begin(), b.end());
        };
        const auto it = std::find_if(distinct.begin(), distinct.end(), same);
        if (it == distinct.end()) {
            law_of[i] = distinct.size();
            distinct.push_back(i);
            horizon.push_back(grid[i].t);
        } else {
            law_of[i] = static_cast<std::size_t>(it - distinct.begin());
            horizon[law_of[i]] = std::max(horizon[law_of[i]], grid[i].t);
        }
    }

    const auto bits = map_replicates<std::vector<std::uint8_t>>(n, workers, [&](std::size_t r) {
        const SeedSpec sd{seed, static_cast<std::uint32_t>(r)};
        const auto x = sample_vertex_uniforms(sd, window);
        const auto clock = sample_clocks(sd, window);
        std::vector<Trajectory> traj;
        traj.reserve(distinct.size());
        for (std::size_t k = 0; k < distinct.size(); ++k)
            traj.push_back(evolve(window, clock, constraints_from_uniforms(x, grid[distinct[k]].law), horizon[k]));
        std::vector<std::uint8_t> out(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            out[i] = event.evaluate(config_at(traj[law_of[i]], grid[i].t)) ? 1 : 0;
        return out;
    });

    CoupledGrid res;
    res.n = n;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::uint64_t s = 0, f = 0;
        for (const auto& b : bits) {
            s += b[i];
            if (i + 1 < grid.size()) f += b[i] != b[i + 1];
        }
        res.cells.push_back(make_estimate(s, n));
        if (i + 1 < grid.size()) res.flips.push_back(make_estimate(f, n));
    }
    return res;
}

}  // namespace cdp
