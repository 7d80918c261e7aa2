#pragma once

// Coupled estimates over a grid of (rho, t) cells: each replicate draws X and
// U once and reuses them in every cell, so differences between neighbouring
// cells come only from the coupling, never from fresh noise.

#include <cstdint>
#include <vector>

#include "cdp/dynamics.hpp"
#include "cdp/environment.hpp"
#include "cdp/estimate.hpp"

namespace cdp {

struct GridCell {
    ConstraintLaw law;
    double t = 0;
};

struct CoupledGrid {
    std::uint64_t n = 0;
    std::vector<Estimate> cells;
    /// flips[i]: fraction of replicates where the indicator differs between
    /// cells i and i + 1.
    std::vector<Estimate> flips;
};

CoupledGrid coupled_event_grid(std::uint64_t seed, const Box& window, const std::vector<GridCell>& grid,
                               const LocalEvent& event, std::uint64_t n, std::int32_t locality_radius,
                               unsigned workers = 1);

}  // namespace cdp
