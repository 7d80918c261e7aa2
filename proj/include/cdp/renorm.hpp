#pragma once

// Two-dimensional coarse graining: the dual view of a configuration, the
// annulus events A_N(x), estimates of P*(N), left-right crossings, the
// finite-cluster certificate through a closed dual circuit, and the scale
// ladder L_{k+1} = floor(sqrt(L_k)) L_k with its conditions.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cdp/dynamics.hpp"
#include "cdp/environment.hpp"
#include "cdp/estimate.hpp"
#include "cdp/lattice.hpp"

namespace cdp {

/// A dual edge is open iff the primal edge it crosses is open. Throws
/// MarginViolation when that primal edge is not in the window.
bool dual_edge_open(const Configuration& config, const DualEdge& e);

/// Primal box holding every primal edge crossed by a dual edge of B*_{2N}(x).
Box annulus_primal_box(const DualVertex& x, std::int32_t N);

/// A_N(x): a path of closed dual edges inside B*_{2N}(x) from a dual vertex of
/// B*_N(x) to a dual vertex on the boundary of B*_{2N}(x).
bool annulus_dual_crossing(const Configuration& config, const DualVertex& x, std::int32_t N);

struct PstarEstimate {
    double t = 0;
    std::int32_t N = 0;
    std::int32_t pad = 0;
    Estimate estimate;
    // Pad-doubling diagnostic on the first n/10 replicates.
    std::uint64_t check_n = 0;
    Estimate check_base;     // the subsample at `pad`
    Estimate check_doubled;  // the same replicates at 2 pad
    double shift = 0;        // check_doubled.p_hat - check_base.p_hat
    double combined_se = 0;
};

inline std::int32_t default_pad(std::int32_t N) { return std::max<std::int32_t>(16, N / 2); }

/// P*_{rho,t}(N) at the dual origin for every t of `ts`, from the same
/// trajectories. Window: the primal cube of radius 2N + 1 + pad.
std::vector<PstarEstimate> estimate_pstar(std::uint64_t seed, const ConstraintLaw& law, std::span<const double> ts,
                                          std::int32_t N, std::int32_t pad, std::uint64_t n, unsigned workers = 1);
PstarEstimate estimate_pstar(std::uint64_t seed, const ConstraintLaw& law, double t, std::int32_t N,
                             std::int32_t pad, std::uint64_t n, unsigned workers = 1);

/// Earliest time at which an open left-right crossing of the box
/// [0, L-1]^2 exists (free boundary); +inf if none by t = 1.
double crossing_time(const EnvironmentField& env);
std::vector<double> crossing_times(std::uint64_t seed, const ConstraintLaw& law, std::int32_t L, std::uint64_t n,
                                   unsigned workers = 1);
/// Fraction of crossing times <= t.
Estimate crossing_estimate(std::span<const double> times, double t);
Estimate crossing_probability(std::uint64_t seed, const ConstraintLaw& law, double t, std::int32_t L,
                              std::uint64_t n, unsigned workers = 1);

enum class PeierlsOutcome { FiniteWithCircuit, TouchesBoundary, OpenUnboundedInWindow, CircuitCheckFailed };
std::string_view to_string(PeierlsOutcome o);

struct PeierlsResult {
    PeierlsOutcome outcome = PeierlsOutcome::CircuitCheckFailed;
    std::size_t cluster_size = 0;   // |O_L| inside the window
    bool spans_window = false;      // O_L joins two opposite sides of the window
    std::size_t circuit_length = 0; // dual edges on the certified circuit
};

/// O_L is the open cluster of {0..L} x {0}. A cluster reaching the window frame
/// is reported as TouchesBoundary; with `classify_spanning`, one that joins
/// opposite sides is reported as OpenUnboundedInWindow instead. Otherwise the
/// outer boundary of O_L (holes filled) is traced on the dual lattice and
/// checked to be a single closed circuit surrounding the segment.
PeierlsResult peierls_certificate(const Configuration& config, std::int32_t L, bool classify_spanning = false);

struct ScaleRow {
    std::uint64_t L = 0;
    double log_c1_lhs = 0;  // log(L e^{-psi L}) - log(L^{-8})
    double log_c2_lhs = 0;  // log(32 (20 c3 + 1) / L)
    double log_c3_lhs = 0;  // log(c7 L^2 c6^L) - log(L^{-4})
    bool c1 = false, c2 = false, c3 = false;
};

struct ScalePlan {
    std::uint64_t L0 = 0;
    std::vector<std::uint64_t> scales;
    double psi = 0, c3 = 0, c6 = 0, c7 = 0;
    std::vector<ScaleRow> rows;
    // Smallest L >= 25 satisfying each condition (from there on it keeps holding).
    std::uint64_t min_L_c1 = 0;
    std::uint64_t min_L_c2 = 0;
    std::uint64_t min_L_c3 = 0;
};

/// floor(sqrt(L)) L with overflow checks.
std::uint64_t next_scale(std::uint64_t L);
ScaleRow evaluate_conditions(std::uint64_t L, double psi, double c3, double c6, double c7);
ScalePlan scale_plan(std::uint64_t L0, std::size_t count, std::optional<double> c5 = std::nullopt, int d = 2);

struct InductionStep {
    std::uint64_t L_k = 0, L_next = 0;
    std::int64_t delta = 0;      // L_{k+1} - 4 L_k
    double log_rhs = 0;          // log of 32 (L_{k+1}/L_k)^2 [p^2 + 2 c3 10 L_k e^{-psi delta}]
    double rhs = 0;
    double log_target = 0;       // log L_{k+1}^{-4}
    bool target_met = false;
};

InductionStep induction_rhs(std::uint64_t L_k, double pstar_k_bound, double c3, double psi);

}  // namespace cdp
