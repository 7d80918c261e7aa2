#pragma once

// Random environment: vertex constraints derived from shared uniforms X(v)
// through the cumulative law, and one clock U(e) per edge.

#include <cstdint>
#include <span>
#include <vector>

#include "cdp/lattice.hpp"
#include "cdp/rng.hpp"

namespace cdp {

/// Law rho = (rho_0, ..., rho_{2d-1}) of the i.i.d. vertex constraints.
///
/// In validation mode the law has 2d + 1 entries and the extra value 2d means
/// "unconstrained" (the dynamics then reduces to Bernoulli percolation). It is
/// only accepted where a caller explicitly asks for it.
class ConstraintLaw {
public:
    ConstraintLaw(std::vector<double> rho, int dim, bool validation_mode = false);

    /// All mass on constraint 2d (validation mode).
    static ConstraintLaw unconstrained(int dim);
    /// All mass on a single value j in [0, 2d).
    static ConstraintLaw point_mass(int j, int dim);

    int dim() const { return dim_; }
    bool validation_mode() const { return validation_mode_; }
    std::span<const double> rho() const { return rho_; }
    std::span<const double> cumulative() const { return cumulative_; }
    /// Largest value carrying positive mass; the image of x = 1.
    std::uint8_t top() const { return top_; }

    /// 0 if x < cum_0; j if cum_{j-1} <= x < cum_j; top() if x == 1.
    std::uint8_t constraint_for(double x) const;

    /// max_j |cum_j - other.cum_j|.
    double cumulative_distance(const ConstraintLaw& other) const;

private:
    int dim_;
    bool validation_mode_;
    std::vector<double> rho_;
    std::vector<double> cumulative_;
    std::uint8_t top_ = 0;
};

/// Free function form of ConstraintLaw::constraint_for.
std::uint8_t constraint_from_uniform(double x, const ConstraintLaw& law);

/// Sampled environment on a finite window. Clock slots that are not edges of
/// the window hold +infinity.
struct EnvironmentField {
    Box window;
    std::vector<double> x;
    std::vector<std::uint8_t> kappa;
    std::vector<double> clock;

    double clock_of(const Edge& e) const { return clock[window.edge_slot(e)]; }
    std::uint8_t kappa_of(const Point& p) const { return kappa[window.index(p)]; }
};

/// Per-vertex uniforms of one stream over a window.
std::vector<double> sample_vertex_uniforms(const SeedSpec& seed, const Box& window,
                                           Stream stream = Stream::VertexUniforms);
/// Per-edge-slot clocks of one stream over a window (+inf on non-edges).
std::vector<double> sample_clocks(const SeedSpec& seed, const Box& window, Stream stream = Stream::EdgeClocks);

/// Single-entity access with the same values the window samplers produce.
double vertex_uniform(const SeedSpec& seed, const Point& p, Stream stream = Stream::VertexUniforms);
double edge_clock(const SeedSpec& seed, const Edge& e, Stream stream = Stream::EdgeClocks);

/// Constraints for every vertex of a uniform array.
std::vector<std::uint8_t> constraints_from_uniforms(std::span<const double> x, const ConstraintLaw& law);

EnvironmentField sample_environment(const SeedSpec& seed, const Box& window, const ConstraintLaw& law);

/// Keep X and U where the masks are set and draw fresh values (independent
/// streams) everywhere else; constraints are rederived from the merged X.
EnvironmentField resample_outside(const EnvironmentField& base, const SeedSpec& seed, const ConstraintLaw& law,
                                  std::span<const std::uint8_t> keep_vertex,
                                  std::span<const std::uint8_t> keep_edge);

}  // namespace cdp
