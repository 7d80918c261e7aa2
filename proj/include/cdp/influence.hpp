#pragma once

// Interval clusters, layered influence sets, the confinement event Xi, the
// locality check, radius tails and the decoupling estimator.
//
// The influence set of Lambda at time t, with m = ceil(2d t), is built from the
// inside out: first the cluster of Lambda over clocks in ((m-1)/2d, t], then
// the cluster of that set over ((m-2)/2d, (m-1)/2d], and so on down to
// (0, 1/2d]. Randomness outside it cannot change omega_t on the edges of
// Lambda.

#include <cstdint>
#include <string>
#include <span>
#include <vector>

#include "cdp/dynamics.hpp"
#include "cdp/environment.hpp"
#include "cdp/lattice.hpp"

namespace cdp {

/// Clock lookup by edge slot: either a sampled array or computed on demand
/// from the counter-based generator (identical values).
class ClockSource {
public:
    static ClockSource from_field(const Box& window, std::span<const double> clocks);
    static ClockSource lazy(const Box& window, const SeedSpec& seed, Stream stream = Stream::EdgeClocks);

    const Box& window() const { return window_; }
    double operator()(std::size_t slot) const;

private:
    Box window_;
    std::span<const double> clocks_;
    SeedSpec seed_{};
    Stream stream_ = Stream::EdgeClocks;
    bool lazy_ = false;
};

/// Reusable marks for cluster searches on one window (epoch stamped, so a
/// search costs O(cluster) rather than O(window)).
class ClusterWorkspace {
public:
    explicit ClusterWorkspace(const Box& window);
    const Box& window() const { return window_; }

    void reset();
    bool marked(std::size_t v) const { return stamp_[v] == epoch_; }
    void mark(std::size_t v) { stamp_[v] = epoch_; }

private:
    Box window_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

/// C_{a,b}(seeds): closure of `seeds` over edges with a < U_e <= b, inside the
/// window. With `restriction`, only edges with both endpoints in the mask are
/// used. Returns vertex indices: the seeds first, then in discovery order.
std::vector<std::size_t> interval_cluster(const ClockSource& clocks, std::span<const std::size_t> seeds, double a,
                                          double b, std::span<const std::uint8_t> restriction = {});
std::vector<std::size_t> interval_cluster(const ClockSource& clocks, std::span<const std::size_t> seeds, double a,
                                          double b, ClusterWorkspace& ws, std::span<const std::uint8_t> restriction = {});

/// Point-set convenience wrapper; throws MarginViolation if a seed lies
/// outside the window.
VertexSet interval_cluster(const ClockSource& clocks, std::span<const Point> seeds, double a, double b);

/// Index m of the interval ((m-1)/2d, m/2d] that contains t; 0 for t = 0.
int influence_layer_count(double t, int d);

struct InfluenceSet {
    VertexSet base;
    double t = 0;
    int m = 0;
    /// layers[j] is the set after j + 1 cluster steps; each contains the previous.
    std::vector<std::vector<std::size_t>> layers;
    std::vector<std::size_t> members;  // union (= last layer), vertex indices
    std::int64_t radius = 0;           // max over members of delta(x, base)
    bool touches_frame = false;        // truncated by the window

    VertexSet points(const Box& window) const;
};

InfluenceSet influence_set(const ClockSource& clocks, std::span<const Point> base, double t);
InfluenceSet influence_set(const ClockSource& clocks, std::span<const Point> base, double t, ClusterWorkspace& ws);

/// Xi_{Lambda,t,r}: the influence set stays inside B_r(Lambda). Requires
/// B_{r+1}(Lambda) inside the window.
bool xi_holds(const ClockSource& clocks, std::span<const Point> base, double t, std::int64_t r);

enum class LocalityVerdict { NotApplicable, Pass, Fail };

struct LocalityResult {
    LocalityVerdict verdict = LocalityVerdict::NotApplicable;
    std::size_t resampled_vertices = 0;
    std::size_t changed_edges_outside = 0;  // edges whose omega_t changed after resampling
};

/// Sample (kappa, U); if Xi holds, redraw every clock outside E(B_{r+1}) and
/// every constraint outside B_{r+1} from fresh streams, re-evolve, and compare
/// omega_t on E(Lambda). The window margin around Lambda must be at least 3r.
LocalityResult locality_check(const SeedSpec& seed, const ConstraintLaw& law, std::span<const Point> base, double t,
                              std::int64_t r, const Box& window);

struct RadiusTail {
    std::uint64_t n = 0;
    std::int64_t r_max = 0;
    std::vector<std::uint64_t> exceed;  // # samples with rad > r, r = 0..r_max
    std::vector<double> survival;       // exceed / n
    std::vector<double> bound;          // c2 e^{-4 psi r}
    double fit_slope = 0;               // least squares of log survival over the fit range
    double fit_intercept = 0;
    std::int64_t fit_r_last = -1;       // last r with >= 50 surviving samples
    double mean_size = 0;               // E|I_1(v)|
    double mean_size_se = 0;
    std::uint64_t truncated = 0;        // samples that reached the window frame
};

RadiusTail radius_tail(std::uint64_t seed, const Point& v, std::int64_t r_max, std::uint64_t n, unsigned workers = 1);

struct DecouplingReport {
    VertexSet lambda1, lambda2;
    std::string event1, event2;
    std::uint64_t n = 0;
    double p1 = 0, p2 = 0, p12 = 0;
    double cov_hat = 0;
    double se = 0;
    std::int64_t delta = 0;
    double bound = 0;  // c3 (|dLambda1| + |dLambda2|) e^{-psi delta}
};

/// Joint and marginal estimates from the same replicates.
DecouplingReport decoupling_estimate(std::uint64_t seed, std::span<const Point> lambda1, std::span<const Point> lambda2,
                                     const LocalEvent& a1, const LocalEvent& a2, const ConstraintLaw& law, double t,
                                     std::uint64_t n, std::int32_t pad = 12, unsigned workers = 1);

}  // namespace cdp
