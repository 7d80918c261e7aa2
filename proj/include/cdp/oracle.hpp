#pragma once

// Exact event probabilities on tiny graphs by enumeration.
//
// At time t the final state depends only on which clocks ring by t and on
// their relative order. Summing over subsets S of edges and orderings of S,
//
//   P(A) = sum_k  N_k / k!  t^k (1-t)^(m-k),
//
// where N_k counts the (S, ordering) pairs with |S| = k for which A holds
// after attempting the edges of S in that order. The integer counts N_k are
// computed once and the polynomial is then evaluated in double or exactly.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdp/dynamics.hpp"
#include "cdp/estimate.hpp"
#include "cdp/rng.hpp"

namespace cdp {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kOracleMaxEdges = 9;
inline constexpr std::size_t kOracleMaxVertices = 10;
inline constexpr std::size_t kOracleMaxRationalEdges = 6;

struct TinyGraph {
    std::string name;
    std::size_t num_vertices = 0;
    std::vector<GraphEdge> edges;
    /// Fixed constraints, one per vertex (may be empty when `laws` is set).
    std::vector<std::uint8_t> kappa;
    /// Per-vertex constraint laws (probability vectors), used by the
    /// over-constraints oracle and by Monte Carlo with random constraints.
    std::vector<std::vector<double>> laws;

    void validate() const;
};

/// Predicate on the per-edge open flags at time t.
using GraphEvent = std::function<bool(std::span<const std::uint8_t>)>;

/// Counts N_k for k = 0..m (see the header comment).
std::vector<std::uint64_t> ordering_counts(const TinyGraph& g, std::span<const std::uint8_t> kappa,
                                           const GraphEvent& event);

double exact_event_probability(const TinyGraph& g, double t, const GraphEvent& event);
/// Exact rational value for rational t; limited to m <= 6 edges.
Rational exact_event_probability_rational(const TinyGraph& g, const Rational& t, const GraphEvent& event);

/// Average of the fixed-constraint oracle over all constraint assignments
/// weighted by the per-vertex laws.
double exact_probability_over_constraints(const TinyGraph& g, double t, const GraphEvent& event);

/// Monte Carlo with the engine's own dynamics. Constraints come from g.kappa
/// when set, otherwise they are sampled from g.laws.
Estimate monte_carlo_event_probability(const TinyGraph& g, double t, const GraphEvent& event, std::uint64_t seed,
                                       std::uint64_t n, unsigned workers = 1);

/// Text format:
///   vertices <n>
///   edges <u>-<v> <u>-<v> ...
///   constraints <k_0> ... <k_{n-1}>     (or)   law <rho_0> <rho_1> ...
/// Blank lines and lines starting with '#' are ignored.
TinyGraph parse_tiny_graph(std::string_view text);

struct OracleCase {
    TinyGraph graph;
    std::string event_name;
    GraphEvent event;
};

/// Built-in test graphs with their events (at most 8 edges each).
std::vector<OracleCase> builtin_oracle_cases();

}  // namespace cdp
