#include "cdp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cdp/environment.hpp"
#include "cdp/parallel.hpp"
#include "cdp/union_find.hpp"

namespace cdp {

void TinyGraph::validate() const {
    if (num_vertices == 0 || num_vertices > kOracleMaxVertices)
        throw std::invalid_argument("TinyGraph: vertex count must be in [1, 10]");
    if (edges.size() > kOracleMaxEdges) throw std::invalid_argument("TinyGraph: at most 9 edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto [u, v] = edges[i];
        if (u >= num_vertices || v >= num_vertices || u == v)
            throw std::invalid_argument("TinyGraph: edge endpoints out of range or loop");
        for (std::size_t j = 0; j < i; ++j) {
            const auto [a, b] = edges[j];
            if ((a == u && b == v) || (a == v && b == u)) throw std::invalid_argument("TinyGraph: repeated edge");
        }
    }
    if (!kappa.empty() && kappa.size() != num_vertices)
        throw std::invalid_argument("TinyGraph: one constraint per vertex required");
    if (!laws.empty() && laws.size() != num_vertices) throw std::invalid_argument("TinyGraph: one law per vertex required");
}

std::vector<std::uint64_t> ordering_counts(const TinyGraph& g, std::span<const std::uint8_t> kappa,
                                           const GraphEvent& event) {
    g.validate();
    if (kappa.size() != g.num_vertices) throw std::invalid_argument("ordering_counts: constraint vector size mismatch");
    const std::size_t m = g.edges.size();
    std::vector<std::uint64_t> counts(m + 1, 0);
    std::vector<std::uint8_t> open(m);
    std::vector<std::uint8_t> deg(g.num_vertices);
    std::vector<std::uint32_t> order;

    // Subsets by popcount, each popcount class in increasing mask order.
    for (std::size_t k = 0; k <= m; ++k) {
        for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
            order.clear();
            for (std::uint32_t e = 0; e < m; ++e)
                if (mask & (1u << e)) order.push_back(e);
            do {
                std::fill(open.begin(), open.end(), 0);
                std::fill(deg.begin(), deg.end(), 0);
                for (std::uint32_t e : order) {
                    const auto [u, v] = g.edges[e];
                    if (deg[u] < kappa[u] && deg[v] < kappa[v]) {
                        open[e] = 1;
                        ++deg[u];
                        ++deg[v];
                    }
                }
                if (event(open)) ++counts[k];
            } while (std::next_permutation(order.begin(), order.end()));
        }
    }
    return counts;
}

namespace {

template <class Real>
Real evaluate_counts(std::span<const std::uint64_t> counts, const Real& t) {
    const std::size_t m = counts.size() - 1;
    Real total = 0;
    Real factorial = 1;
    for (std::size_t k = 0; k <= m; ++k) {
        if (k > 0) factorial *= Real(static_cast<unsigned long long>(k));
        Real term = Real(static_cast<unsigned long long>(counts[k])) / factorial;
        for (std::size_t i = 0; i < k; ++i) term *= t;
        for (std::size_t i = k; i < m; ++i) term *= (Real(1) - t);
        total += term;
    }
    return total;
}

void check_time(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("oracle: t must lie in [0, 1]");
}

}  // namespace

double exact_event_probability(const TinyGraph& g, double t, const GraphEvent& event) {
    check_time(t);
    if (g.kappa.empty()) throw std::invalid_argument("exact_event_probability: graph has no fixed constraints");
    const auto counts = ordering_counts(g, g.kappa, event);
    return evaluate_counts<double>(counts, t);
}

Rational exact_event_probability_rational(const TinyGraph& g, const Rational& t, const GraphEvent& event) {
    if (t < 0 || t > 1) throw std::invalid_argument("oracle: t must lie in [0, 1]");
    if (g.edges.size() > kOracleMaxRationalEdges)
        throw std::invalid_argument("exact_event_probability_rational: rational mode supports at most 6 edges");
    if (g.kappa.empty()) throw std::invalid_argument("exact_event_probability_rational: graph has no fixed constraints");
    const auto counts = ordering_counts(g, g.kappa, event);
    return evaluate_counts<Rational>(counts, t);
}

double exact_probability_over_constraints(const TinyGraph& g, double t, const GraphEvent& event) {
    check_time(t);
    g.validate();
    if (g.laws.empty()) throw std::invalid_argument("exact_probability_over_constraints: graph has no laws");
    const std::size_t n = g.num_vertices;
    std::vector<std::vector<std::uint8_t>> support(n);
    for (std::size_t v = 0; v < n; ++v) {
        const auto& law = g.laws[v];
        const double sum = std::accumulate(law.begin(), law.end(), 0.0);
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("exact_probability_over_constraints: law must sum to 1");
        for (std::size_t j = 0; j < law.size(); ++j) {
            if (law[j] < 0.0) throw std::invalid_argument("exact_probability_over_constraints: negative probability");
            if (law[j] > 0.0) support[v].push_back(static_cast<std::uint8_t>(j));
        }
    }
    std::vector<std::size_t> digit(n, 0);
    std::vector<std::uint8_t> kappa(n);
    double total = 0.0;
    for (;;) {
        double weight = 1.0;
        for (std::size_t v = 0; v < n; ++v) {
            kappa[v] = support[v][digit[v]];
            weight *= g.laws[v][kappa[v]];
        }
        total += weight * evaluate_counts<double>(ordering_counts(g, kappa, event), t);
        std::size_t v = 0;
        while (v < n && ++digit[v] == support[v].size()) digit[v++] = 0;
        if (v == n) break;
    }
    return total;
}

Estimate make_estimate(std::uint64_t successes, std::uint64_t n) {
    Estimate e;
    e.n = n;
    e.successes = successes;
    if (n == 0) return e;
    e.p_hat = static_cast<double>(successes) / static_cast<double>(n);
    e.se = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n));
    return e;
}

Estimate monte_carlo_event_probability(const TinyGraph& g, double t, const GraphEvent& event, std::uint64_t seed,
                                       std::uint64_t n, unsigned workers) {
    check_time(t);
    g.validate();
    if (g.kappa.empty() && g.laws.empty()) throw std::invalid_argument("monte_carlo: graph needs constraints or laws");
    std::vector<ConstraintLaw> laws;
    if (g.kappa.empty())
        for (const auto& law : g.laws) laws.emplace_back(law, static_cast<int>(law.size() / 2), law.size() % 2 == 1);

    const auto hits = map_replicates<std::uint8_t>(n, workers, [&](std::size_t i) -> std::uint8_t {
        const SeedSpec s{seed, static_cast<std::uint32_t>(i)};
        std::vector<double> clocks(g.edges.size());
        for (std::uint32_t e = 0; e < clocks.size(); ++e) {
            const std::uint32_t w[] = {e};
            clocks[e] = rng::uniform(s, Stream::GraphEdges, w);
        }
        std::vector<std::uint8_t> kappa = g.kappa;
        if (kappa.empty()) {
            kappa.resize(g.num_vertices);
            for (std::uint32_t v = 0; v < g.num_vertices; ++v) {
                const std::uint32_t w[] = {v};
                kappa[v] = laws[v].constraint_for(rng::uniform(s, Stream::GraphVertices, w));
            }
        }
        const auto open = evolve_graph(g.edges, clocks, kappa, g.num_vertices, t);
        return event(open) ? 1 : 0;
    });
    return make_estimate(static_cast<std::uint64_t>(std::count(hits.begin(), hits.end(), 1)), n);
}

TinyGraph parse_tiny_graph(std::string_view text) {
    TinyGraph g;
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<double> shared_law;
    bool have_vertices = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        if (key == "vertices") {
            if (!(ls >> g.num_vertices)) throw std::invalid_argument("tiny graph: bad vertex count");
            have_vertices = true;
        } else if (key == "edges") {
            std::string tok;
            while (ls >> tok) {
                const auto dash = tok.find('-');
                if (dash == std::string::npos) throw std::invalid_argument("tiny graph: edge must look like u-v");
                g.edges.push_back({static_cast<std::uint32_t>(std::stoul(tok.substr(0, dash))),
                                   static_cast<std::uint32_t>(std::stoul(tok.substr(dash + 1)))});
            }
        } else if (key == "constraints") {
            int k;
            while (ls >> k) {
                if (k < 0 || k > 255) throw std::invalid_argument("tiny graph: constraint out of range");
                g.kappa.push_back(static_cast<std::uint8_t>(k));
            }
        } else if (key == "law") {
            double r;
            while (ls >> r) shared_law.push_back(r);
        } else if (key == "name") {
            ls >> g.name;
        } else {
            throw std::invalid_argument("tiny graph: unknown key '" + key + "'");
        }
    }
    if (!have_vertices) throw std::invalid_argument("tiny graph: missing 'vertices' line");
    if (!shared_law.empty()) g.laws.assign(g.num_vertices, shared_law);
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------

namespace {

GraphEvent edge_open(std::size_t e) {
    return [e](std::span<const std::uint8_t> s) { return s[e] != 0; };
}

GraphEvent all_open() {
    return [](std::span<const std::uint8_t> s) { return std::all_of(s.begin(), s.end(), [](auto b) { return b != 0; }); };
}

GraphEvent open_count_at_least(std::size_t k) {
    return [k](std::span<const std::uint8_t> s) {
        return static_cast<std::size_t>(std::count(s.begin(), s.end(), 1)) >= k;
    };
}

GraphEvent degree_equals(std::vector<GraphEdge> edges, std::uint32_t v, int k) {
    return [edges = std::move(edges), v, k](std::span<const std::uint8_t> s) {
        int deg = 0;
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (s[e] && (edges[e].u == v || edges[e].v == v)) ++deg;
        return deg == k;
    };
}

GraphEvent connected(std::vector<GraphEdge> edges, std::size_t nv, std::vector<std::uint32_t> from,
                     std::vector<std::uint32_t> to) {
    return [=](std::span<const std::uint8_t> s) {
        DisjointSets ds(nv);
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (s[e]) ds.unite(edges[e].u, edges[e].v);
        for (auto a : from)
            for (auto b : to)
                if (ds.same(a, b)) return true;
        return false;
    };
}

TinyGraph make(std::string name, std::size_t nv, std::vector<GraphEdge> edges, std::vector<std::uint8_t> kappa) {
    TinyGraph g{std::move(name), nv, std::move(edges), std::move(kappa), {}};
    g.validate();
    return g;
}

}  // namespace

std::vector<OracleCase> builtin_oracle_cases() {
    std::vector<OracleCase> cases;

    cases.push_back({make("edge_k11", 2, {{0, 1}}, {1, 1}), "edge0_open", edge_open(0)});
    cases.push_back({make("edge_k03", 2, {{0, 1}}, {0, 3}), "edge0_open", edge_open(0)});
    // u - w - v with the middle vertex capped at one edge.
    const std::vector<GraphEdge> path3{{0, 1}, {1, 2}};
    cases.push_back({make("path3_mid1", 3, path3, {3, 1, 3}), "edge0_open", edge_open(0)});
    cases.push_back({make("path3_mid1", 3, path3, {3, 1, 3}), "all_open", all_open()});

    const std::vector<GraphEdge> path4{{0, 1}, {1, 2}, {2, 3}};
    cases.push_back({make("path4_k1221", 4, path4, {1, 2, 2, 1}), "edge1_open", edge_open(1)});

    const std::vector<GraphEdge> star3{{0, 1}, {0, 2}, {0, 3}};
    cases.push_back({make("star3_center2", 4, star3, {2, 1, 3, 0}), "at_least_2_open", open_count_at_least(2)});

    const std::vector<GraphEdge> triangle{{0, 1}, {1, 2}, {0, 2}};
    cases.push_back({make("triangle_k221", 3, triangle, {2, 2, 1}), "at_least_2_open", open_count_at_least(2)});

    const std::vector<GraphEdge> square{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    cases.push_back({make("square_k1212", 4, square, {1, 2, 1, 2}), "edge0_open", edge_open(0)});

    const std::vector<GraphEdge> k4{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    cases.push_back({make("k4_k3332", 4, k4, {3, 3, 3, 2}), "deg0_eq_3", degree_equals(k4, 0, 3)});

    // Plus shape: centre with four neighbours, as around a lattice vertex.
    const std::vector<GraphEdge> plus{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    cases.push_back({make("plus_center3", 5, plus, {3, 1, 2, 3, 1}), "deg0_eq_3", degree_equals(plus, 0, 3)});

    // 2 x 3 grid, vertices numbered row-major: 0 1 2 / 3 4 5.
    const std::vector<GraphEdge> grid{{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}};
    cases.push_back({make("grid2x3_k232232", 6, grid, {2, 3, 2, 2, 3, 2}), "left_right_connected",
                     connected(grid, 6, {0, 3}, {2, 5})});

    // Path with 8 edges and alternating caps.
    std::vector<GraphEdge> path9;
    for (std::uint32_t i = 0; i < 8; ++i) path9.push_back({i, i + 1});
    cases.push_back({make("path9_alt", 9, path9, {1, 2, 1, 2, 3, 2, 1, 2, 1}), "edge4_open", edge_open(4)});

    // 2 x 2 square plus a pendant edge; every constraint value 0..3 appears.
    const std::vector<GraphEdge> kite{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {2, 4}};
    cases.push_back({make("kite_k03213", 5, kite, {0, 3, 2, 1, 3}), "edge4_open", edge_open(4)});

    return cases;
}

}  // namespace cdp
