#include "cdp/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cdp/kernels.hpp"

namespace cdp {

ConstraintLaw::ConstraintLaw(std::vector<double> rho, int dim, bool validation_mode)
    : dim_(dim), validation_mode_(validation_mode), rho_(std::move(rho)) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("ConstraintLaw: dimension must be in [1, 4]");
    const std::size_t expected = static_cast<std::size_t>(2 * dim) + (validation_mode ? 1 : 0);
    if (rho_.size() != expected)
        throw std::invalid_argument("ConstraintLaw: expected " + std::to_string(expected) + " probabilities, got " +
                                    std::to_string(rho_.size()));
    double sum = 0.0;
    for (double r : rho_) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("ConstraintLaw: negative or non-finite entry");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("ConstraintLaw: probabilities must sum to 1");

    for (std::size_t j = 0; j < rho_.size(); ++j)
        if (rho_[j] > 0.0) top_ = static_cast<std::uint8_t>(j);
    cumulative_.resize(rho_.size());
    double run = 0.0;
    for (std::size_t j = 0; j < rho_.size(); ++j) {
        run += rho_[j];
        cumulative_[j] = j >= top_ ? 1.0 : std::min(run, 1.0);
    }
}

ConstraintLaw ConstraintLaw::unconstrained(int dim) {
    std::vector<double> rho(static_cast<std::size_t>(2 * dim + 1), 0.0);
    rho.back() = 1.0;
    return ConstraintLaw(std::move(rho), dim, true);
}

ConstraintLaw ConstraintLaw::point_mass(int j, int dim) {
    if (j < 0 || j >= 2 * dim) throw std::invalid_argument("ConstraintLaw::point_mass: value out of range");
    std::vector<double> rho(static_cast<std::size_t>(2 * dim), 0.0);
    rho[static_cast<std::size_t>(j)] = 1.0;
    return ConstraintLaw(std::move(rho), dim);
}

std::uint8_t ConstraintLaw::constraint_for(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("constraint_for: x must lie in [0, 1]");
    if (x >= 1.0) return top_;
    std::uint8_t k = 0;
    for (double c : cumulative_) k += static_cast<std::uint8_t>(c <= x);
    return k;
}

double ConstraintLaw::cumulative_distance(const ConstraintLaw& other) const {
    if (other.cumulative_.size() != cumulative_.size())
        throw std::invalid_argument("cumulative_distance: laws of different size");
    double m = 0.0;
    for (std::size_t j = 0; j < cumulative_.size(); ++j) m = std::max(m, std::abs(cumulative_[j] - other.cumulative_[j]));
    return m;
}

std::uint8_t constraint_from_uniform(double x, const ConstraintLaw& law) { return law.constraint_for(x); }

// ---------------------------------------------------------------------------

namespace {

// Hash prefix for the row of `window` whose leading coordinates are those of
// `row_start`; the last coordinate is the varying word.
rng::PrefixState row_prefix(const SeedSpec& seed, Stream stream, std::uint32_t axis_word, const Point& row_start) {
    rng::PrefixState s = rng::stream_prefix(seed, stream);
    s.push(axis_word);
    for (int a = 0; a + 1 < row_start.dim; ++a) s.push(static_cast<std::uint32_t>(row_start[a]));
    return s;
}

template <class RowFn>
void for_each_row(const Box& window, RowFn&& fn) {
    const int d = window.dim();
    const std::size_t row_len = static_cast<std::size_t>(window.extent(d - 1));
    for (std::size_t start = 0; start < window.num_vertices(); start += row_len) fn(start, window.point(start), row_len);
}

std::vector<std::uint32_t> entity_words(std::uint32_t axis_word, const Point& p) {
    std::vector<std::uint32_t> w;
    w.reserve(static_cast<std::size_t>(p.dim) + 1);
    w.push_back(axis_word);
    for (int a = 0; a < p.dim; ++a) w.push_back(static_cast<std::uint32_t>(p[a]));
    return w;
}

}  // namespace

std::vector<double> sample_vertex_uniforms(const SeedSpec& seed, const Box& window, Stream stream) {
    std::vector<double> x(window.num_vertices());
    const auto& k = kernels();
    const int d = window.dim();
    for_each_row(window, [&](std::size_t start, const Point& p, std::size_t len) {
        k.hash_uniforms(row_prefix(seed, stream, kVertexAxisWord, p), p[d - 1],
                        std::span<double>(x).subspan(start, len));
    });
    return x;
}

std::vector<double> sample_clocks(const SeedSpec& seed, const Box& window, Stream stream) {
    const int d = window.dim();
    const auto ud = static_cast<std::size_t>(d);
    std::vector<double> clock(window.num_edge_slots(), std::numeric_limits<double>::infinity());
    std::vector<double> row;
    const auto& k = kernels();
    for_each_row(window, [&](std::size_t start, const Point& p, std::size_t len) {
        row.resize(len);
        for (int axis = 0; axis < d; ++axis) {
            if (axis < d - 1 && p[axis] == window.hi()[axis]) continue;  // no edges leave the box along this axis
            k.hash_uniforms(row_prefix(seed, stream, static_cast<std::uint32_t>(axis), p), p[d - 1], row);
            const std::size_t usable = axis == d - 1 ? len - 1 : len;
            for (std::size_t i = 0; i < usable; ++i) clock[(start + i) * ud + static_cast<std::size_t>(axis)] = row[i];
        }
    });
    return clock;
}

double vertex_uniform(const SeedSpec& seed, const Point& p, Stream stream) {
    return rng::uniform(seed, stream, entity_words(kVertexAxisWord, p));
}

double edge_clock(const SeedSpec& seed, const Edge& e, Stream stream) {
    return rng::uniform(seed, stream, entity_words(static_cast<std::uint32_t>(e.axis), e.base));
}

std::vector<std::uint8_t> constraints_from_uniforms(std::span<const double> x, const ConstraintLaw& law) {
    std::vector<std::uint8_t> kappa(x.size());
    kernels().constraints_from_uniforms(x, law.cumulative(), law.top(), kappa);
    return kappa;
}

EnvironmentField sample_environment(const SeedSpec& seed, const Box& window, const ConstraintLaw& law) {
    if (law.dim() != window.dim()) throw DimensionMismatch("sample_environment: law and window dimensions differ");
    EnvironmentField f;
    f.window = window;
    f.x = sample_vertex_uniforms(seed, window);
    f.kappa = constraints_from_uniforms(f.x, law);
    f.clock = sample_clocks(seed, window);
    return f;
}

EnvironmentField resample_outside(const EnvironmentField& base, const SeedSpec& seed, const ConstraintLaw& law,
                                  std::span<const std::uint8_t> keep_vertex, std::span<const std::uint8_t> keep_edge) {
    if (keep_vertex.size() != base.x.size() || keep_edge.size() != base.clock.size())
        throw std::invalid_argument("resample_outside: mask sizes do not match the window");
    EnvironmentField f;
    f.window = base.window;
    f.x = sample_vertex_uniforms(seed, base.window, Stream::VertexUniformsFresh);
    f.clock = sample_clocks(seed, base.window, Stream::EdgeClocksFresh);
    for (std::size_t v = 0; v < f.x.size(); ++v)
        if (keep_vertex[v]) f.x[v] = base.x[v];
    for (std::size_t e = 0; e < f.clock.size(); ++e)
        if (keep_edge[e]) f.clock[e] = base.clock[e];
    f.kappa = constraints_from_uniforms(f.x, law);
    return f;
}

}  // namespace cdp
