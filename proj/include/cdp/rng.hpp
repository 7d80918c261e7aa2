#pragma once

// Counter-based uniforms.
//
// Every uniform is a pure function of (master seed, replicate, stream tag,
// entity words). Two independent 32-bit murmur3-style lanes are combined into
// a 52-bit mantissa and mapped to (0, 1]. Only 32-bit multiplies, rotates and
// xors are used so the AVX2 kernel reproduces the scalar path bit for bit.

#include <cstdint>
#include <span>

namespace cdp {

enum class Stream : std::uint32_t {
    VertexUniforms = 0x5645'5254,  // "VERT"
    EdgeClocks = 0x434C'4F43,      // "CLOC"
    // Independent streams used when a field is resampled outside a region.
    VertexUniformsFresh = 0x5645'5246,
    EdgeClocksFresh = 0x434C'4F46,
    // Monte Carlo on tiny graphs (vertex / edge ids rather than coordinates).
    GraphVertices = 0x4756'5254,
    GraphEdges = 0x4745'4447,
};

/// Word used in place of an axis when hashing a vertex.
inline constexpr std::uint32_t kVertexAxisWord = 0xFFFF'FFFFu;

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint32_t replicate = 0;

    SeedSpec with_replicate(std::uint32_t r) const { return {master_seed, r}; }
};

namespace rng {

inline constexpr std::uint32_t kLaneSeedA = 0x9747'B28Cu;
inline constexpr std::uint32_t kLaneSeedB = 0x5BD1'E995u;

constexpr std::uint32_t rotl(std::uint32_t x, int r) { return (x << r) | (x >> (32 - r)); }

constexpr std::uint32_t absorb(std::uint32_t h, std::uint32_t k) {
    k *= 0xCC9E'2D51u;
    k = rotl(k, 15);
    k *= 0x1B87'3593u;
    h ^= k;
    h = rotl(h, 13);
    return h * 5u + 0xE654'6B64u;
}

constexpr std::uint32_t finalize(std::uint32_t h, std::uint32_t nwords) {
    h ^= nwords * 4u;
    h ^= h >> 16;
    h *= 0x85EB'CA6Bu;
    h ^= h >> 13;
    h *= 0xC2B2'AE35u;
    h ^= h >> 16;
    return h;
}

/// Two lanes after absorbing a common word prefix.
struct PrefixState {
    std::uint32_t a = kLaneSeedA;
    std::uint32_t b = kLaneSeedB;
    std::uint32_t nwords = 0;

    constexpr PrefixState& push(std::uint32_t w) {
        a = absorb(a, w);
        b = absorb(b, w ^ 0xA5A5'A5A5u);
        ++nwords;
        return *this;
    }
};

/// Map the two finalized lanes to a double in (0, 1]. The 52 high bits
/// (a:32 | b>>12:20) become the mantissa of a value in [1, 2), subtracted from 2.
double to_unit(std::uint32_t a, std::uint32_t b);

/// Absorb the final word and produce the uniform.
double uniform_last(const PrefixState& prefix, std::uint32_t last);

/// Prefix shared by every entity of one (seed, stream).
PrefixState stream_prefix(const SeedSpec& seed, Stream stream);

/// Uniform of one entity described by `words` (axis word then coordinates).
double uniform(const SeedSpec& seed, Stream stream, std::span<const std::uint32_t> words);

}  // namespace rng
}  // namespace cdp
