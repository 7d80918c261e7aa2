#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The active table is chosen once at startup from the CPU features; setting
// CDP_ISA=scalar in the environment forces the reference path. Every variant
// must agree with the scalar one bit for bit (see tests/test_kernels.cpp).

#include <cstdint>
#include <span>

#include "cdp/rng.hpp"

namespace cdp {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    const char* name;

    /// out[i] = uniform of the entity whose last hashed word is first + i.
    void (*hash_uniforms)(const rng::PrefixState& prefix, std::int32_t first, std::span<double> out);

    /// out[i] = #{j : cumulative[j] <= x[i]}, or `top` when x[i] >= 1.
    void (*constraints_from_uniforms)(std::span<const double> x, std::span<const double> cumulative,
                                      std::uint8_t top, std::span<std::uint8_t> out);

    /// out[i] = opened[i] && clocks[i] <= t.
    void (*open_mask)(std::span<const double> clocks, std::span<const std::uint8_t> opened, double t,
                      std::span<std::uint8_t> out);
};

const KernelTable& scalar_kernels();
/// nullptr when AVX2 was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

const KernelTable& kernels();
void select_isa(Isa isa);

namespace detail {
void hash_uniforms_scalar(const rng::PrefixState& prefix, std::int32_t first, std::span<double> out);
void constraints_from_uniforms_scalar(std::span<const double> x, std::span<const double> cumulative,
                                      std::uint8_t top, std::span<std::uint8_t> out);
void open_mask_scalar(std::span<const double> clocks, std::span<const std::uint8_t> opened, double t,
                      std::span<std::uint8_t> out);
#if defined(CDP_BUILD_AVX2)
void hash_uniforms_avx2(const rng::PrefixState& prefix, std::int32_t first, std::span<double> out);
void constraints_from_uniforms_avx2(std::span<const double> x, std::span<const double> cumulative,
                                    std::uint8_t top, std::span<std::uint8_t> out);
void open_mask_avx2(std::span<const double> clocks, std::span<const std::uint8_t> opened, double t,
                    std::span<std::uint8_t> out);
#endif
}  // namespace detail

}  // namespace cdp
