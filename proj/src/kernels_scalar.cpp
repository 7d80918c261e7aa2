#include "cdp/kernels.hpp"

namespace cdp::detail {

void hash_uniforms_scalar(const rng::PrefixState& prefix, std::int32_t first, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = rng::uniform_last(prefix, static_cast<std::uint32_t>(first + static_cast<std::int32_t>(i)));
}

void constraints_from_uniforms_scalar(std::span<const double> x, std::span<const double> cumulative,
                                      std::uint8_t top, std::span<std::uint8_t> out) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= 1.0) {
            out[i] = top;
            continue;
        }
        std::uint8_t k = 0;
        for (double c : cumulative) k += static_cast<std::uint8_t>(c <= x[i]);
        out[i] = k;
    }
}

void open_mask_scalar(std::span<const double> clocks, std::span<const std::uint8_t> opened, double t,
                      std::span<std::uint8_t> out) {
    for (std::size_t i = 0; i < clocks.size(); ++i)
        out[i] = static_cast<std::uint8_t>(opened[i] != 0 && clocks[i] <= t);
}

}  // namespace cdp::detail
