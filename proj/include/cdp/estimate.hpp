#pragma once

#include <cstdint>

namespace cdp {

/// Binomial proportion with its plug-in standard error.
struct Estimate {
    std::uint64_t n = 0;
    std::uint64_t successes = 0;
    double p_hat = 0.0;
    double se = 0.0;
};

Estimate make_estimate(std::uint64_t successes, std::uint64_t n);

}  // namespace cdp
