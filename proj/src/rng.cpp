#include "cdp/rng.hpp"

#include <bit>

namespace cdp::rng {

double to_unit(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t mantissa = (static_cast<std::uint64_t>(a) << 20) | (b >> 12);
    const double in_one_two = std::bit_cast<double>(mantissa | 0x3FF0'0000'0000'0000ull);
    return 2.0 - in_one_two;
}

double uniform_last(const PrefixState& prefix, std::uint32_t last) {
    PrefixState s = prefix;
    s.push(last);
    return to_unit(finalize(s.a, s.nwords), finalize(s.b, s.nwords));
}

PrefixState stream_prefix(const SeedSpec& seed, Stream stream) {
    PrefixState s;
    s.push(static_cast<std::uint32_t>(seed.master_seed));
    s.push(static_cast<std::uint32_t>(seed.master_seed >> 32));
    s.push(seed.replicate);
    s.push(static_cast<std::uint32_t>(stream));
    return s;
}

double uniform(const SeedSpec& seed, Stream stream, std::span<const std::uint32_t> words) {
    PrefixState s = stream_prefix(seed, stream);
    if (words.empty()) return to_unit(finalize(s.a, s.nwords), finalize(s.b, s.nwords));
    for (std::size_t i = 0; i + 1 < words.size(); ++i) s.push(words[i]);
    return uniform_last(s, words.back());
}

}  // namespace cdp::rng
