#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "cdp/environment.hpp"
#include "cdp/kernels.hpp"

using namespace cdp;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    return true;
}

struct IsaGuard {
    Isa saved = kernels().isa;
    ~IsaGuard() { select_isa(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar hash matches the single-entity generator") {
    const SeedSpec seed{12345, 6};
    auto prefix = rng::stream_prefix(seed, Stream::EdgeClocks);
    prefix.push(1).push(static_cast<std::uint32_t>(-3));
    std::vector<double> out(37);
    detail::hash_uniforms_scalar(prefix, -10, out);
    for (int i = 0; i < 37; ++i) {
        const std::uint32_t words[] = {1, static_cast<std::uint32_t>(-3), static_cast<std::uint32_t>(-10 + i)};
        CHECK(out[static_cast<std::size_t>(i)] == rng::uniform(seed, Stream::EdgeClocks, words));
        CHECK(out[static_cast<std::size_t>(i)] > 0.0);
        CHECK(out[static_cast<std::size_t>(i)] <= 1.0);
    }
}

TEST_CASE("AVX2 kernels agree with the scalar reference bit for bit") {
    const KernelTable* v = avx2_kernels();
    if (!v) {
        MESSAGE("AVX2 not available; equivalence test skipped");
        return;
    }
    const KernelTable& s = scalar_kernels();
    std::mt19937_64 gen(99);

    for (int trial = 0; trial < 200; ++trial) {
        const SeedSpec seed{gen(), static_cast<std::uint32_t>(gen())};
        auto prefix = rng::stream_prefix(seed, Stream::VertexUniforms);
        prefix.push(static_cast<std::uint32_t>(gen()));
        const auto len = static_cast<std::size_t>(gen() % 70);
        const auto first = static_cast<std::int32_t>(gen() % 2001) - 1000;
        std::vector<double> a(len), b(len);
        s.hash_uniforms(prefix, first, a);
        v->hash_uniforms(prefix, first, b);
        CHECK(same_bits(a, b));

        std::vector<double> rho{0.1, 0.0, 0.3, 0.6};
        if (trial % 3 == 0) rho = {0.0, 0.0, 1.0, 0.0};
        const ConstraintLaw law(rho, 2);
        std::vector<double> x(a);
        if (!x.empty()) x[0] = 1.0;
        if (x.size() > 1) x[1] = 0.4;  // exactly on a cumulative boundary
        if (x.size() > 2) x[2] = 0.1;
        std::vector<std::uint8_t> ka(x.size()), kb(x.size());
        s.constraints_from_uniforms(x, law.cumulative(), law.top(), ka);
        v->constraints_from_uniforms(x, law.cumulative(), law.top(), kb);
        CHECK(ka == kb);

        std::vector<std::uint8_t> opened(len);
        for (auto& o : opened) o = static_cast<std::uint8_t>(gen() & 1);
        if (len > 3) a[3] = std::numeric_limits<double>::infinity();
        const double t = static_cast<double>(gen() % 1000) / 999.0;
        std::vector<std::uint8_t> ma(len), mb(len);
        s.open_mask(a, opened, t, ma);
        v->open_mask(a, opened, t, mb);
        CHECK(ma == mb);
    }
}

TEST_CASE("whole-field sampling is identical under both ISAs") {
    if (!avx2_kernels()) return;
    IsaGuard guard;
    const Box w(Point{-7, -3}, Point{21, 30});
    const SeedSpec seed{77, 3};
    const ConstraintLaw law({0.1, 0.2, 0.3, 0.4}, 2);
    select_isa(Isa::Scalar);
    const auto f1 = sample_environment(seed, w, law);
    select_isa(Isa::Avx2);
    const auto f2 = sample_environment(seed, w, law);
    CHECK(same_bits(f1.x, f2.x));
    CHECK(same_bits(f1.clock, f2.clock));
    CHECK(f1.kappa == f2.kappa);
}

TEST_CASE("runtime selection") {
    IsaGuard guard;
    select_isa(Isa::Scalar);
    CHECK(kernels().isa == Isa::Scalar);
    if (avx2_kernels()) {
        select_isa(Isa::Avx2);
        CHECK(kernels().isa == Isa::Avx2);
    } else {
        CHECK_THROWS(select_isa(Isa::Avx2));
    }
}

}
