#include "cdp/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

namespace cdp {
namespace {

constexpr KernelTable kScalar{Isa::Scalar, "scalar", &detail::hash_uniforms_scalar,
                              &detail::constraints_from_uniforms_scalar, &detail::open_mask_scalar};

#if defined(CDP_BUILD_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, "avx2", &detail::hash_uniforms_avx2,
                            &detail::constraints_from_uniforms_avx2, &detail::open_mask_avx2};
#endif

bool cpu_has_avx2() {
#if defined(CDP_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable* pick_default() {
    if (const char* env = std::getenv("CDP_ISA"); env && std::string_view(env) == "scalar") return &kScalar;
    if (const KernelTable* k = avx2_kernels()) return k;
    return &kScalar;
}

std::atomic<const KernelTable*>& active() {
    static std::atomic<const KernelTable*> table{pick_default()};
    return table;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* avx2_kernels() {
#if defined(CDP_BUILD_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& kernels() { return *active().load(std::memory_order_relaxed); }

void select_isa(Isa isa) {
    if (isa == Isa::Scalar) {
        active().store(&kScalar);
        return;
    }
    const KernelTable* k = avx2_kernels();
    if (!k) throw std::runtime_error("select_isa: AVX2 kernels are not available on this machine");
    active().store(k);
}

}  // namespace cdp
