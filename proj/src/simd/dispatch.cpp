#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kte/error.hpp"
#include "kte/simd.hpp"

namespace kte::simd {

namespace {

using Table = Kernels;

constexpr Table kScalar{scalar::min_plus, scalar::max_affine_1d, scalar::max_affine_2d};
#if defined(KTE_HAVE_AVX2)
constexpr Table kAvx2{avx2::min_plus, avx2::max_affine_1d, avx2::max_affine_2d};
#endif
#if defined(KTE_HAVE_NEON)
constexpr Table kNeon{neon::min_plus, neon::max_affine_1d, neon::max_affine_2d};
#endif

const Table* table_for(Backend b) noexcept {
    switch (b) {
#if defined(KTE_HAVE_AVX2)
        case Backend::Avx2: return &kAvx2;
#endif
#if defined(KTE_HAVE_NEON)
        case Backend::Neon: return &kNeon;
#endif
        default: return &kScalar;
    }
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> b{detect()};
    return b;
}

}  // namespace

const char* name(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "scalar";
}

bool available(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return true;
        case Backend::Avx2:
#if defined(KTE_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(KTE_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend detect() noexcept {
    if (const char* env = std::getenv("KTE_SIMD")) {
        for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon})
            if (std::strcmp(env, name(b)) == 0 && available(b)) return b;
    }
    if (available(Backend::Avx2)) return Backend::Avx2;
    if (available(Backend::Neon)) return Backend::Neon;
    return Backend::Scalar;
}

const Kernels* kernels(Backend b) noexcept { return available(b) ? table_for(b) : nullptr; }

Backend active() noexcept { return current().load(std::memory_order_relaxed); }

void select(Backend b) {
    if (!available(b)) fail(ErrorCode::InvalidArgument, std::string("SIMD backend unavailable: ") + name(b));
    current().store(b, std::memory_order_relaxed);
}

void min_plus(double* out, const double* src, double w, std::size_t n) {
    table_for(active())->min_plus(out, src, w, n);
}

ArgMax max_affine_1d(const double* x, const double* c, std::size_t n, double y) {
    return table_for(active())->max_affine_1d(x, c, n, y);
}

ArgMax max_affine_2d(const double* x0, const double* x1, const double* c, std::size_t n, double y0, double y1) {
    return table_for(active())->max_affine_2d(x0, x1, c, n, y0, y1);
}

}  // namespace kte::simd
