#pragma once

// Inner loops of the grid algorithms, with a scalar reference and vector
// variants picked at runtime. All variants return bit-identical results.

#include <cstddef>

namespace kte::simd {

enum class Backend { Scalar, Avx2, Neon };

const char* name(Backend b) noexcept;
bool available(Backend b) noexcept;
Backend active() noexcept;
// Throws InvalidArgument when the backend is not usable on this machine.
void select(Backend b);
// Best available backend, honouring KTE_SIMD=scalar|avx2|neon when set.
Backend detect() noexcept;

struct ArgMax {
    double value;
    std::size_t index;
};

// out[i] = min(out[i], src[i] + w)
void min_plus(double* out, const double* src, double w, std::size_t n);

// max_j (y * x[j] - c[j]); first maximizing index wins. n >= 1.
ArgMax max_affine_1d(const double* x, const double* c, std::size_t n, double y);

// max_j (y0 * x0[j] + y1 * x1[j] - c[j]); first maximizing index wins. n >= 1.
ArgMax max_affine_2d(const double* x0, const double* x1, const double* c, std::size_t n, double y0, double y1);

struct Kernels {
    void (*min_plus)(double*, const double*, double, std::size_t);
    ArgMax (*max_affine_1d)(const double*, const double*, std::size_t, double);
    ArgMax (*max_affine_2d)(const double*, const double*, const double*, std::size_t, double, double);
};

// Kernel table of one backend; nullptr when it is not usable here.
const Kernels* kernels(Backend b) noexcept;

namespace scalar {
void min_plus(double* out, const double* src, double w, std::size_t n);
ArgMax max_affine_1d(const double* x, const double* c, std::size_t n, double y);
ArgMax max_affine_2d(const double* x0, const double* x1, const double* c, std::size_t n, double y0, double y1);
}  // namespace scalar

namespace avx2 {
void min_plus(double* out, const double* src, double w, std::size_t n);
ArgMax max_affine_1d(const double* x, const double* c, std::size_t n, double y);
ArgMax max_affine_2d(const double* x0, const double* x1, const double* c, std::size_t n, double y0, double y1);
}  // namespace avx2

namespace neon {
void min_plus(double* out, const double* src, double w, std::size_t n);
ArgMax max_affine_1d(const double* x, const double* c, std::size_t n, double y);
ArgMax max_affine_2d(const double* x0, const double* x1, const double* c, std::size_t n, double y0, double y1);
}  // namespace neon

}  // namespace kte::simd
