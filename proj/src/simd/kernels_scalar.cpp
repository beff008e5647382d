#include "kte/simd.hpp"

namespace kte::simd::scalar {

void min_plus(double* out, const double* src, double w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = src[i] + w;
        if (v < out[i]) out[i] = v;
    }
}

ArgMax max_affine_1d(const double* x, const double* c, std::size_t n, double y) {
    ArgMax best{y * x[0] - c[0], 0};
    for (std::size_t j = 1; j < n; ++j) {
        double v = y * x[j] - c[j];
        if (v > best.value) best = {v, j};
    }
    return best;
}

ArgMax max_affine_2d(const double* x0, const double* x1, const double* c, std::size_t n, double y0, double y1) {
    ArgMax best{(y0 * x0[0] + y1 * x1[0]) - c[0], 0};
    for (std::size_t j = 1; j < n; ++j) {
        double v = (y0 * x0[j] + y1 * x1[j]) - c[j];
        if (v > best.value) best = {v, j};
    }
    return best;
}

}  // namespace kte::simd::scalar
