#include <arm_neon.h>

#include "kte/simd.hpp"

namespace kte::simd::neon {

namespace {

ArgMax reduce(float64x2_t best, uint64x2_t best_idx) {
    double v[2];
    std::uint64_t k[2];
    vst1q_f64(v, best);
    vst1q_u64(k, best_idx);
    ArgMax r{v[0], static_cast<std::size_t>(k[0])};
    if (v[1] > r.value || (v[1] == r.value && k[1] < r.index)) r = {v[1], static_cast<std::size_t>(k[1])};
    return r;
}

}  // namespace

void min_plus(double* out, const double* src, double w, std::size_t n) {
    const float64x2_t vw = vdupq_n_f64(w);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t s = vaddq_f64(vld1q_f64(src + i), vw);
        float64x2_t o = vld1q_f64(out + i);
        vst1q_f64(out + i, vbslq_f64(vcltq_f64(s, o), s, o));
    }
    for (; i < n; ++i) {
        double v = src[i] + w;
        if (v < out[i]) out[i] = v;
    }
}

ArgMax max_affine_1d(const double* x, const double* c, std::size_t n, double y) {
    if (n < 4) return scalar::max_affine_1d(x, c, n, y);
    const float64x2_t vy = vdupq_n_f64(y);
    float64x2_t best = vsubq_f64(vmulq_f64(vy, vld1q_f64(x)), vld1q_f64(c));
    const std::uint64_t init[2] = {0, 1};
    uint64x2_t best_idx = vld1q_u64(init);
    uint64x2_t idx = best_idx;
    const uint64x2_t step = vdupq_n_u64(2);
    std::size_t j = 2;
    for (; j + 2 <= n; j += 2) {
        idx = vaddq_u64(idx, step);
        float64x2_t v = vsubq_f64(vmulq_f64(vy, vld1q_f64(x + j)), vld1q_f64(c + j));
        uint64x2_t gt = vcgtq_f64(v, best);
        best = vbslq_f64(gt, v, best);
        best_idx = vbslq_u64(gt, idx, best_idx);
    }
    ArgMax r = reduce(best, best_idx);
    for (; j < n; ++j) {
        double v = y * x[j] - c[j];
        if (v > r.value) r = {v, j};
    }
    return r;
}

ArgMax max_affine_2d(const double* x0, const double* x1, const double* c, std::size_t n, double y0, double y1) {
    if (n < 4) return scalar::max_affine_2d(x0, x1, c, n, y0, y1);
    const float64x2_t vy0 = vdupq_n_f64(y0);
    const float64x2_t vy1 = vdupq_n_f64(y1);
    auto eval = [&](std::size_t j) {
        float64x2_t a = vmulq_f64(vy0, vld1q_f64(x0 + j));
        float64x2_t b = vmulq_f64(vy1, vld1q_f64(x1 + j));
        return vsubq_f64(vaddq_f64(a, b), vld1q_f64(c + j));
    };
    float64x2_t best = eval(0);
    const std::uint64_t init[2] = {0, 1};
    uint64x2_t best_idx = vld1q_u64(init);
    uint64x2_t idx = best_idx;
    const uint64x2_t step = vdupq_n_u64(2);
    std::size_t j = 2;
    for (; j + 2 <= n; j += 2) {
        idx = vaddq_u64(idx, step);
        float64x2_t v = eval(j);
        uint64x2_t gt = vcgtq_f64(v, best);
        best = vbslq_f64(gt, v, best);
        best_idx = vbslq_u64(gt, idx, best_idx);
    }
    ArgMax r = reduce(best, best_idx);
    for (; j < n; ++j) {
        double v = (y0 * x0[j] + y1 * x1[j]) - c[j];
        if (v > r.value) r = {v, j};
    }
    return r;
}

}  // namespace kte::simd::neon
