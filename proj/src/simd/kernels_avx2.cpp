#include <immintrin.h>

#include "kte/simd.hpp"

namespace kte::simd::avx2 {

namespace {

// Lane-wise running maxima carry the first index that reached them; the
// horizontal pass prefers the larger value, then the smaller index.
ArgMax reduce(__m256d best, __m256i best_idx) {
    alignas(32) double v[4];
    alignas(32) long long k[4];
    _mm256_store_pd(v, best);
    _mm256_store_si256(reinterpret_cast<__m256i*>(k), best_idx);
    ArgMax r{v[0], static_cast<std::size_t>(k[0])};
    for (int l = 1; l < 4; ++l) {
        auto idx = static_cast<std::size_t>(k[l]);
        if (v[l] > r.value || (v[l] == r.value && idx < r.index)) r = {v[l], idx};
    }
    return r;
}

}  // namespace

void min_plus(double* out, const double* src, double w, std::size_t n) {
    const __m256d vw = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d s = _mm256_add_pd(_mm256_loadu_pd(src + i), vw);
        __m256d o = _mm256_loadu_pd(out + i);
        _mm256_storeu_pd(out + i, _mm256_min_pd(s, o));
    }
    for (; i < n; ++i) {
        double v = src[i] + w;
        if (v < out[i]) out[i] = v;
    }
}

ArgMax max_affine_1d(const double* x, const double* c, std::size_t n, double y) {
    if (n < 8) return scalar::max_affine_1d(x, c, n, y);
    const __m256d vy = _mm256_set1_pd(y);
    __m256d best = _mm256_sub_pd(_mm256_mul_pd(vy, _mm256_loadu_pd(x)), _mm256_loadu_pd(c));
    __m256i best_idx = _mm256_setr_epi64x(0, 1, 2, 3);
    __m256i idx = best_idx;
    const __m256i step = _mm256_set1_epi64x(4);
    std::size_t j = 4;
    for (; j + 4 <= n; j += 4) {
        idx = _mm256_add_epi64(idx, step);
        __m256d v = _mm256_sub_pd(_mm256_mul_pd(vy, _mm256_loadu_pd(x + j)), _mm256_loadu_pd(c + j));
        __m256d gt = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
        best = _mm256_blendv_pd(best, v, gt);
        best_idx = _mm256_castpd_si256(
            _mm256_blendv_pd(_mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(idx), gt));
    }
    ArgMax r = reduce(best, best_idx);
    for (; j < n; ++j) {
        double v = y * x[j] - c[j];
        if (v > r.value) r = {v, j};
    }
    return r;
}

ArgMax max_affine_2d(const double* x0, const double* x1, const double* c, std::size_t n, double y0, double y1) {
    if (n < 8) return scalar::max_affine_2d(x0, x1, c, n, y0, y1);
    const __m256d vy0 = _mm256_set1_pd(y0);
    const __m256d vy1 = _mm256_set1_pd(y1);
    auto eval = [&](std::size_t j) {
        __m256d a = _mm256_mul_pd(vy0, _mm256_loadu_pd(x0 + j));
        __m256d b = _mm256_mul_pd(vy1, _mm256_loadu_pd(x1 + j));
        return _mm256_sub_pd(_mm256_add_pd(a, b), _mm256_loadu_pd(c + j));
    };
    __m256d best = eval(0);
    __m256i best_idx = _mm256_setr_epi64x(0, 1, 2, 3);
    __m256i idx = best_idx;
    const __m256i step = _mm256_set1_epi64x(4);
    std::size_t j = 4;
    for (; j + 4 <= n; j += 4) {
        idx = _mm256_add_epi64(idx, step);
        __m256d v = eval(j);
        __m256d gt = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
        best = _mm256_blendv_pd(best, v, gt);
        best_idx = _mm256_castpd_si256(
            _mm256_blendv_pd(_mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(idx), gt));
    }
    ArgMax r = reduce(best, best_idx);
    for (; j < n; ++j) {
        double v = (y0 * x0[j] + y1 * x1[j]) - c[j];
        if (v > r.value) r = {v, j};
    }
    return r;
}

}  // namespace kte::simd::avx2
