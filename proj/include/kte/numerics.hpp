#pragma once

// Scalar root finding, 1D optimization and quadrature shared by the modules.

#include <cmath>
#include <limits>
#include <utility>

namespace kte::num {

inline constexpr double kInvPhi = 0.6180339887498948482;

// Maximizer of a unimodal f on [a, b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol, int max_iter = 300) {
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Smallest x in [lo, hi] with g(x) >= 0 for nondecreasing g, assuming g(lo) < 0 <= g(hi).
template <class G>
double bisect_increasing(G&& g, double lo, double hi, double rel_tol, int max_iter = 400) {
    for (int it = 0; it < max_iter; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= rel_tol * std::fabs(hi)) break;
        if (g(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth, bool& ok) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0) {
        ok = false;
        return left + right + delta / 15.0;
    }
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok);
}

}  // namespace detail

struct QuadResult {
    double value;
    bool converged;
};

template <class F>
QuadResult adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    bool ok = true;
    double v = detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth, ok);
    return {v, ok};
}

// 8-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss_legendre8(F&& f, double a, double b) {
    static constexpr double x[4] = {0.1834346424956498049, 0.5255324099163289858, 0.7966664774136267396,
                                    0.9602898564975362317};
    static constexpr double w[4] = {0.3626837833783619830, 0.3137066458778872873, 0.2223810344533744706,
                                    0.1012285362903762591};
    double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += w[i] * (f(c - r * x[i]) + f(c + r * x[i]));
    return r * s;
}

inline bool close_rel(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::fmax(std::fabs(a), std::fabs(b));
}

}  // namespace kte::num
