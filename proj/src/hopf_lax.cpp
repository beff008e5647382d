#include "kte/hopf_lax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kte/error.hpp"
#include "kte/simd.hpp"

namespace kte {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Offset {
    long k0;
    long k1;
    double w;
};

std::vector<Offset> kernel(const Grid& g, const CostSpec& spec, double t, double r) {
    std::vector<Offset> out;
    const double slack = 1.0 + 1e-12;
    const long K0 = static_cast<long>(std::floor(r / g.h[0] * slack));
    const long K1 = g.dim == 2 ? static_cast<long>(std::floor(r / g.h[1] * slack)) : 0;
    std::array<double, 2> z{0.0, 0.0};
    for (long a = -K0; a <= K0; ++a)
        for (long b = -K1; b <= K1; ++b) {
            double d0 = static_cast<double>(a) * g.h[0];
            double d1 = static_cast<double>(b) * g.h[1];
            double d2 = g.dim == 2 ? d0 * d0 + d1 * d1 : d0 * d0;
            if (d2 > r * r * slack * slack) continue;
            z = {d0 / t, d1 / t};
            out.push_back({a, b, t * spec.value(std::span<const double>(z.data(), g.dim))});
        }
    return out;
}

}  // namespace

double window_radius(const GridField& f, const CostSpec& spec, double t) {
    require(t > 0.0 && std::isfinite(t), ErrorCode::InvalidArgument, "time must be positive");
    require(spec.superlinear(), ErrorCode::NotSuperlinear, "inf-convolution needs a superlinear cost");
    require(spec.dim() == f.grid().dim, ErrorCode::InvalidArgument, "cost and grid dimensions differ");
    double m = f.sup_abs();
    return m == 0.0 ? 0.0 : t * radius_RL(spec, 2.0 * m / t);
}

std::vector<double> boundary_distance(const Grid& g) {
    std::vector<double> d(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto m = g.multi(k);
        double v = kInf;
        for (std::size_t a = 0; a < g.dim; ++a) {
            double lo = static_cast<double>(m[a]) * g.h[a];
            double hi = static_cast<double>(g.n[a] - 1 - m[a]) * g.h[a];
            v = std::min({v, lo, hi});
        }
        d[k] = v;
    }
    return d;
}

InfConvolution inf_convolve(const GridField& f, const CostSpec& spec, double t) {
    require(f.components() == 1, ErrorCode::InvalidArgument, "inf-convolution needs a scalar field");
    const Grid& g = f.grid();
    InfConvolution out;
    const double r = window_radius(f, spec, t);
    out.window_radius = r;
    auto offsets = kernel(g, spec, t, r);

    std::vector<double> q(g.size(), kInf);
    const auto vals = f.values();
    const long n0 = static_cast<long>(g.n[0]);
    const long n1 = g.dim == 2 ? static_cast<long>(g.n[1]) : 1;
    for (const Offset& o : offsets) {
        // Output node i reads source node i - k.
        const long i0_lo = std::max(0L, o.k0), i0_hi = std::min(n0, n0 + o.k0);
        const long i1_lo = std::max(0L, o.k1), i1_hi = std::min(n1, n1 + o.k1);
        if (i0_lo >= i0_hi || i1_lo >= i1_hi) continue;
        for (long i0 = i0_lo; i0 < i0_hi; ++i0) {
            double* dst = q.data() + i0 * n1 + i1_lo;
            const double* src = vals.data() + (i0 - o.k0) * n1 + (i1_lo - o.k1);
            simd::min_plus(dst, src, o.w, static_cast<std::size_t>(i1_hi - i1_lo));
        }
    }

    auto dist = boundary_distance(g);
    out.clipped.assign(g.size(), 0);
    const double tol = 1e-12 * std::max(1.0, r);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (dist[k] + tol < r) {
            out.clipped[k] = 1;
            out.window_exceeds_grid = true;
        }
    out.value = GridField(g, std::move(q));
    return out;
}

double semigroup_residual(const GridField& f, const CostSpec& spec, double t, double s) {
    auto whole = inf_convolve(f, spec, t + s);
    auto inner = inf_convolve(f, spec, s);
    auto outer = inf_convolve(inner.value, spec, t);
    const double need = std::max(whole.window_radius, outer.window_radius + inner.window_radius);
    auto dist = boundary_distance(f.grid());
    const double tol = 1e-12 * std::max(1.0, need);
    double res = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (dist[k] + tol >= need) res = std::max(res, std::fabs(whole.value[k] - outer.value[k]));
    return res;
}

std::size_t MaskedField::count() const { return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1)); }

double MaskedField::sup_abs() const {
    double s = 0.0;
    for (std::size_t k = 0; k < valid.size(); ++k)
        if (valid[k]) s = std::max(s, std::fabs(field[k]));
    return s;
}

double MaskedField::quantile_abs(double q) const {
    std::vector<double> v;
    for (std::size_t k = 0; k < valid.size(); ++k)
        if (valid[k]) v.push_back(std::fabs(field[k]));
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) ;
    idx = std::min(v.size() - 1, idx == 0 ? 0 : idx - 1);
    return v[idx];
}

namespace {

bool interior_node(const Grid& g, std::size_t k) {
    auto m = g.multi(k);
    for (std::size_t a = 0; a < g.dim; ++a)
        if (m[a] == 0 || m[a] + 1 == g.n[a]) return false;
    return true;
}

std::vector<double> conjugate_of_gradient(const GridField& u, const ConjugateSpec& conj) {
    GridField grad = central_gradient(u);
    std::vector<double> out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = conj.value(grad.vec(k));
    return out;
}

}  // namespace

MaskedField generator_probe(const GridField& f, const CostSpec& spec, double eps) {
    auto conj = legendre(spec);
    auto q = inf_convolve(f, spec, eps);
    auto lstar = conjugate_of_gradient(f, conj);
    const Grid& g = f.grid();
    std::vector<double> v(g.size(), 0.0);
    std::vector<std::uint8_t> ok(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        v[k] = (q.value[k] - f[k]) / eps + lstar[k];
        ok[k] = !q.clipped[k] && interior_node(g, k);
    }
    return {GridField(g, std::move(v)), std::move(ok)};
}

MaskedField hj_residual(const GridField& f, const CostSpec& spec, double t, double dt) {
    require(t > dt && dt > 0.0, ErrorCode::InvalidArgument, "hj_residual needs t > dt > 0");
    auto conj = legendre(spec);
    auto ahead = inf_convolve(f, spec, t + dt);
    auto behind = inf_convolve(f, spec, t - dt);
    auto mid = inf_convolve(f, spec, t);
    auto lstar = conjugate_of_gradient(mid.value, conj);
    const Grid& g = f.grid();
    std::vector<double> v(g.size(), 0.0);
    std::vector<std::uint8_t> ok(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        v[k] = (ahead.value[k] - behind.value[k]) / (2.0 * dt) + lstar[k];
        ok[k] = !ahead.clipped[k] && !behind.clipped[k] && !mid.clipped[k] && interior_node(g, k);
    }
    return {GridField(g, std::move(v)), std::move(ok)};
}

InterpolationCheck interpolation_check(const GridField& f, const CostSpec& spec, std::span<const double> nu,
                                       double t, int steps) {
    require(nu.size() == f.size(), ErrorCode::InvalidArgument, "nu must carry one weight per grid node");
    require(steps >= 1, ErrorCode::InvalidArgument, "interpolation_check needs steps >= 1");
    auto conj = legendre(spec);
    auto integrand = [&](const GridField& u) {
        auto l = conjugate_of_gradient(u, conj);
        double s = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) s += nu[k] * l[k];
        return s;
    };
    double acc = 0.5 * integrand(f);
    GridField last = f;
    for (int i = 1; i <= steps; ++i) {
        double s = t * static_cast<double>(i) / steps;
        last = inf_convolve(f, spec, s).value;
        acc += (i == steps ? 0.5 : 1.0) * integrand(last);
    }
    double rhs = -acc * t / steps;
    double lhs = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) lhs += nu[k] * (last[k] - f[k]);
    return {lhs, rhs, std::fabs(lhs - rhs)};
}

}  // namespace kte
