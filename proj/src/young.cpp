#include "kte/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>

#include "kte/error.hpp"
#include "kte/numerics.hpp"

namespace kte {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Log-spaced scan of s over [1e-6, 1e6].
constexpr int kScan = 2401;
constexpr double kScanLo = -6.0;
constexpr double kScanStep = 12.0 / (kScan - 1);

double scan_point(int j) { return std::pow(10.0, kScanLo + kScanStep * j); }

enum class Form { Power, Scalar, Table };

}  // namespace

struct YoungProfile::Impl {
    Form form = Form::Power;
    double p = 2.0;
    std::function<double(double)> v;
    double tail_lo = 0.0;  // v(s) ~ s^tail_lo as s -> 0; 0 when unknown
    double tail_hi = 0.0;  // v(s) ~ s^tail_hi as s -> infinity; 0 when unknown
    std::vector<double> v_scan;  // v at the scan points
    std::optional<CostSpec> table;

    // Piecewise-linear model of log Phi against log r used for inversion.
    mutable std::once_flag once;
    mutable std::vector<double> log_r;
    mutable std::vector<double> log_phi;

    double phi(double r) const;
    double phi_scalar(double r) const;
    double tail_limit(double r) const;
    double phi_table(double r) const;
    void build_inverse() const;
    double inverse(double s) const;
};

double YoungProfile::Impl::tail_limit(double r) const {
    double best = 0.0;
    if (tail_lo > 0.0) best = std::fmax(best, std::pow(r, tail_lo));
    if (tail_hi > 0.0) best = std::fmax(best, std::pow(r, tail_hi));
    return best;
}

double YoungProfile::Impl::phi_scalar(double r) const {
    double best = tail_limit(r);
    int arg = 0;
    for (int j = 0; j < kScan; ++j) {
        double ratio = v(r * scan_point(j)) / v_scan[static_cast<std::size_t>(j)];
        if (!std::isfinite(ratio)) fail(ErrorCode::Delta2Violation, "Young function is infinite");
        if (ratio > best) best = ratio, arg = j;
    }
    double lo = kScanLo + kScanStep * std::max(arg - 1, 0);
    double hi = kScanLo + kScanStep * std::min(arg + 1, kScan - 1);
    auto ratio_at = [&](double u) {
        double s = std::pow(10.0, u);
        return v(r * s) / v(s);
    };
    auto [u, val] = num::golden_max(ratio_at, lo, hi, 1e-12);
    (void)u;
    return std::fmax(best, val);
}

double YoungProfile::Impl::phi_table(double r) const {
    const CostSpec& c = *table;
    const GridField& t = c.table();
    const Grid& g = t.grid();
    double best = 0.0;
    bool any = false;
    std::array<double, 2> x{0.0, 0.0};
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (t[k] <= 0.0) continue;
        auto pt = g.point(k);
        x = {r * pt[0], r * pt[1]};
        std::span<const double> xs(x.data(), g.dim);
        if (!t.contains(xs)) continue;
        best = std::fmax(best, t.interpolate(xs) / t[k]);
        any = true;
    }
    if (!any) fail(ErrorCode::OutOfDomain, "no table ray supports this ratio");
    return best;
}

double YoungProfile::Impl::phi(double r) const {
    if (r == 0.0) return 0.0;
    if (r == 1.0) return 1.0;
    switch (form) {
        case Form::Power: return std::pow(r, p);
        case Form::Scalar: return phi_scalar(r);
        case Form::Table: return phi_table(r);
    }
    return 0.0;
}

void YoungProfile::Impl::build_inverse() const {
    if (form == Form::Scalar) {
        // With r and s on one log lattice, r*s is a lattice point too.
        const int ext = 2 * kScan - 1;
        const double ext_lo = 2.0 * kScanLo;
        std::vector<double> vext(static_cast<std::size_t>(ext));
        for (int k = 0; k < ext; ++k) vext[static_cast<std::size_t>(k)] = v(std::pow(10.0, ext_lo + kScanStep * k));
        const int shift = (kScan - 1) / 2;
        log_r.resize(kScan);
        log_phi.resize(kScan);
        for (int i = 0; i < kScan; ++i) {
            double best = tail_limit(std::pow(10.0, kScanLo + kScanStep * i));
            for (int j = 0; j < kScan; ++j) {
                double ratio = vext[static_cast<std::size_t>(i + j)] / vext[static_cast<std::size_t>(j + shift)];
                if (ratio > best) best = ratio;
            }
            log_r[static_cast<std::size_t>(i)] = (kScanLo + kScanStep * i) * std::log(10.0);
            log_phi[static_cast<std::size_t>(i)] = std::log(best);
        }
        log_phi[static_cast<std::size_t>(shift)] = 0.0;
    } else {
        const CostSpec& c = *table;
        const Grid& g = c.table().grid();
        double rmax = 0.0, rmin = kInf;
        for (std::size_t k = 0; k < g.size(); ++k) {
            auto pt = g.point(k);
            double len = std::hypot(pt[0], pt[1]);
            if (len > 0.0) rmax = std::fmax(rmax, len), rmin = std::fmin(rmin, len);
        }
        double span = std::log(rmax / rmin);
        const int n = 801;
        log_r.resize(n);
        log_phi.resize(n);
        for (int i = 0; i < n; ++i) {
            double lr = -span + 2.0 * span * i / (n - 1);
            log_r[static_cast<std::size_t>(i)] = lr;
            log_phi[static_cast<std::size_t>(i)] = std::log(phi_table(std::exp(lr)));
        }
    }
    for (std::size_t i = 1; i < log_phi.size(); ++i) log_phi[i] = std::fmax(log_phi[i], log_phi[i - 1]);
}

double YoungProfile::Impl::inverse(double s) const {
    if (s <= 0.0) return 0.0;
    if (form == Form::Power) return std::pow(s, 1.0 / p);
    std::call_once(once, [this] { build_inverse(); });
    const double ls = std::log(s);
    const std::size_t n = log_phi.size();
    auto seg = [&](std::size_t i) {
        double d = log_phi[i + 1] - log_phi[i];
        double w = d > 0.0 ? (ls - log_phi[i]) / d : 0.0;
        return std::exp(log_r[i] + w * (log_r[i + 1] - log_r[i]));
    };
    if (ls <= log_phi[0]) return seg(0);
    if (ls >= log_phi[n - 1]) return seg(n - 2);
    auto it = std::upper_bound(log_phi.begin(), log_phi.end(), ls);
    std::size_t i = static_cast<std::size_t>(it - log_phi.begin()) - 1;
    while (i + 1 < n - 1 && log_phi[i + 1] == log_phi[i]) ++i;
    return seg(std::min(i, n - 2));
}

YoungProfile YoungProfile::power(double p) {
    require(std::isfinite(p) && p >= 1.0, ErrorCode::InvalidArgument, "power profile needs p >= 1");
    YoungProfile y;
    auto impl = std::make_shared<Impl>();
    impl->form = Form::Power;
    impl->p = p;
    y.impl_ = impl;
    y.exact_ = true;
    y.p_plus_ = y.p_minus_ = p;
    y.derivative_error_ = 0.0;
    y.finish();
    return y;
}

YoungProfile YoungProfile::of_scalar(std::function<double(double)> v, std::pair<double, double> tail_exponents) {
    YoungProfile y;
    auto impl = std::make_shared<Impl>();
    impl->form = Form::Scalar;
    impl->v = std::move(v);
    impl->tail_lo = tail_exponents.first;
    impl->tail_hi = tail_exponents.second;
    impl->v_scan.resize(kScan);
    for (int j = 0; j < kScan; ++j) {
        double vs = impl->v(scan_point(j));
        if (!std::isfinite(vs)) fail(ErrorCode::Delta2Violation, "profile overflows; L(2x)/L(x) is unbounded");
        require(vs > 0.0, ErrorCode::InvalidSpec, "profile must be positive away from 0");
        impl->v_scan[static_cast<std::size_t>(j)] = vs;
    }
    // Divergence of L(2x)/L(x) at either end of the scan range.
    auto doubling = [&](double s) { return impl->v(2.0 * s) / impl->v(s); };
    for (auto [far, near] : {std::pair{1e6, 1e5}, std::pair{1e-6, 1e-5}}) {
        double a = doubling(far), b = doubling(near);
        if (!std::isfinite(a) || !std::isfinite(b) || a > b * (1.0 + 1e-3))
            fail(ErrorCode::Delta2Violation, "L(2x)/L(x) is unbounded; Phi is infinite");
    }
    y.impl_ = impl;
    y.exact_ = false;
    y.finish();
    return y;
}

YoungProfile YoungProfile::of(const CostSpec& spec) {
    switch (spec.kind()) {
        case CostKind::Power: return power(spec.exponent());
        case CostKind::Radial: {
            auto expr = std::make_shared<const RadialExpr>(spec.profile());
            return of_scalar([expr](double s) { return expr->value(s); },
                             {expr->min_exponent(), expr->max_exponent()});
        }
        case CostKind::BlackBox: {
            YoungProfile y;
            auto impl = std::make_shared<Impl>();
            impl->form = Form::Table;
            impl->table = spec;
            y.impl_ = impl;
            y.exact_ = false;
            y.finish();
            return y;
        }
    }
    return power(2.0);
}

void YoungProfile::finish() {
    if (!exact_) {
        const double hs[3] = {1e-3, 5e-4, 2.5e-4};
        auto extrapolate = [&](int side) {
            double d[3];
            for (int i = 0; i < 3; ++i) {
                double h = hs[i];
                d[i] = side > 0 ? (impl_->phi(1.0 + h) - 1.0) / h : (1.0 - impl_->phi(1.0 - h)) / h;
            }
            double r1 = 2.0 * d[1] - d[0];
            double r2 = 2.0 * d[2] - d[1];
            double r = (4.0 * r2 - r1) / 3.0;
            return std::pair{r, std::fabs(r - r2)};
        };
        auto [pp, ep] = extrapolate(+1);
        auto [pm, em] = extrapolate(-1);
        if (pm > pp) pm = pp = 0.5 * (pm + pp);
        p_plus_ = pp;
        p_minus_ = pm;
        derivative_error_ = std::fmax(ep, em);
    }
    gamma_ = kte::gamma(p_plus_, std::fmax(p_minus_, 1.0));
    a12_ = phi(p_plus_);
    a13_ = a12_ * phi(1.0 / gamma_);
}

double YoungProfile::phi(double r) const {
    require(r >= 0.0, ErrorCode::InvalidArgument, "Phi needs r >= 0");
    return impl_->phi(r);
}

double YoungProfile::psi(double r) const {
    require(r >= 0.0, ErrorCode::InvalidArgument, "Psi needs r >= 0");
    if (r == 0.0) return 0.0;
    return 1.0 / impl_->phi(1.0 / r);
}

double YoungProfile::phi_inverse(double s) const {
    require(s >= 0.0, ErrorCode::InvalidArgument, "Phi inverse needs s >= 0");
    return impl_->inverse(s);
}

OneSided one_sided_derivatives(const YoungProfile& profile) {
    return {profile.p_minus(), profile.p_plus(), profile.derivative_error()};
}

namespace {

// inf over r in [0, 1] of r^P - b r.
double lower_branch(double P, double b) {
    if (P == 1.0) return std::fmin(0.0, 1.0 - b);
    double r0 = std::pow(b / P, 1.0 / (P - 1.0));
    if (r0 <= 1.0) return -(P - 1.0) * std::pow(b / P, P / (P - 1.0));
    return 1.0 - b;
}

// inf over r >= 1 of r^Q - b r.
double upper_branch(double Q, double b) {
    if (Q == 1.0) return b <= 1.0 ? 1.0 - b : -kInf;
    double r1 = std::pow(b / Q, 1.0 / (Q - 1.0));
    if (r1 >= 1.0) return -(Q - 1.0) * std::pow(b / Q, Q / (Q - 1.0));
    return 1.0 - b;
}

}  // namespace

double gamma(double p_plus, double p_minus) {
    require(std::isfinite(p_plus) && std::isfinite(p_minus) && p_minus >= 1.0, ErrorCode::InvalidArgument,
            "gamma needs finite exponents with p_minus >= 1");
    if (p_plus < p_minus) fail(ErrorCode::InvalidOrder, "gamma needs p_plus >= p_minus");
    if (p_plus == p_minus) return 1.0;
    auto objective = [&](double b) { return std::fmin(lower_branch(p_plus, b), upper_branch(p_minus, b)) + b; };
    auto [b, val] = num::golden_max(objective, 0.0, p_plus, 1e-13);
    (void)b;
    return std::fmin(val, 1.0);
}

Delta2Diagnostic check_delta2(const CostSpec& spec) {
    Delta2Diagnostic d;
    double p_plus = kInf;
    try {
        p_plus = YoungProfile::of(spec).p_plus();
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Delta2Violation) throw;
        d.sup_ratio = kInf;
        d.threshold = kInf;
        d.passes = false;
        return d;
    }
    d.threshold = p_plus * (1.0 + 1e-3);
    const std::size_t n = spec.dim();
    std::vector<std::vector<double>> dirs;
    if (spec.kind() == CostKind::BlackBox) {
        const GridField& t = spec.table();
        const Grid& g = t.grid();
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (t[k] <= 0.0) continue;
            auto pt = g.point(k);
            std::array<double, 2> x{pt[0], pt[1]}, y{};
            const double eta = 1e-6;
            y = {x[0] * (1.0 + eta), x[1] * (1.0 + eta)};
            std::span<const double> ys(y.data(), n);
            if (!t.contains(ys)) continue;
            double ratio = (t.interpolate(ys) - t[k]) / (eta * t[k]);
            if (ratio > d.sup_ratio) {
                double len = std::hypot(x[0], x[1]);
                d.sup_ratio = ratio;
                d.at_radius = len;
                d.direction = {x[0] / len};
                if (n == 2) d.direction.push_back(x[1] / len);
            }
        }
    } else {
        if (n == 1) {
            dirs = {{1.0}, {-1.0}};
        } else {
            for (int a = 0; a < 16; ++a) {
                std::vector<double> u(n, 0.0);
                double th = 2.0 * std::numbers::pi * a / 16.0;
                u[0] = std::cos(th);
                u[1] = std::sin(th);
                dirs.push_back(u);
            }
        }
        std::vector<double> x(n), grad(n);
        for (const auto& u : dirs)
            for (int j = 0; j < kScan; ++j) {
                double s = scan_point(j);
                for (std::size_t k = 0; k < n; ++k) x[k] = s * u[k];
                double l = spec.value(x);
                spec.gradient(x, grad);
                double dot = 0.0;
                for (std::size_t k = 0; k < n; ++k) dot += grad[k] * x[k];
                double ratio = dot / l;
                if (ratio > d.sup_ratio) {
                    d.sup_ratio = ratio;
                    d.at_radius = s;
                    d.direction = u;
                }
            }
    }
    d.passes = d.sup_ratio <= d.threshold;
    return d;
}

}  // namespace kte
