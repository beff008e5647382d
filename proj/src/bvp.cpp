#include "kte/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "kte/error.hpp"

namespace kte {

namespace {

constexpr double kTailCut = 1e-12;    // tail bound in J
constexpr double kNodeTail = 1e-7;    // remaining t beyond the last node
constexpr double kRTolerance = 1e-7;  // allowed |R(1) - 1|

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double diff = left + right - whole;
    // Stop at the requested tolerance or at rounding level.
    if (depth <= 0 || std::fabs(diff) <= 15.0 * tol || std::fabs(diff) <= 1e-15 * std::fabs(left + right))
        return left + right + diff / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fb, double tol) {
    if (b <= a) return 0.0;
    double fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Phi^{-1} that skips polishing when the profile's own inverse model
// reproduces phi on a dense log-spaced check set.
struct Inverse {
    const YoungProfile& profile;
    bool trusted = true;

    explicit Inverse(const YoungProfile& p) : profile(p) {
        if (p.exact()) return;
        for (int k = 0; k <= 4000 && trusted; ++k) {
            double s = std::pow(10.0, -20.0 + 80.0 * k / 4000.0);
            trusted = std::fabs(std::log(p.phi(p.phi_inverse(s)) / s)) <= 1e-12 * std::max(1.0, std::fabs(std::log(s)));
        }
    }
    double operator()(double s) const { return trusted ? profile.phi_inverse(s) : phi_inverse_exact(profile, s); }
};

// Integrand in v: 1 / Phi^{-1}(delta e^v).
struct Integrand {
    const Inverse& inv;
    double delta;
    double operator()(double v) const { return 1.0 / inv(delta * std::exp(v)); }
};

double j_integral(double delta, const Inverse& inv);
double delta_for(double c, const Inverse& inv);

// Integral of the integrand over [a, b], split where delta e^v = 1.
double integrate(const Integrand& g, double a, double b, double ga, double gb, double tol) {
    std::function<double(double)> f = std::cref(g);
    double kink = -std::log(g.delta);
    if (kink > a && kink < b) {
        double gk = g(kink);
        return adaptive_simpson(f, a, kink, ga, gk, 0.5 * tol) + adaptive_simpson(f, kink, b, gk, gb, 0.5 * tol);
    }
    return adaptive_simpson(f, a, b, ga, gb, tol);
}

double integrate(const Integrand& g, double a, double b, double tol) { return integrate(g, a, b, g(a), g(b), tol); }

// Bound on int_X^inf dv / Phi^{-1}(delta e^v) from Phi^{-1}(s) >= s^{1/p+} for s >= 1.
double tail_bound(double delta, double x, double p_plus) { return p_plus * std::pow(delta * std::exp(x), -1.0 / p_plus); }

// Smallest X >= max(0, -log delta) with tail_bound <= eps.
double cutoff(double delta, double p_plus, double eps) {
    double x = p_plus * std::log(p_plus / eps) - std::log(delta);
    return std::max({x, -std::log(delta), 0.0});
}

}  // namespace

double phi_inverse_exact(const YoungProfile& profile, double s) {
    require(s >= 0.0, ErrorCode::InvalidArgument, "Phi inverse needs s >= 0");
    double r = profile.phi_inverse(s);
    if (profile.exact() || s == 0.0) return r;
    // Safeguarded secant in log-log coordinates, started from the model value.
    const double ls = std::log(s);
    auto f = [&](double lr) { return std::log(profile.phi(std::exp(lr))) - ls; };
    double x0 = std::log(r), f0 = f(x0);
    if (std::fabs(f0) <= 1e-14 * std::max(1.0, std::fabs(ls))) return r;
    double lo = x0, hi = x0, flo = f0, fhi = f0;
    const double step = 1.0 / profile.p_plus();
    while (flo > 0.0) flo = f(lo -= step);
    while (fhi < 0.0) fhi = f(hi += step);
    double x1 = x0 - f0 * step;
    for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++it) {
        if (!(x1 > lo && x1 < hi)) x1 = 0.5 * (lo + hi);
        double f1 = f(x1);
        if (f1 == 0.0) return std::exp(x1);
        if (f1 < 0.0)
            lo = x1, flo = f1;
        else
            hi = x1, fhi = f1;
        if (std::fabs(f1) <= 1e-14 * std::max(1.0, std::fabs(ls))) return std::exp(x1);
        x1 = lo - flo * (hi - lo) / (fhi - flo);
    }
    return std::exp(0.5 * (lo + hi));
}

namespace {

double j_integral(double delta, const Inverse& inv) {
    Integrand g{inv, delta};
    const double pp = inv.profile.p_plus();
    double x = cutoff(delta, pp, kTailCut);
    return integrate(g, 0.0, x, 1e-13) + tail_bound(delta, x, pp);
}

double delta_for(double c, const Inverse& inv) {
    const double target = 1.0 / c;
    // J is decreasing and convex in x = log(delta) with J'(x) = -1 / Phi^{-1}(e^x),
    // so Newton iterates are monotone after the first step.
    double x = 0.0;
    for (int it = 0; it < 200; ++it) {
        double r = j_integral(std::exp(x), inv) - target;
        if (std::fabs(r) <= 1e-13 * target) break;
        double step = r * inv(std::exp(x));
        x += std::clamp(step, -20.0, 20.0);
    }
    return std::exp(x);
}

}  // namespace

double delta_integral(double delta, const YoungProfile& profile) {
    require(delta > 0.0 && std::isfinite(delta), ErrorCode::InvalidArgument, "delta must be positive");
    return j_integral(delta, Inverse(profile));
}

double solve_delta(double c, const YoungProfile& profile) {
    require(c > 0.0 && std::isfinite(c), ErrorCode::InvalidArgument, "c must be positive");
    return delta_for(c, Inverse(profile));
}

double bvp_U(double y, double c, double delta, const YoungProfile& profile) {
    require(y >= 0.0 && y < 1.0, ErrorCode::InvalidArgument, "U is defined on [0, 1)");
    return (1.0 - y) * phi_inverse_exact(profile, delta / (1.0 - y)) / c;
}

ThetaSolution solve_theta(double c, const YoungProfile& profile, const ThetaOptions& opt) {
    require(opt.nodes >= 3 && opt.probes >= 2, ErrorCode::InvalidArgument, "too few nodes or probes");
    require(c > 0.0 && std::isfinite(c), ErrorCode::InvalidArgument, "c must be positive");
    Inverse inv(profile);
    ThetaSolution sol;
    sol.c_ = c;
    sol.delta_ = delta_for(c, inv);
    sol.probes_ = opt.probes;
    const double delta = sol.delta_, pp = profile.p_plus();
    Integrand g{inv, delta};

    // Nodes uniform in v on [0, V], plus the kink of Phi at 1.
    const double vmax = cutoff(delta, pp, kNodeTail / c);
    std::vector<double>& v = sol.v_;
    for (std::size_t i = 0; i < opt.nodes; ++i) v.push_back(vmax * static_cast<double>(i) / double(opt.nodes - 1));
    double kink = -std::log(delta);
    if (kink > 0.0 && kink < vmax) {
        auto it = std::lower_bound(v.begin(), v.end(), kink);
        if (std::fabs(*it - kink) > 1e-12 && std::fabs(*(it - 1) - kink) > 1e-12) v.insert(it, kink);
    }

    // Forward cumulative t and backward remaining mass 1 - t.
    const std::size_t n = v.size();
    std::vector<double> gv(n), piece(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) gv[i] = g(v[i]);
    for (std::size_t i = 1; i < n; ++i) piece[i] = c * integrate(g, v[i - 1], v[i], gv[i - 1], gv[i], 1e-15);
    double beyond = c * (integrate(g, vmax, cutoff(delta, pp, kTailCut), 1e-15) +
                         tail_bound(delta, cutoff(delta, pp, kTailCut), pp));
    double total = beyond;
    for (std::size_t i = 1; i < n; ++i) total += piece[i];
    sol.r_at_one_ = total;
    if (std::fabs(total - 1.0) > kRTolerance)
        fail(ErrorCode::QuadratureFailure, "R(1) = " + std::to_string(total) + " differs from 1");

    // Remaining mass rescaled so that t(0) = 0 exactly and t(inf) = 1.
    std::vector<double> rest(n);
    rest[n - 1] = beyond / total;
    for (std::size_t i = n - 1; i-- > 0;) rest[i] = rest[i + 1] + piece[i + 1] / total;
    rest[0] = 1.0;
    sol.w_.resize(n);
    sol.dw_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sol.w_[i] = std::log(rest[i]);
        sol.dw_[i] = -(c / total) * gv[i] / rest[i];
    }
    // Fritsch-Carlson limiting on cells where the Hermite cubic is not monotone.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double sec = (sol.w_[i + 1] - sol.w_[i]) / (v[i + 1] - v[i]);
        double a = sol.dw_[i] / sec, b = sol.dw_[i + 1] / sec;
        double r2 = a * a + b * b;
        if (r2 > 9.0) {
            double tau = 3.0 / std::sqrt(r2);
            sol.dw_[i] = tau * a * sec;
            sol.dw_[i + 1] = tau * b * sec;
        }
    }

    double worst = 0.0;
    for (std::size_t k = 0; k < opt.probes; ++k) {
        double t = ThetaSolution::probe_end * static_cast<double>(k) / static_cast<double>(opt.probes - 1);
        double rest_t = sol.complement(t), dth = sol.theta_prime(t);
        double res = std::fabs(rest_t * profile.phi(c * dth / rest_t) - delta);
        worst = std::max(worst, res);
    }
    sol.residual_sup_ = worst;
    return sol;
}

std::pair<double, double> ThetaSolution::v_of_t(double t) const {
    const double target = std::log1p(-t);
    const std::size_t n = v_.size();
    if (target <= w_[n - 1]) {
        double slope = dw_[n - 1];
        return {v_[n - 1] + (target - w_[n - 1]) / slope, -1.0 / (std::exp(target) * slope)};
    }
    // w is decreasing in v.
    auto it = std::upper_bound(w_.begin(), w_.end(), target, [](double a, double b) { return a > b; });
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - w_.begin()), n - 1) - 1;
    const double h = v_[i + 1] - v_[i];
    auto herm = [&](double s, double& val, double& der) {
        double s2 = s * s, s3 = s2 * s;
        double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        val = h00 * w_[i] + h10 * h * dw_[i] + h01 * w_[i + 1] + h11 * h * dw_[i + 1];
        double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1, d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
        der = (d00 * w_[i] + d01 * w_[i + 1]) / h + d10 * dw_[i] + d11 * dw_[i + 1];
    };
    // Safeguarded Newton for w(v_i + s h) = target on s in [0, 1].
    double lo = 0.0, hi = 1.0;
    double s = (target - w_[i]) / (w_[i + 1] - w_[i]);
    if (!(s > 0.0 && s < 1.0)) s = 0.5;
    double val = 0.0, der = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
        herm(s, val, der);
        double r = val - target;
        if (r > 0.0)
            lo = s;
        else
            hi = s;
        if (r == 0.0 || hi - lo < 1e-16) break;
        double next = s - r / (der * h);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - s) < 1e-16) {
            s = next;
            break;
        }
        s = next;
    }
    herm(s, val, der);
    // dv/dt = 1 / (dt/dv) with t = 1 - e^w.
    return {v_[i] + s * h, -1.0 / (std::exp(target) * der)};
}

double ThetaSolution::theta(double t) const {
    require(t >= 0.0 && t <= 1.0, ErrorCode::InvalidArgument, "theta is defined on [0, 1]");
    if (t == 1.0) return 1.0;
    if (t == 0.0) return 0.0;
    return -std::expm1(-v_of_t(t).first);
}

double ThetaSolution::complement(double t) const {
    require(t >= 0.0 && t <= 1.0, ErrorCode::InvalidArgument, "theta is defined on [0, 1]");
    if (t == 1.0) return 0.0;
    if (t == 0.0) return 1.0;
    return std::exp(-v_of_t(t).first);
}

double ThetaSolution::theta_prime(double t) const {
    require(t >= 0.0 && t < 1.0, ErrorCode::InvalidArgument, "theta' is defined on [0, 1)");
    auto [v, dv] = v_of_t(t);
    return std::exp(-v) * dv;
}

std::vector<double> ThetaSolution::node_t() const {
    std::vector<double> t(w_.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = -std::expm1(w_[i]);
    return t;
}

std::vector<double> ThetaSolution::node_theta() const {
    std::vector<double> th(v_.size());
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = -std::expm1(-v_[i]);
    return th;
}

double interpolation_constant(const ThetaSolution& sol, const YoungProfile& profile) {
    const std::size_t n = sol.probes();
    auto integrand = [&](double t) {
        // The integrand at t = 1 is its left limit.
        t = std::min(t, 1.0 - 1e-12);
        double rest_t = sol.complement(t), dth = sol.theta_prime(t);
        return rest_t * profile.phi(sol.c() * dth / rest_t);
    };
    double h = 1.0 / static_cast<double>(n - 1), s = 0.5 * (integrand(0.0) + integrand(1.0));
    for (std::size_t k = 1; k + 1 < n; ++k) s += integrand(h * static_cast<double>(k));
    return s * h;
}

}  // namespace kte
