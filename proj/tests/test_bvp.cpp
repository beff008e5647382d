#include <cmath>
#include <vector>

#include "doctest.h"
#include "kte/bvp.hpp"
#include "kte/cost.hpp"
#include "kte/error.hpp"

using namespace kte;

namespace {

const YoungProfile& quartic() {
    static const YoungProfile q = YoungProfile::of(CostSpec::radial("s^2+s^4"));
    return q;
}

// For Phi = max(r^2, r^4): J(delta) = 4 delta^{-1/4} when delta >= 1 and
// 2 delta^{-1/2} + 2 otherwise.
double quartic_delta(double c) { return c >= 0.25 ? 256.0 * std::pow(c, 4) : std::pow(2.0 * c / (1.0 - 2.0 * c), 2); }

std::vector<double> probes(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = ThetaSolution::probe_end * static_cast<double>(k) / double(n - 1);
    return t;
}

}  // namespace

TEST_CASE("bvp: delta closed forms") {
    for (double p : {1.5, 2.0, 3.0})
        for (double c : {0.5, 1.0, 2.0}) {
            auto y = YoungProfile::power(p);
            double d = solve_delta(c, y);
            CHECK(d == doctest::Approx(std::pow(c * p, p)).epsilon(1e-10));
            CHECK(std::fabs(delta_integral(d, y) - 1.0 / c) <= 1e-9);
        }
    CHECK(solve_delta(1.0, YoungProfile::power(2.0)) == doctest::Approx(4.0).epsilon(1e-12));
    for (double c : {0.1, 0.2, 0.5, 1.0, 2.0}) {
        double d = solve_delta(c, quartic());
        CHECK(d == doctest::Approx(quartic_delta(c)).epsilon(1e-10));
        CHECK(std::fabs(delta_integral(d, quartic()) - 1.0 / c) <= 1e-9);
    }
}

TEST_CASE("bvp: delta is increasing and bounded by A Phi(c)") {
    double prev = 0.0;
    for (double c : {0.1, 0.3, 0.5, 1.0, 2.0}) {
        double d = solve_delta(c, quartic());
        CHECK(d > prev);
        prev = d;
    }
    struct Case {
        YoungProfile y;
        const char* name;
    };
    for (const auto& [y, name] : {Case{YoungProfile::power(2.0), "power 2"}, Case{quartic(), "max(r^2, r^4)"}}) {
        CAPTURE(name);
        CHECK(y.A_thm12() == doctest::Approx(y.phi(y.p_plus())).epsilon(1e-12));
        for (double c : {0.5, 1.0, 2.0}) CHECK(solve_delta(c, y) <= y.A_thm12() * y.phi(c) * (1.0 + 1e-12));
    }
}

TEST_CASE("bvp: theta closed forms") {
    for (double p : {1.5, 2.0, 3.0}) {
        auto sol = solve_theta(1.0, YoungProfile::power(p));
        double err = 0.0, derr = 0.0;
        for (int k = 0; k <= 2000; ++k) {
            double t = k / 2000.0;
            err = std::max(err, std::fabs(sol.theta(t) - (1.0 - std::pow(1.0 - t, p))));
            if (t < 1.0) derr = std::max(derr, std::fabs(sol.theta_prime(t) - p * std::pow(1.0 - t, p - 1.0)));
        }
        CAPTURE(p);
        CHECK(err <= 1e-6);
        CHECK(derr <= 1e-6 * p);
    }
    // For delta >= 1 only the r^4 branch is active: theta = 1 - (1 - t)^4 for every c >= 1/4.
    for (double c : {0.5, 1.0, 2.0}) {
        auto sol = solve_theta(c, quartic());
        double err = 0.0;
        for (int k = 0; k <= 2000; ++k) {
            double t = k / 2000.0;
            err = std::max(err, std::fabs(sol.theta(t) - (1.0 - std::pow(1.0 - t, 4))));
        }
        CHECK(err <= 1e-6);
    }
}

TEST_CASE("bvp: residual, endpoints and R(1)") {
    for (double c : {0.1, 0.5, 1.0, 2.0}) {
        for (const YoungProfile& y : {YoungProfile::power(2.0), quartic()}) {
            auto sol = solve_theta(c, y);
            CAPTURE(c);
            CHECK(sol.theta(0.0) == 0.0);
            CHECK(sol.theta(1.0) == 1.0);
            CHECK(std::fabs(sol.r_at_one() - 1.0) <= 1e-7);
            CHECK(sol.residual_sup() <= 1e-6);
            // theta rounds to 1 for large v; strictness is checked on v = -log(1 - theta).
            auto th = sol.node_theta();
            auto tt = sol.node_t();
            auto vv = sol.node_v();
            bool increasing = true;
            for (std::size_t i = 1; i < th.size(); ++i)
                increasing = increasing && th[i] >= th[i - 1] && vv[i] > vv[i - 1] && tt[i] > tt[i - 1];
            CHECK(increasing);
            CHECK(th[1] > th[0]);
            CHECK(tt.front() == 0.0);
            CHECK(tt.back() <= 1.0);
            CHECK(1.0 - tt.back() <= 1e-7);
            // Independent residual on an offset probe set, evaluated through theta.
            double worst = 0.0;
            for (int k = 0; k < 997; ++k) {
                double t = ThetaSolution::probe_end * (k + 0.5) / 997.0;
                double rest = sol.complement(t);
                CHECK(std::fabs(rest - (1.0 - sol.theta(t))) <= 1e-15);
                worst = std::max(worst, std::fabs(rest * y.phi(c * sol.theta_prime(t) / rest) - sol.delta()));
            }
            CHECK(worst <= 1e-6);
        }
    }
}

TEST_CASE("bvp: theta' bound and U monotone") {
    for (const YoungProfile& y : {YoungProfile::power(3.0), quartic()}) {
        for (double c : {0.1, 1.0}) {
            auto sol = solve_theta(c, y);
            double bound = phi_inverse_exact(y, sol.delta()) / c * (1.0 + 1e-6);
            double prev_u = INFINITY;
            bool ok_bound = true, ok_u = true;
            for (double t : probes(2000)) {
                ok_bound = ok_bound && sol.theta_prime(t) <= bound;
                double u = bvp_U(t, c, sol.delta(), y);
                ok_u = ok_u && u > 0.0 && u <= prev_u * (1.0 + 1e-12);
                prev_u = u;
            }
            CHECK(ok_bound);
            CHECK(ok_u);
            // theta' = U(theta).
            for (double t : {0.1, 0.5, 0.9}) {
                CHECK(sol.theta_prime(t) == doctest::Approx(bvp_U(sol.theta(t), c, sol.delta(), y)).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("bvp: node doubling leaves theta unchanged") {
    for (const YoungProfile& y : {YoungProfile::power(2.0), quartic()}) {
        for (double c : {0.1, 1.0}) {
            auto a = solve_theta(c, y);
            auto b = solve_theta(c, y, {.nodes = 4097});
            double diff = 0.0;
            for (double t : probes(5000)) diff = std::max(diff, std::fabs(a.theta(t) - b.theta(t)));
            CHECK(diff <= 1e-6);
        }
    }
}

TEST_CASE("bvp: interpolation constant") {
    auto p2 = solve_theta(1.0, YoungProfile::power(2.0));
    CHECK(interpolation_constant(p2, YoungProfile::power(2.0)) == doctest::Approx(4.0).epsilon(1e-8));
    for (double c : {0.5, 1.0, 2.0}) {
        auto sol = solve_theta(c, quartic());
        double k = interpolation_constant(sol, quartic());
        CHECK(std::fabs(k - sol.delta()) <= 1e-6);
        CHECK(k <= quartic().A_thm12() * quartic().phi(c) + 1e-6);
    }
}

TEST_CASE("bvp: polished inverse for sampled profiles") {
    auto table = CostSpec::blackbox(GridField::sample(Grid::line(-40.0, 40.0, 8001), [](auto x) {
        double a = std::fabs(x[0]);
        return a * a * std::sqrt(1.0 + a);
    }));
    auto y = YoungProfile::of(table);
    for (double s : {0.3, 1.0, 2.5, 40.0, 700.0}) {
        double r = phi_inverse_exact(y, s);
        CHECK(y.phi(r) == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("bvp: invalid arguments") {
    CHECK_THROWS_AS(solve_delta(0.0, YoungProfile::power(2.0)), Error);
    CHECK_THROWS_AS(solve_theta(-1.0, YoungProfile::power(2.0)), Error);
    CHECK_THROWS_AS(bvp_U(1.0, 1.0, 4.0, YoungProfile::power(2.0)), Error);
    auto sol = solve_theta(1.0, YoungProfile::power(2.0));
    CHECK_THROWS_AS(sol.theta(1.5), Error);
    CHECK_THROWS_AS(sol.theta_prime(1.0), Error);
}
