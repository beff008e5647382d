#include <cmath>
#include <vector>

#include "doctest.h"
#include "kte/error.hpp"
#include "kte/orlicz.hpp"
#include "kte/rng.hpp"
#include "kte/young.hpp"
#include "oracles.hpp"

using namespace kte;

namespace {

std::vector<double> random_weights(Rng& rng, std::size_t n) {
    std::vector<double> w(n);
    double s = 0.0;
    for (double& x : w) s += (x = rng.uniform(0.05, 1.0));
    for (double& x : w) x /= s;
    return w;
}

DiscreteMeasure random_measure(Rng& rng, std::size_t n, std::size_t dim) {
    std::vector<double> pts(n * dim);
    for (double& x : pts) x = rng.uniform(-2.0, 2.0);
    return DiscreteMeasure::normalized(dim, std::move(pts), random_weights(rng, n));
}

std::vector<double> random_sample(Rng& rng, std::size_t n) {
    std::vector<double> u(n);
    for (double& x : u) x = rng.uniform(-2.0, 2.0);
    return u;
}

struct Case {
    CostSpec spec;
    oracle::Conjugate conj;
};

std::vector<Case> oracle_cases() {
    return {{CostSpec::power(1.5), oracle::power_conjugate(1.5, {1.0})},
            {CostSpec::power(2.0), oracle::power_conjugate(2.0, {1.0})},
            {CostSpec::power(3.0), oracle::power_conjugate(3.0, {1.0})},
            {CostSpec::power(2.5, 2, PowerNorm::WeightedLp, {1.0, 3.0}), oracle::power_conjugate(2.5, {1.0, 3.0})},
            {CostSpec::radial("s^2+s^4"), oracle::quartic_conjugate()},
            {CostSpec::radial("s^2+s^4", 2), oracle::quartic_conjugate()}};
}

std::vector<CostSpec> sandwich_specs() {
    std::vector<CostSpec> s{CostSpec::power(1.5),        CostSpec::power(2.0),
                            CostSpec::power(3.0, 2),     CostSpec::radial("s^2+s^4"),
                            CostSpec::radial("max(s^2, 0.5*s^3)", 2),
                            CostSpec::power(2.0, 2, PowerNorm::WeightedLp, {0.5, 2.0})};
    // A non-even table: x^2 + max(x, 0)^4.
    s.push_back(CostSpec::blackbox(GridField::sample(Grid::line(-20.0, 20.0, 4001), [](auto x) {
        return x[0] * x[0] + std::pow(std::fmax(x[0], 0.0), 4);
    })));
    return s;
}

}  // namespace

TEST_CASE("discrete measures reject invalid input") {
    CHECK_THROWS_AS(DiscreteMeasure(1, {0.0, 1.0}, {1.0, 0.0}), Error);
    CHECK_THROWS_AS(DiscreteMeasure(1, {0.0, 1.0}, {0.5, 0.4}), Error);
    CHECK_THROWS_AS(DiscreteMeasure(1, {0.0, 0.0}, {0.5, 0.5}), Error);
    CHECK_THROWS_AS(DiscreteMeasure(2, {0.0, 1.0, 2.0}, {1.0}), Error);
    auto m = DiscreteMeasure(1, {0.0, 2.0}, {0.25, 0.75});
    auto k = DiscreteMeasure(1, {-1.0, 1.0}, {0.5, 0.5});
    auto c = m.convolve(k);
    CHECK(c.size() == 3);  // 0 + 1 and 2 - 1 coincide
    CHECK(c.weight(1) == doctest::Approx(0.5));
    double total = 0.0;
    for (double w : c.weights()) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Luxemburg norm anchors") {
    Rng rng(1);
    auto lam = DiscreteMeasure(1, {0.0, 1.0, 2.0}, {0.2, 0.3, 0.5});
    CHECK(luxemburg_norm(VectorSample::scalar({0.0, 0.0, 0.0}), CostSpec::power(2.0), lam) == 0.0);
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
        for (int trial = 0; trial < 50; ++trial) {
            auto m = random_measure(rng, 6, 1);
            auto u = random_sample(rng, 6);
            double expect = 0.0;
            for (std::size_t i = 0; i < 6; ++i) expect += m.weight(i) * std::pow(std::fabs(u[i]), p);
            expect = std::pow(expect, 1.0 / p);
            CHECK(luxemburg_norm(VectorSample::scalar(u), CostSpec::power(p), m) ==
                  doctest::Approx(expect).epsilon(1e-12));
        }
    }
    // Two-point radial case against a nested scan of r -> sum lam L(u / r).
    auto quartic = CostSpec::radial("s^2+s^4");
    auto two = DiscreteMeasure(1, {0.0, 1.0}, {0.5, 0.5});
    auto integral = [](double r) {
        auto v = [](double s) { return s * s + s * s * s * s; };
        return 0.5 * v(1.0 / r) + 0.5 * v(2.0 / r);
    };
    double coarse = 0.0;
    for (double r = 0.5; r < 5.0; r += 1e-3)
        if (integral(r) <= 1.0) {
            coarse = r;
            break;
        }
    double fine = coarse;
    for (long i = 0; i <= 1000000; ++i) {
        double r = coarse - 1e-3 + static_cast<double>(i) * 1e-9;
        if (integral(r) <= 1.0) {
            fine = r;
            break;
        }
    }
    CHECK(luxemburg_norm(VectorSample::scalar({1.0, 2.0}), quartic, two) == doctest::Approx(fine).epsilon(2e-9));
}

TEST_CASE("Luxemburg normalization, homogeneity and subadditivity") {
    Rng rng(2);
    for (const auto& spec : sandwich_specs()) {
        const std::size_t dim = spec.dim();
        int violations = 0;
        for (int trial = 0; trial < 60; ++trial) {
            std::size_t n = 1 + rng.index(6);
            auto m = random_measure(rng, n, dim);
            auto u = random_sample(rng, n * dim), v = random_sample(rng, n * dim);
            double nu = luxemburg_norm(u, spec, m.weights());
            std::vector<double> z(dim);
            double integral = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t d = 0; d < dim; ++d) z[d] = u[i * dim + d] / nu;
                integral += m.weight(i) * spec.value(z);
            }
            if (std::fabs(integral - 1.0) > 1e-10) ++violations;
            double alpha = rng.uniform(0.1, 5.0);
            auto au = u;
            for (double& x : au) x *= alpha;
            if (std::fabs(luxemburg_norm(au, spec, m.weights()) - alpha * nu) > 1e-10 * alpha * nu) ++violations;
            if (spec.superlinear() &&
                std::fabs(orlicz_norm(au, spec, m.weights()) - alpha * orlicz_norm(u, spec, m.weights())) >
                    1e-10 * alpha * nu)
                ++violations;
            auto sum = u;
            for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += v[j];
            if (luxemburg_norm(sum, spec, m.weights()) > nu + luxemburg_norm(v, spec, m.weights()) + 1e-9) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("Orlicz norm of powers carries the constant p^(1/p) q^(1/q)") {
    Rng rng(3);
    auto lam = DiscreteMeasure(1, {0.0, 1.0}, {0.5, 0.5});
    CHECK(orlicz_norm(VectorSample::scalar({0.0, 0.0}), CostSpec::power(2.0), lam) == 0.0);
    CHECK(orlicz_norm(VectorSample::scalar({1.0, 1.0}), CostSpec::power(2.0), lam) ==
          doctest::Approx(2.0).epsilon(1e-10));
    for (double p : {1.25, 1.5, 2.0, 3.0, 5.0}) {
        double q = p / (p - 1.0);
        double k = std::pow(p, 1.0 / p) * std::pow(q, 1.0 / q);
        for (int trial = 0; trial < 20; ++trial) {
            auto m = random_measure(rng, 5, 1);
            auto u = random_sample(rng, 5);
            double lp = std::pow(luxemburg_norm(u, CostSpec::power(p), m.weights()), 1.0);
            CHECK(orlicz_norm(u, CostSpec::power(p), m.weights()) == doctest::Approx(k * lp).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(orlicz_norm(VectorSample::scalar({1.0, 1.0}), CostSpec::power(1.0), lam), Error);
}

TEST_CASE("sandwich between Luxemburg and twice Luxemburg") {
    Rng rng(4);
    auto specs = sandwich_specs();
    int violations = 0, instances = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto& spec = specs[static_cast<std::size_t>(trial) % specs.size()];
        std::size_t n = 1 + rng.index(8);
        auto m = random_measure(rng, n, spec.dim());
        auto u = random_sample(rng, n * spec.dim());
        double lux = luxemburg_norm(u, spec, m.weights());
        double orl = orlicz_norm(u, spec, m.weights());
        ++instances;
        if (lux > orl + 1e-9 || orl > 2.0 * lux + 1e-9) ++violations;
    }
    CHECK(instances == 500);
    CHECK(violations == 0);
}

TEST_CASE("Amemiya reduction equals direct dual maximization") {
    Rng rng(5);
    auto cases = oracle_cases();
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto& c = cases[static_cast<std::size_t>(trial) % cases.size()];
        std::size_t n = 1 + static_cast<std::size_t>(trial / static_cast<int>(cases.size())) % 4;
        auto m = random_measure(rng, n, c.spec.dim());
        auto u = random_sample(rng, n * c.spec.dim());
        std::vector<double> lam(m.weights().begin(), m.weights().end());
        double direct = oracle::orlicz_dual_max(u, c.spec.dim(), lam, c.conj, 100u + static_cast<unsigned>(trial), 2);
        double fast = orlicz_norm(u, c.spec, m.weights());
        double err = std::fabs(fast - direct) / direct;
        worst = std::max(worst, err);
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("radial three-point Orlicz norm against many restarts") {
    auto spec = CostSpec::radial("s^2+s^4");
    auto m = DiscreteMeasure(1, {0.0, 1.0, 2.0}, {0.2, 0.5, 0.3});
    std::vector<double> u{0.7, -1.3, 2.1};
    std::vector<double> lam{0.2, 0.5, 0.3};
    double direct = oracle::orlicz_dual_max(u, 1, lam, oracle::quartic_conjugate(), 77u, 500);
    CHECK(orlicz_norm(u, spec, m.weights()) == doctest::Approx(direct).epsilon(1e-5));
}

TEST_CASE("mixture inequalities") {
    Rng rng(6);
    auto pts = random_sample(rng, 5);
    auto lam = DiscreteMeasure::normalized(1, pts, random_weights(rng, 5));
    auto u = VectorSample::scalar(random_sample(rng, 5));
    std::vector<DiscreteMeasure> single{lam};
    std::vector<double> one{1.0};
    auto eq = mixture_bound_check(u, CostSpec::power(2.0), single, one);
    CHECK(eq.lhs == eq.min_side);
    CHECK(eq.lhs == eq.average_side);
    CHECK(eq.pass);

    auto quartic = CostSpec::radial("s^2+s^4");
    double g = YoungProfile::of(quartic).gamma();
    int power_fail = 0, radial_fail = 0, multi_fail = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng r(1000 + static_cast<std::uint64_t>(seed));
        auto points = random_sample(r, 5);
        std::vector<DiscreteMeasure> ms{DiscreteMeasure::normalized(1, points, random_weights(r, 5)),
                                        DiscreteMeasure::normalized(1, points, random_weights(r, 5))};
        auto v = VectorSample::scalar(random_sample(r, 5));
        std::vector<double> half{0.5, 0.5};
        auto pc = mixture_bound_check(v, CostSpec::power(2.0), ms, half);
        if (!pc.pass || pc.gamma != 1.0) ++power_fail;
        auto rc = mixture_bound_check(v, quartic, ms, half);
        if (!rc.pass || rc.gamma != g) ++radial_fail;
        ms.push_back(DiscreteMeasure::normalized(1, points, random_weights(r, 5)));
        auto ts = random_weights(r, 3);
        if (!mixture_bound_check(v, CostSpec::power(3.0), ms, ts).pass) ++multi_fail;
        if (!mixture_bound_check(v, quartic, ms, ts).pass) ++multi_fail;
    }
    CHECK(power_fail == 0);
    CHECK(radial_fail == 0);
    CHECK(multi_fail == 0);
}

TEST_CASE("convolution inequalities") {
    Grid g = Grid::line(-10.0, 10.0, 2001);
    auto identity = GridField::sample(g, [](auto x) { return x[0]; });
    auto wave = GridField::sample(g, [](auto x) { return std::sin(2.0 * x[0]) + 0.3 * x[0]; });
    double zero = 0.0;
    auto delta0 = DiscreteMeasure::dirac(std::span<const double>(&zero, 1));
    Rng rng(7);
    auto lam = random_measure(rng, 4, 1);
    auto trivial = convolution_bound_check(identity, CostSpec::power(2.0), lam, delta0);
    CHECK(trivial.lhs == trivial.rhs);
    CHECK(trivial.pass);

    auto quartic = CostSpec::radial("s^2+s^4");
    int power_fail = 0, radial_fail = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng r(2000 + static_cast<std::uint64_t>(seed));
        auto l = random_measure(r, 4, 1);
        auto k = random_measure(r, 3, 1);
        if (!convolution_bound_check(identity, CostSpec::power(2.0), l, k).pass) ++power_fail;
        auto rc = convolution_bound_check(wave, quartic, l, k);
        if (!rc.pass || rc.gamma >= 1.0) ++radial_fail;
    }
    CHECK(power_fail == 0);
    CHECK(radial_fail == 0);

    Grid g2 = Grid::plane(-6.0, 6.0, 121, -6.0, 6.0, 121);
    std::vector<double> vals;
    for (std::size_t k = 0; k < g2.size(); ++k) {
        auto p = g2.point(k);
        vals.push_back(p[0] + 0.5 * p[1]);
        vals.push_back(std::cos(p[0]) * p[1]);
    }
    GridField u2(g2, vals, 2);
    int fail2 = 0;
    for (int seed = 0; seed < 20; ++seed) {
        Rng r(3000 + static_cast<std::uint64_t>(seed));
        if (!convolution_bound_check(u2, CostSpec::radial("s^2+s^4", 2), random_measure(r, 4, 2), random_measure(r, 3, 2))
                 .pass)
            ++fail2;
    }
    CHECK(fail2 == 0);
    CHECK_THROWS_AS(convolution_bound_check(identity, CostSpec::power(2.0),
                                            DiscreteMeasure(1, {9.5}, {1.0}), DiscreteMeasure(1, {1.0}, {1.0})),
                    Error);
}
