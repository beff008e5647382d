#pragma once

#include <cstddef>
#include <vector>

#include "kte/young.hpp"

namespace kte {

// Phi^{-1}(s), polished against phi for sampled profiles.
double phi_inverse_exact(const YoungProfile& profile, double s);

// J(delta) = int_delta^inf ds / (s Phi^{-1}(s)).
double delta_integral(double delta, const YoungProfile& profile);

// delta > 0 with J(delta) = 1 / c.
double solve_delta(double c, const YoungProfile& profile);

// U(y) = (1 - y) Phi^{-1}(delta / (1 - y)) / c on [0, 1).
double bvp_U(double y, double c, double delta, const YoungProfile& profile);

struct ThetaOptions {
    std::size_t nodes = 2049;
    std::size_t probes = 10000;
};

// Increasing theta on [0, 1] with theta(0) = 0, theta(1) = 1 and
// (1 - theta) Phi(c theta' / (1 - theta)) = delta.
//
// With v = -log(1 - theta), t(v) = c int_0^v dw / Phi^{-1}(delta e^w). Nodes
// are uniform in v; w(v) = log(1 - t(v)) is interpolated by monotone cubic
// Hermite and inverted for t. Beyond the last node w continues linearly.
class ThetaSolution {
public:
    double c() const { return c_; }
    double delta() const { return delta_; }
    double theta(double t) const;
    double theta_prime(double t) const;
    // 1 - theta(t) without cancellation near t = 1.
    double complement(double t) const;
    // sup |(1 - theta) Phi(c theta' / (1 - theta)) - delta| over the probes.
    double residual_sup() const { return residual_sup_; }
    // R(1) = int_0^1 dy / U(y).
    double r_at_one() const { return r_at_one_; }
    // Upper end of the probe interval [0, 1 - 1e-4].
    static constexpr double probe_end = 1.0 - 1e-4;
    std::size_t probes() const { return probes_; }

    std::vector<double> node_t() const;
    std::vector<double> node_theta() const;
    // -log(1 - theta) at the nodes.
    std::vector<double> node_v() const { return v_; }

private:
    friend ThetaSolution solve_theta(double c, const YoungProfile& profile, const ThetaOptions& opt);
    // v(t) and dv/dt.
    std::pair<double, double> v_of_t(double t) const;

    double c_ = 0.0;
    double delta_ = 0.0;
    double residual_sup_ = 0.0;
    double r_at_one_ = 0.0;
    std::size_t probes_ = 0;
    std::vector<double> v_;   // node v values
    std::vector<double> w_;   // log(1 - t) at nodes
    std::vector<double> dw_;  // dw/dv at nodes after limiting
};

// Throws QuadratureFailure when |R(1) - 1| > 1e-7.
ThetaSolution solve_theta(double c, const YoungProfile& profile, const ThetaOptions& opt = {});

// int_0^1 (1 - theta) Phi(c theta' / (1 - theta)) dt by the trapezoid rule.
double interpolation_constant(const ThetaSolution& sol, const YoungProfile& profile);

}  // namespace kte
