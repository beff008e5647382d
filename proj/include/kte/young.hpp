#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "kte/cost.hpp"

namespace kte {

// Phi(r) = sup_{x != 0} L(rx) / L(x) and the constants derived from it.
class YoungProfile {
public:
    // Throws Delta2Violation when the supremum is infinite.
    static YoungProfile of(const CostSpec& spec);
    static YoungProfile power(double p);
    // Profile of L(x) = v(|x|) for an arbitrary convex scalar v with v(0) = 0.
    // When v behaves like s^a0 near 0 and s^a1 near infinity, passing the
    // pair adds the exact limits of v(rs)/v(s) to the sampled supremum.
    static YoungProfile of_scalar(std::function<double(double)> v, std::pair<double, double> tail_exponents = {0.0, 0.0});

    double phi(double r) const;
    // Psi(r) = 1 / Phi(1 / r), Psi(0) = 0.
    double psi(double r) const;
    // Inverse of Phi on [0, inf).
    double phi_inverse(double s) const;

    double p_plus() const { return p_plus_; }
    double p_minus() const { return p_minus_; }
    // Richardson error estimate for p_plus / p_minus; 0 when exact.
    double derivative_error() const { return derivative_error_; }
    double gamma() const { return gamma_; }
    double A_thm12() const { return a12_; }
    double A_thm13() const { return a13_; }

    // Analytic (true) or sampled (false); applies to phi, psi and p_plus/p_minus.
    bool exact() const { return exact_; }

    struct Impl;

private:
    YoungProfile() = default;
    void finish();

    std::shared_ptr<const Impl> impl_;
    double p_plus_ = 0.0;
    double p_minus_ = 0.0;
    double derivative_error_ = 0.0;
    double gamma_ = 1.0;
    double a12_ = 1.0;
    double a13_ = 1.0;
    bool exact_ = true;
};

struct OneSided {
    double p_minus;
    double p_plus;
    double error;
};

OneSided one_sided_derivatives(const YoungProfile& profile);

// gamma(p1, p0) = sup{a + b : a + b r <= min(r^p1, r^p0) for r >= 0}.
// Throws InvalidOrder when p_plus < p_minus.
double gamma(double p_plus, double p_minus);

}  // namespace kte
