#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "kte/cost.hpp"
#include "kte/error.hpp"
#include "kte/grid.hpp"
#include "kte/measure.hpp"

namespace kte {

// Luxemburg pseudo-norm inf{r > 0 : sum_i w_i F(u_i / r) <= 1} for any convex
// F with F(0) = 0 and F > 0 off 0. u holds dim entries per weight.
template <class F>
double luxemburg(F&& fn, std::span<const double> u, std::size_t dim, std::span<const double> w) {
    require(u.size() == w.size() * dim, ErrorCode::InvalidArgument, "sample and weights have mismatched lengths");
    double scale = 0.0;
    for (double x : u) scale = std::fmax(scale, std::fabs(x));
    if (scale == 0.0) return 0.0;
    std::vector<double> z(dim);
    auto integral = [&](double r) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            bool zero = true;
            for (std::size_t d = 0; d < dim; ++d) {
                z[d] = u[i * dim + d] / r;
                zero = zero && z[d] == 0.0;
            }
            if (!zero) s += w[i] * fn(std::span<const double>(z));
        }
        return s;
    };
    double lo = scale, hi = scale;
    while (integral(hi) > 1.0) {
        hi *= 2.0;
        require(std::isfinite(hi), ErrorCode::InvalidArgument, "Luxemburg bracket diverged");
    }
    while (integral(lo) <= 1.0) {
        lo *= 0.5;
        require(lo > 0.0, ErrorCode::InvalidArgument, "Luxemburg bracket collapsed");
    }
    // integral(lo) > 1 >= integral(hi)
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (integral(mid) > 1.0 ? lo : hi) = mid;
    }
    return hi;
}

// ||u||_{L(lam)}
double luxemburg_norm(const VectorSample& u, const CostSpec& spec, const DiscreteMeasure& lam);
double luxemburg_norm(std::span<const double> u, const CostSpec& spec, std::span<const double> lam);

// |u|_{L(lam)} = sup{sum lam <u, v> : ||v||_{L*(lam)} <= 1}, evaluated as
// inf_{k > 0} (1 + sum lam L(k u)) / k. Throws NotSuperlinear when L* is not finite.
double orlicz_norm(const VectorSample& u, const CostSpec& spec, const DiscreteMeasure& lam);
double orlicz_norm(std::span<const double> u, const CostSpec& spec, std::span<const double> lam);

struct MixtureCheck {
    double lhs = 0.0;           // S(sum t_i lam_i)
    double min_side = 0.0;      // min_i S(lam_i)
    double average_side = 0.0;  // sum t_i S(lam_i)
    double gamma = 1.0;         // 1 for Power costs
    double rhs = 0.0;           // gamma * average_side
    bool quasi_concave = false;
    bool concave = false;
    bool pass = false;
};

// S(lam) = ||u||_{L(lam)} along a mixture of measures on one support.
MixtureCheck mixture_bound_check(const VectorSample& u, const CostSpec& spec, std::span<const DiscreteMeasure> lams,
                                 std::span<const double> ts);

struct ConvolutionCheck {
    double lhs = 0.0;  // ||u||_{L(lam * kap)}
    double sum = 0.0;  // sum_y kap(y) ||u(. + y)||_{L(lam)}
    double gamma = 1.0;
    double rhs = 0.0;  // gamma * sum
    bool pass = false;
};

// u is a field with spec.dim() components, evaluated by interpolation at the
// points of lam * kap.
ConvolutionCheck convolution_bound_check(const GridField& u, const CostSpec& spec, const DiscreteMeasure& lam,
                                         const DiscreteMeasure& kap);

}  // namespace kte
