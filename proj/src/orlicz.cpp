#include "kte/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kte/numerics.hpp"
#include "kte/young.hpp"

namespace kte {

namespace {

std::size_t checked_dim(std::span<const double> u, const CostSpec& spec, std::span<const double> lam) {
    require(u.size() == lam.size() * spec.dim(), ErrorCode::InvalidArgument,
            "sample length does not match the measure and cost dimension");
    return spec.dim();
}

double gamma_for(const CostSpec& spec) {
    if (spec.kind() == CostKind::Power) return 1.0;
    return YoungProfile::of(spec).gamma();
}

}  // namespace

double luxemburg_norm(std::span<const double> u, const CostSpec& spec, std::span<const double> lam) {
    std::size_t dim = checked_dim(u, spec, lam);
    return luxemburg([&](std::span<const double> x) { return spec.value(x); }, u, dim, lam);
}

double luxemburg_norm(const VectorSample& u, const CostSpec& spec, const DiscreteMeasure& lam) {
    require(u.dim == spec.dim(), ErrorCode::InvalidArgument, "sample dimension does not match the cost");
    return luxemburg_norm(u.values, spec, lam.weights());
}

double orlicz_norm(std::span<const double> u, const CostSpec& spec, std::span<const double> lam) {
    std::size_t dim = checked_dim(u, spec, lam);
    if (!spec.superlinear()) fail(ErrorCode::NotSuperlinear, "Orlicz norm needs a finite conjugate");
    double lux = luxemburg_norm(u, spec, lam);
    if (lux == 0.0) return 0.0;
    std::vector<double> z(dim);
    auto g = [&](double k) {
        double s = 0.0;
        for (std::size_t i = 0; i < lam.size(); ++i) {
            for (std::size_t d = 0; d < dim; ++d) z[d] = k * u[i * dim + d];
            s += lam[i] * spec.value(std::span<const double>(z));
        }
        return (1.0 + s) / k;
    };
    // g(k) >= 1/k > 2 lux = g(1/lux) for k < 1/(2 lux); g is unimodal in k.
    double a = std::log(0.5 / lux);
    double b = std::log(1.0 / lux);
    double gb = g(std::exp(b));
    for (;;) {
        double next = b + 1.0;
        double gn = g(std::exp(next));
        b = next;
        if (gn > gb || !std::isfinite(gn)) break;
        gb = gn;
    }
    auto best = num::golden_max([&](double lk) { return -g(std::exp(lk)); }, a, b, 1e-12);
    double value = -best.second;
    // The endpoints can only be better when the minimum sits on the bracket edge.
    return std::min({value, g(std::exp(a)), 2.0 * lux});
}

double orlicz_norm(const VectorSample& u, const CostSpec& spec, const DiscreteMeasure& lam) {
    require(u.dim == spec.dim(), ErrorCode::InvalidArgument, "sample dimension does not match the cost");
    return orlicz_norm(u.values, spec, lam.weights());
}

MixtureCheck mixture_bound_check(const VectorSample& u, const CostSpec& spec, std::span<const DiscreteMeasure> lams,
                                 std::span<const double> ts) {
    auto mix = DiscreteMeasure::mixture(lams, ts);
    MixtureCheck c;
    c.lhs = luxemburg_norm(u, spec, mix);
    c.min_side = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lams.size(); ++i) {
        double s = luxemburg_norm(u, spec, lams[i]);
        c.min_side = std::min(c.min_side, s);
        c.average_side += ts[i] * s;
    }
    c.gamma = gamma_for(spec);
    c.rhs = c.gamma * c.average_side;
    c.quasi_concave = c.lhs >= c.min_side - 1e-9;
    c.concave = c.lhs >= c.rhs - 1e-9;
    c.pass = c.quasi_concave && c.concave;
    return c;
}

ConvolutionCheck convolution_bound_check(const GridField& u, const CostSpec& spec, const DiscreteMeasure& lam,
                                         const DiscreteMeasure& kap) {
    const std::size_t dim = spec.dim();
    require(u.components() == dim && u.grid().dim == dim && lam.dim() == dim && kap.dim() == dim,
            ErrorCode::InvalidArgument, "field, measures and cost must share one dimension");
    auto sample_at = [&](const DiscreteMeasure& m, std::span<const double> shift) {
        std::vector<double> vals(m.size() * dim);
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::size_t d = 0; d < dim; ++d) x[d] = m.point(i)[d] + shift[d];
            require(u.contains(x), ErrorCode::OutOfDomain, "shifted point lies outside the field grid");
            for (std::size_t d = 0; d < dim; ++d) vals[i * dim + d] = u.interpolate(x, d);
        }
        return vals;
    };
    std::vector<double> zero(dim, 0.0);
    auto conv = lam.convolve(kap);
    ConvolutionCheck c;
    c.lhs = luxemburg_norm(sample_at(conv, zero), spec, conv.weights());
    for (std::size_t j = 0; j < kap.size(); ++j)
        c.sum += kap.weight(j) * luxemburg_norm(sample_at(lam, kap.point(j)), spec, lam.weights());
    c.gamma = gamma_for(spec);
    c.rhs = c.gamma * c.sum;
    c.pass = c.lhs >= c.rhs - 1e-9;
    return c;
}

}  // namespace kte
