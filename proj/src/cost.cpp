#include "kte/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kte/error.hpp"
#include "kte/numerics.hpp"
#include "kte/rng.hpp"
#include "kte/simd.hpp"

namespace kte {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(std::span<const double> x) {
    if (x.size() == 1) return std::fabs(x[0]);
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double pow_abs(double x, double p) {
    double a = std::fabs(x);
    if (p == 2.0) return a * a;
    if (p == 1.0) return a;
    return std::pow(a, p);
}

// Index of the node at the origin; throws if 0 is not an interior node.
std::size_t origin_node(const Grid& g) {
    std::array<std::size_t, 2> idx{0, 0};
    for (std::size_t a = 0; a < g.dim; ++a) {
        double u = -g.origin[a] / g.h[a];
        double r = std::round(u);
        require(std::fabs(u - r) <= 1e-9 && r >= 1.0 && r <= static_cast<double>(g.n[a]) - 2.0,
                ErrorCode::InvalidSpec, "cost table must contain 0 as an interior node");
        idx[a] = static_cast<std::size_t>(r);
    }
    return g.flat(idx[0], idx[1]);
}

bool on_boundary(const Grid& g, std::size_t k) {
    auto m = g.multi(k);
    for (std::size_t a = 0; a < g.dim; ++a)
        if (m[a] == 0 || m[a] + 1 == g.n[a]) return true;
    return false;
}

void check_table_convexity(const GridField& t) {
    const Grid& g = t.grid();
    const std::size_t n = g.size();
    constexpr double ts[3] = {0.25, 0.5, 0.75};
    auto check = [&](std::size_t a, std::size_t b) {
        auto ma = g.multi(a), mb = g.multi(b);
        for (double s : ts) {
            // Only combinations landing on a node are tested so that the
            // interpolation scheme cannot create spurious violations.
            std::array<std::size_t, 2> mc{0, 0};
            bool on_node = true;
            for (std::size_t d = 0; d < g.dim; ++d) {
                double c = s * static_cast<double>(ma[d]) + (1.0 - s) * static_cast<double>(mb[d]);
                if (c != std::floor(c)) on_node = false;
                mc[d] = static_cast<std::size_t>(c);
            }
            if (!on_node) continue;
            double la = t[a], lb = t[b], lc = t[g.flat(mc[0], mc[1])];
            double bound = s * la + (1.0 - s) * lb + 1e-9 * (1.0 + std::fabs(la) + std::fabs(lb));
            if (lc > bound) fail(ErrorCode::InvalidSpec, "cost table is not convex");
        }
    };
    if (n <= 4096) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) check(a, b);
    } else {
        Rng rng(0x636f6e76ULL);
        for (int it = 0; it < 4000000; ++it) check(rng.index(n), rng.index(n));
    }
}

// Gradient of the multilinear interpolant on the cell containing x.
void table_gradient(const GridField& t, std::span<const double> x, std::span<double> out) {
    const Grid& g = t.grid();
    auto locate = [&](std::size_t axis, double v) {
        double u = (v - g.origin[axis]) / g.h[axis];
        double last = static_cast<double>(g.n[axis] - 1);
        if (u <= 0.0) return std::pair<std::size_t, double>{0, 0.0};
        if (u >= last) return std::pair<std::size_t, double>{g.n[axis] - 2, 1.0};
        double c = std::floor(u);
        return std::pair<std::size_t, double>{static_cast<std::size_t>(c), u - c};
    };
    auto [i, s] = locate(0, x[0]);
    if (g.dim == 1) {
        out[0] = (t[i + 1] - t[i]) / g.h[0];
        return;
    }
    auto [j, r] = locate(1, x[1]);
    double v00 = t[g.flat(i, j)], v01 = t[g.flat(i, j + 1)];
    double v10 = t[g.flat(i + 1, j)], v11 = t[g.flat(i + 1, j + 1)];
    out[0] = ((1.0 - r) * (v10 - v00) + r * (v11 - v01)) / g.h[0];
    out[1] = ((1.0 - s) * (v01 - v00) + s * (v11 - v10)) / g.h[1];
}

}  // namespace

CostSpec CostSpec::power(double p, std::size_t dim, PowerNorm norm, std::vector<double> weights) {
    require(std::isfinite(p) && p >= 1.0, ErrorCode::InvalidSpec, "power exponent must satisfy p >= 1");
    require(dim >= 1, ErrorCode::InvalidSpec, "dimension must be >= 1");
    CostSpec c;
    c.kind_ = CostKind::Power;
    c.dim_ = dim;
    c.p_ = p;
    c.norm_ = norm;
    if (norm == PowerNorm::WeightedLp) {
        if (weights.empty()) weights.assign(dim, 1.0);
        require(weights.size() == dim, ErrorCode::InvalidSpec, "one weight per axis is required");
        for (double w : weights)
            require(std::isfinite(w) && w > 0.0, ErrorCode::InvalidSpec, "axis weights must be positive");
        c.weights_ = std::move(weights);
    } else {
        require(weights.empty(), ErrorCode::InvalidSpec, "weights apply to the weighted axis norm only");
    }
    return c;
}

CostSpec CostSpec::radial(RadialExpr profile, std::size_t dim) {
    require(dim >= 1, ErrorCode::InvalidSpec, "dimension must be >= 1");
    CostSpec c;
    c.kind_ = CostKind::Radial;
    c.dim_ = dim;
    c.profile_ = std::make_shared<const RadialExpr>(std::move(profile));
    return c;
}

CostSpec CostSpec::radial(std::string_view profile, std::size_t dim) {
    return radial(RadialExpr::parse(profile), dim);
}

CostSpec CostSpec::blackbox(GridField table, bool convex) {
    require(table.components() == 1, ErrorCode::InvalidSpec, "cost table must be scalar");
    const Grid& g = table.grid();
    std::size_t zero = origin_node(g);
    require(std::fabs(table[zero]) <= 1e-12, ErrorCode::InvalidSpec, "cost table must vanish at 0");
    for (std::size_t k = 0; k < g.size(); ++k)
        if (k != zero) require(table[k] > 0.0, ErrorCode::InvalidSpec, "cost table must be positive away from 0");
    check_table_convexity(table);

    CostSpec c;
    c.kind_ = CostKind::BlackBox;
    c.dim_ = g.dim;
    c.convex_flag_ = convex;
    bool even = true;
    for (std::size_t a = 0; a < g.dim; ++a)
        if (std::fabs(g.lo(a) + g.hi(a)) > 1e-12 * (g.hi(a) - g.lo(a))) even = false;
    if (even) {
        std::size_t n = g.size();
        for (std::size_t k = 0; k < n && even; ++k)
            if (std::fabs(table[k] - table[n - 1 - k]) > 1e-12 * (1.0 + std::fabs(table[k]))) even = false;
    }
    c.even_ = even;
    c.table_ = std::make_shared<const GridField>(std::move(table));
    return c;
}

CostSpec CostSpec::reflected() const {
    if (even_ || kind_ != CostKind::BlackBox) return *this;
    const Grid& src = table_->grid();
    Grid g = src;
    for (std::size_t a = 0; a < g.dim; ++a) g.origin[a] = -src.hi(a);
    std::vector<double> vals(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto mi = g.multi(k);
        vals[k] = (*table_)[src.flat(src.n[0] - 1 - mi[0], g.dim == 2 ? src.n[1] - 1 - mi[1] : 0)];
    }
    CostSpec c = *this;
    c.table_ = std::make_shared<const GridField>(g, std::move(vals));
    return c;
}

double CostSpec::value(std::span<const double> x) const {
    switch (kind_) {
        case CostKind::Power:
            if (norm_ == PowerNorm::Euclidean) return pow_abs(norm2(x), p_);
            {
                double s = 0.0;
                for (std::size_t k = 0; k < dim_; ++k) s += weights_[k] * pow_abs(x[k], p_);
                return s;
            }
        case CostKind::Radial: return profile_->value(norm2(x));
        case CostKind::BlackBox:
            if (!table_->contains(x)) fail(ErrorCode::OutOfDomain, "point outside the cost table");
            return table_->interpolate(x);
    }
    return 0.0;
}

void CostSpec::gradient(std::span<const double> x, std::span<double> out) const {
    switch (kind_) {
        case CostKind::Power:
            if (norm_ == PowerNorm::Euclidean) {
                double r = norm2(x);
                double f = r > 0.0 ? p_ * (p_ == 2.0 ? 1.0 : std::pow(r, p_ - 2.0)) : 0.0;
                for (std::size_t k = 0; k < dim_; ++k) out[k] = f * x[k];
            } else {
                for (std::size_t k = 0; k < dim_; ++k) {
                    double a = std::fabs(x[k]);
                    double d = a > 0.0 ? weights_[k] * p_ * std::pow(a, p_ - 1.0) : 0.0;
                    out[k] = std::copysign(d, x[k]);
                }
            }
            return;
        case CostKind::Radial: {
            double r = norm2(x);
            double f = r > 0.0 ? profile_->jet(r).d1 / r : 0.0;
            for (std::size_t k = 0; k < dim_; ++k) out[k] = f * x[k];
            return;
        }
        case CostKind::BlackBox:
            if (!table_->contains(x)) fail(ErrorCode::OutOfDomain, "point outside the cost table");
            table_gradient(*table_, x, out);
            return;
    }
}

bool CostSpec::superlinear() const {
    switch (kind_) {
        case CostKind::Power: return p_ > 1.0;
        case CostKind::Radial: return !profile_->linear_at_infinity();
        case CostKind::BlackBox: return true;
    }
    return false;
}

bool CostSpec::is_radial_form() const {
    return kind_ == CostKind::Radial || (kind_ == CostKind::Power && norm_ == PowerNorm::Euclidean);
}

double CostSpec::radial_value(double s) const {
    require(is_radial_form(), ErrorCode::InvalidArgument, "cost has no radial profile");
    return kind_ == CostKind::Radial ? profile_->value(s) : pow_abs(s, p_);
}

ConjugateSpec::Scalar radial_conjugate(const RadialExpr& v, double sigma) {
    if (!(sigma > 0.0)) return {0.0, 0.0};
    if (v.jet(0.0).d1 >= sigma) return {0.0, 0.0};
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (v.jet(hi).d1 < sigma) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 2000 || !std::isfinite(hi)) return {kInf, kInf};
    }
    double s = hi;
    for (int it = 0; it < 200; ++it) {
        RadialExpr::Jet j = v.jet(s);
        double g = j.d1 - sigma;
        if (g == 0.0) {
            lo = hi = s;
            break;
        }
        if (g > 0.0)
            hi = s;
        else
            lo = s;
        if (hi - lo <= 1e-15 * hi) break;
        double next = (j.d2 > 0.0 && std::isfinite(j.d2)) ? s - g / j.d2 : lo;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - s) <= 1e-16 * s) break;
        s = next;
    }
    // The maximizer of the concave objective: compare the bracket ends.
    double vl = sigma * lo - v.value(lo), vh = sigma * hi - v.value(hi), vs = sigma * s - v.value(s);
    double best = vs, arg = s;
    if (vl > best) best = vl, arg = lo;
    if (vh > best) best = vh, arg = hi;
    return {std::fmax(best, 0.0), arg};
}

ConjugateSpec legendre(const CostSpec& spec) {
    if (!spec.superlinear())
        fail(ErrorCode::NotSuperlinear, "the Legendre transform is infinite off a bounded set");
    ConjugateSpec c(spec);
    if (spec.kind() == CostKind::Power) {
        double p = spec.exponent();
        c.q_ = p / (p - 1.0);
        c.cq_ = 1.0 / (c.q_ * std::pow(p, c.q_ - 1.0));
    } else if (spec.kind() == CostKind::BlackBox) {
        const GridField& t = spec.table();
        const Grid& g = t.grid();
        auto nodes = std::make_shared<std::array<std::vector<double>, 3>>();
        for (std::size_t k = 0; k < g.size(); ++k) {
            auto pt = g.point(k);
            (*nodes)[0].push_back(pt[0]);
            (*nodes)[1].push_back(pt[1]);
            (*nodes)[2].push_back(t[k]);
        }
        c.nodes_ = nodes;
        // Slopes of the table at its edges bound the region where the
        // discrete maximum stays in the interior.
        double radius = kInf;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!on_boundary(g, k)) continue;
            auto m = g.multi(k);
            for (std::size_t a = 0; a < g.dim; ++a) {
                if (m[a] != 0 && m[a] + 1 != g.n[a]) continue;
                auto inner = m;
                inner[a] = m[a] == 0 ? 1 : m[a] - 1;
                double slope = (t[k] - t[g.flat(inner[0], inner[1])]) / g.h[a];
                radius = std::fmin(radius, slope);
            }
        }
        c.validity_ = std::fmax(radius, 0.0);
    }
    return c;
}

double ConjugateSpec::value(std::span<const double> y) const {
    switch (cost_.kind()) {
        case CostKind::Power:
            if (cost_.norm() == PowerNorm::Euclidean) return cq_ * pow_abs(norm2(y), q_);
            {
                double s = 0.0;
                auto w = cost_.weights();
                for (std::size_t k = 0; k < cost_.dim(); ++k) s += w[k] * cq_ * pow_abs(y[k] / w[k], q_);
                return s;
            }
        case CostKind::Radial: return radial_conjugate(cost_.profile(), norm2(y)).value;
        case CostKind::BlackBox: {
            const auto& nd = *nodes_;
            const Grid& g = cost_.table().grid();
            simd::ArgMax best = g.dim == 1 ? simd::max_affine_1d(nd[0].data(), nd[2].data(), nd[2].size(), y[0])
                                           : simd::max_affine_2d(nd[0].data(), nd[1].data(), nd[2].data(),
                                                                 nd[2].size(), y[0], y[1]);
            if (on_boundary(g, best.index))
                fail(ErrorCode::OutOfDomain, "conjugate maximizer lies on the cost table boundary");
            return best.value;
        }
    }
    return 0.0;
}

void ConjugateSpec::gradient(std::span<const double> y, std::span<double> out) const {
    const std::size_t d = cost_.dim();
    switch (cost_.kind()) {
        case CostKind::Power:
            if (cost_.norm() == PowerNorm::Euclidean) {
                double r = norm2(y);
                double f = r > 0.0 ? cq_ * q_ * (q_ == 2.0 ? 1.0 : std::pow(r, q_ - 2.0)) : 0.0;
                for (std::size_t k = 0; k < d; ++k) out[k] = f * y[k];
            } else {
                auto w = cost_.weights();
                for (std::size_t k = 0; k < d; ++k) {
                    double a = std::fabs(y[k] / w[k]);
                    out[k] = std::copysign(a > 0.0 ? cq_ * q_ * std::pow(a, q_ - 1.0) : 0.0, y[k]);
                }
            }
            return;
        case CostKind::Radial: {
            double r = norm2(y);
            double f = r > 0.0 ? radial_conjugate(cost_.profile(), r).argmax / r : 0.0;
            for (std::size_t k = 0; k < d; ++k) out[k] = f * y[k];
            return;
        }
        case CostKind::BlackBox: {
            const auto& nd = *nodes_;
            const Grid& g = cost_.table().grid();
            simd::ArgMax best = g.dim == 1 ? simd::max_affine_1d(nd[0].data(), nd[2].data(), nd[2].size(), y[0])
                                           : simd::max_affine_2d(nd[0].data(), nd[1].data(), nd[2].data(),
                                                                 nd[2].size(), y[0], y[1]);
            if (on_boundary(g, best.index))
                fail(ErrorCode::OutOfDomain, "conjugate maximizer lies on the cost table boundary");
            for (std::size_t k = 0; k < d; ++k) out[k] = nd[k][best.index];
            return;
        }
    }
}

ConjugateSpec::Scalar ConjugateSpec::scalar(double sigma) const {
    if (cost_.kind() == CostKind::Radial) return radial_conjugate(cost_.profile(), sigma);
    require(cost_.is_radial_form(), ErrorCode::InvalidArgument, "conjugate has no radial profile");
    double s = std::fmax(sigma, 0.0);
    return {cq_ * pow_abs(s, q_), cq_ * q_ * pow_abs(s, q_ - 1.0)};
}

double radius_RL(const CostSpec& spec, double r) {
    require(r >= 0.0 && std::isfinite(r), ErrorCode::InvalidArgument, "radius_RL needs a finite r >= 0");
    if (r == 0.0) return 0.0;
    switch (spec.kind()) {
        case CostKind::Power: {
            double p = spec.exponent();
            if (spec.norm() == PowerNorm::Euclidean) return std::pow(r, 1.0 / p);
            auto w = spec.weights();
            if (p <= 2.0) {
                double wmin = *std::min_element(w.begin(), w.end());
                return std::pow(r / wmin, 1.0 / p);
            }
            // Interior maximizer of sum (a_k / w_k)^(2/p) subject to sum a_k = r.
            double total = 0.0;
            std::vector<double> a(w.size());
            for (std::size_t k = 0; k < w.size(); ++k) total += (a[k] = std::pow(w[k], 2.0 / (2.0 - p)));
            double s = 0.0;
            for (std::size_t k = 0; k < w.size(); ++k) s += std::pow(r * a[k] / total / w[k], 2.0 / p);
            return std::sqrt(s);
        }
        case CostKind::Radial: {
            const RadialExpr& v = spec.profile();
            double hi = 1.0;
            while (v.value(hi) < r) hi *= 2.0;
            double lo = hi == 1.0 ? 0.0 : 0.5 * hi;
            if (v.value(hi) == r) return hi;
            return num::bisect_increasing([&](double s) { return v.value(s) - r; }, lo, hi, 1e-15);
        }
        case CostKind::BlackBox: {
            const GridField& t = spec.table();
            const Grid& g = t.grid();
            double best = 0.0;
            std::size_t arg = 0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (t[k] > r) continue;
                if (on_boundary(g, k)) fail(ErrorCode::Unbounded, "sublevel set reaches the cost table edge");
                auto pt = g.point(k);
                double len = std::hypot(pt[0], pt[1]);
                if (len > best) best = len, arg = k;
            }
            if (best == 0.0) return 0.0;
            auto pt = g.point(arg);
            std::array<double, 2> dir{pt[0] / best, pt[1] / best};
            // Distance from 0 to the table edge along dir.
            double exit = kInf;
            for (std::size_t a = 0; a < g.dim; ++a) {
                if (dir[a] > 0.0) exit = std::fmin(exit, g.hi(a) / dir[a]);
                if (dir[a] < 0.0) exit = std::fmin(exit, g.lo(a) / dir[a]);
            }
            auto along = [&](double tau) {
                std::array<double, 2> x{tau * dir[0], tau * dir[1]};
                return t.interpolate(std::span<const double>(x.data(), g.dim));
            };
            if (along(exit) <= r) fail(ErrorCode::Unbounded, "sublevel set reaches the cost table edge");
            return num::bisect_increasing([&](double tau) { return along(tau) - r; }, best, exit, 1e-14);
        }
    }
    return 0.0;
}

}  // namespace kte
