#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "kte/expr.hpp"
#include "kte/grid.hpp"

namespace kte {

enum class CostKind { Power, Radial, BlackBox };
enum class PowerNorm { Euclidean, WeightedLp };

// Convex cost L on R^n with L(0) = 0.
//   Power     L(x) = |x|^p, or sum_k w_k |x_k|^p for the weighted axis norm
//   Radial    L(x) = V(|x|) with V from the expression grammar
//   BlackBox  multilinear interpolation of a table sampled on a grid
class CostSpec {
public:
    static CostSpec power(double p, std::size_t dim = 1, PowerNorm norm = PowerNorm::Euclidean,
                          std::vector<double> weights = {});
    static CostSpec radial(RadialExpr profile, std::size_t dim = 1);
    static CostSpec radial(std::string_view profile, std::size_t dim = 1);
    // Throws InvalidSpec when the table is not convex on its nodes, has
    // L(0) != 0, or is not positive away from 0.
    static CostSpec blackbox(GridField table, bool convex = true);

    CostKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }

    double value(std::span<const double> x) const;
    double value(double x) const { return value(std::span<const double>(&x, 1)); }
    double operator()(std::span<const double> x) const { return value(x); }
    // Gradient (a subgradient at kinks; the cell slope for tables).
    void gradient(std::span<const double> x, std::span<double> out) const;

    // L*(y) finite for every y.
    bool superlinear() const;
    // L(-x) = L(x).
    bool even() const { return even_; }
    // L(-x); a copy of this cost when it is even.
    CostSpec reflected() const;

    double exponent() const { return p_; }
    PowerNorm norm() const { return norm_; }
    std::span<const double> weights() const { return weights_; }
    const RadialExpr& profile() const { return *profile_; }
    const GridField& table() const { return *table_; }
    bool convex_flag() const { return convex_flag_; }
    // Radial profile V when L(x) = V(|x|), i.e. Radial or Euclidean Power.
    bool is_radial_form() const;
    double radial_value(double s) const;

private:
    CostSpec() = default;

    CostKind kind_ = CostKind::Power;
    std::size_t dim_ = 1;
    double p_ = 2.0;
    PowerNorm norm_ = PowerNorm::Euclidean;
    std::vector<double> weights_;
    std::shared_ptr<const RadialExpr> profile_;
    std::shared_ptr<const GridField> table_;
    bool convex_flag_ = true;
    bool even_ = true;
};

// Legendre transform L*(y) = sup_x <x, y> - L(x).
class ConjugateSpec {
public:
    double value(std::span<const double> y) const;
    double value(double y) const { return value(std::span<const double>(&y, 1)); }
    // Gradient of L*, i.e. the maximizing x.
    void gradient(std::span<const double> y, std::span<double> out) const;

    // Radial conjugate profile V*(sigma) and the maximizing s.
    struct Scalar {
        double value;
        double argmax;
    };
    Scalar scalar(double sigma) const;

    bool analytic() const { return cost_.kind() != CostKind::BlackBox; }
    // |y| up to which table values are trusted; infinity for analytic forms.
    double validity_radius() const { return validity_; }
    std::size_t dim() const { return cost_.dim(); }
    const CostSpec& cost() const { return cost_; }

private:
    friend ConjugateSpec legendre(const CostSpec& spec);
    explicit ConjugateSpec(const CostSpec& c) : cost_(c) {}

    CostSpec cost_;
    double q_ = 2.0;
    double cq_ = 0.25;
    double validity_ = std::numeric_limits<double>::infinity();
    // Table nodes as separate coordinate arrays for the affine-max kernel.
    std::shared_ptr<const std::array<std::vector<double>, 3>> nodes_;
};

// Throws NotSuperlinear for p = 1 or a profile that is linear at infinity.
ConjugateSpec legendre(const CostSpec& spec);

// Conjugate profile of a scalar V by maximization of sigma*s - V(s).
ConjugateSpec::Scalar radial_conjugate(const RadialExpr& v, double sigma);

// sup{|x| : L(x) <= r}. Throws Unbounded when a table sublevel set reaches the table edge.
double radius_RL(const CostSpec& spec, double r);

struct Delta2Diagnostic {
    double sup_ratio = 0.0;
    double at_radius = 0.0;
    std::vector<double> direction;
    double threshold = 0.0;  // p_plus * (1 + 1e-3)
    bool passes = false;
};

// Samples <grad L(x), x> / L(x) over rays and log-spaced radii.
Delta2Diagnostic check_delta2(const CostSpec& spec);

}  // namespace kte
