#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kte/cost.hpp"
#include "kte/grid.hpp"

namespace kte {

struct InfConvolution {
    GridField value;
    // 1 where the search ball reaches past the grid and the minimum was taken
    // over in-domain nodes only.
    std::vector<std::uint8_t> clipped;
    // Set when any node is clipped; a warning, not an error.
    bool window_exceeds_grid = false;
    double window_radius = 0.0;
};

// Q_t f(x_i) = min over nodes y_j with |x_i - y_j| <= t R_L(2M/t) of f(y_j) + t L((x_i - y_j)/t).
InfConvolution inf_convolve(const GridField& f, const CostSpec& spec, double t);

// Search radius t R_L(2 sup|f| / t) used by inf_convolve.
double window_radius(const GridField& f, const CostSpec& spec, double t);

// Distance from each node to the nearest grid edge.
std::vector<double> boundary_distance(const Grid& g);

// sup |Q_{t+s} f - Q_t Q_s f| over nodes whose windows stay in the grid.
double semigroup_residual(const GridField& f, const CostSpec& spec, double t, double s);

struct MaskedField {
    GridField field;
    std::vector<std::uint8_t> valid;

    std::size_t count() const;
    double sup_abs() const;
    // q-quantile of |field| over valid nodes.
    double quantile_abs(double q) const;
};

// (Q_eps f - f)/eps + L*(grad f), central differences, valid off the boundary
// and where the window is not clipped.
MaskedField generator_probe(const GridField& f, const CostSpec& spec, double eps);

// (Q_{t+dt} f - Q_{t-dt} f)/(2 dt) + L*(grad Q_t f).
MaskedField hj_residual(const GridField& f, const CostSpec& spec, double t, double dt);

struct InterpolationCheck {
    double lhs;
    double rhs;
    double gap;
};

// lhs = sum nu (Q_t f - f); rhs = -trapezoid over [0, t] of sum nu L*(grad Q_s f).
InterpolationCheck interpolation_check(const GridField& f, const CostSpec& spec, std::span<const double> nu,
                                       double t, int steps);

}  // namespace kte
