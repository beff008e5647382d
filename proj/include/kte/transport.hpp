#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kte/cost.hpp"
#include "kte/grid.hpp"
#include "kte/measure.hpp"

namespace kte {

inline constexpr std::size_t kMaxCostCells = 10'000'000;

struct PlanEntry {
    std::size_t i;
    std::size_t j;
    double mass;
};

// Coupling of mu (rows, points x_i) and nu (columns, points y_j) for the
// cost c_ij = L(x_i - y_j), with dual potentials f on mu and g on nu.
struct TransportPlan {
    DiscreteMeasure mu;
    DiscreteMeasure nu;
    std::vector<PlanEntry> entries;  // basic cells with positive mass
    std::vector<double> f;
    std::vector<double> g;
    double cost = 0.0;  // sum pi_ij c_ij
    double dual = 0.0;  // sum mu f + sum nu g
    double gap = 0.0;   // |cost - dual|
    double max_dual_violation = 0.0;  // max_ij f_i + g_j - c_ij, clipped at 0
    std::size_t pivots = 0;
};

// Exact optimal basic plan by the network simplex method. Throws SizeLimit
// when the cost matrix would exceed kMaxCostCells entries.
TransportPlan solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& spec);

struct MonotoneCoupling {
    double cost = 0.0;
    std::vector<PlanEntry> plan;  // indices into the unsorted supports
};

// Quantile coupling in 1D; optimal for convex L.
MonotoneCoupling ot_1d_monotone(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& spec);

struct SupportCheck {
    bool pass = false;
    double max_residual = 0.0;  // max |f_i + g_j - c_ij| over cells with mass > 1e-12
    std::size_t checked = 0;
};

// f_i + g_j = L(x_i - y_j) within 1e-8 on every cell carrying mass.
SupportCheck support_optimality_check(const TransportPlan& plan, const CostSpec& spec);

// sum nu Q_1 f - sum mu f for grid weights mu, nu; a lower bound on the
// transport cost between them for the cost L(x - y).
double dual_via_hopf_lax(const GridField& f, std::span<const double> mu, std::span<const double> nu,
                         const CostSpec& spec);

}  // namespace kte
