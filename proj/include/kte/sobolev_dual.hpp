#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kte/cost.hpp"
#include "kte/grid.hpp"

namespace kte {

// Discrete gradient: forward differences along each axis, backward at the
// last index. Returns a field with grid.dim components.
GridField forward_gradient(const GridField& f);

// ||grad_h f||_{L*(lam)} and sum lam L*(grad_h f) with node weights lam.
double gradient_norm(const GridField& f, const ConjugateSpec& conj, std::span<const double> lam);
double gradient_energy(const GridField& f, const ConjugateSpec& conj, std::span<const double> lam);

struct DualNormProblem {
    Grid grid;
    std::vector<double> mu;
    std::vector<double> nu;
    std::vector<double> lam;
    CostSpec spec = CostSpec::power(2.0);

    // Throws InvalidArgument unless mu, nu are probability weights on the
    // nodes and lam is strictly positive everywhere.
    void validate() const;
};

struct AscentOptions {
    int restarts = 20;
    int stall_window = 50;
    double stall_tol = 1e-9;
    int max_iterations = 2000;
    std::uint64_t seed = 0x6b7465;
};

struct DualNormResult {
    double value = 0.0;
    GridField witness;         // normalized to ||grad_h witness||_{L*(lam)} = 1
    double constraint = 0.0;   // sum lam L*(grad_h witness)
    bool degenerate = false;   // mu = nu; value and witness are zero
    int best_restart = -1;
    int iterations = 0;        // summed over restarts
    int restarts = 0;
};

// sup{sum f (nu - mu) : sum lam L*(grad_h f) <= 1} by preconditioned ascent
// on the scale-free ratio, with seeded restarts.
DualNormResult dual_sobolev_norm(const DualNormProblem& prob, const AscentOptions& opt = {});

// H^{-1,p}(lam) in 1D: sup{sum f (nu - mu) : ||grad_h f||_{L^q(lam)} <= 1},
// q = p/(p-1), in closed form (sum_e |F_mu - F_nu|^p w_e^(1-p) h)^(1/p) with
// w_e = lam_e / h and the last edge carrying the weight of both end nodes.
double dual_sobolev_norm_1d_p(std::span<const double> mu, std::span<const double> nu, std::span<const double> lam,
                              double h, double p);

struct MeasureTriple {
    std::vector<double> mu;
    std::vector<double> nu;
    std::vector<double> lam;
};

struct LscCheck {
    std::vector<double> values;  // norms along the sequence
    double limit = 0.0;          // norm at the limit triple
    double liminf_proxy = 0.0;   // min over the last 3 values
    bool pass = false;
};

// limit <= liminf_k value_k + 1e-6.
LscCheck lsc_check(const Grid& grid, std::span<const MeasureTriple> sequence, const MeasureTriple& limit,
                   const CostSpec& spec, const AscentOptions& opt = {});

// Convolution of node weights with a mollifier at scale eps.
using Mollifier = std::function<std::vector<double>(std::span<const double>, double)>;

struct ContinuityCheck {
    std::vector<double> eps;
    std::vector<double> values;  // norms of the mollified triples
    double limit = 0.0;
    double gamma = 1.0;
    bool power = true;
    double lower_proxy = 0.0;  // min over the last 3 values
    double upper_proxy = 0.0;  // max over the last 3 values
    double band_lo = 0.0;
    double band_hi = 0.0;
    bool pass = false;
};

// Power costs: value at the smallest eps within limit (1 +- 0.05).
// Other costs: lower_proxy >= limit - 1e-6 and upper_proxy <= limit/gamma + 1e-6.
ContinuityCheck convolution_continuity_check(const DualNormProblem& prob, const Mollifier& kappa,
                                             std::span<const double> eps_list, const AscentOptions& opt = {});

}  // namespace kte
