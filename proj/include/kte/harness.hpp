#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kte/bvp.hpp"
#include "kte/cost.hpp"
#include "kte/grid.hpp"
#include "kte/sobolev_dual.hpp"
#include "kte/transport.hpp"

namespace kte {

enum class MeasureKind { Bumps, Mixture, PwConst };
enum class Theorem { T11, T12, T13 };

const char* to_string(MeasureKind k) noexcept;
const char* to_string(Theorem t) noexcept;
MeasureKind measure_kind_from_string(const std::string& s);
Theorem theorem_from_string(const std::string& s);

inline constexpr double kWeightFloor = 1e-8;
inline constexpr std::uint64_t kDefaultMasterSeed = 0x6b74652d6d617374ULL;

struct MeasurePair {
    std::vector<double> mu;
    std::vector<double> nu;
    double moment = 0.0;  // sum mu_i nu_j L(x_i - y_j)
};

// Node weights on the grid, deterministic in seed, every node at least
// kWeightFloor / (1 + N kWeightFloor).
MeasurePair gen_measures(std::uint64_t seed, MeasureKind kind, const Grid& grid,
                         const CostSpec& spec = CostSpec::power(2.0));

// Gaussian smoothing at scale eps: each node spreads its weight over the
// nodes within 6 eps, renormalized per source (separably in 2D). The
// identity for eps < h / 10.
std::vector<double> smooth(const Grid& grid, std::span<const double> w, double eps);

// KTE_SEED when set, otherwise kDefaultMasterSeed.
std::uint64_t master_seed();
// Generator seed for case s under a master seed.
std::uint64_t case_seed(std::uint64_t master, std::uint64_t s);

struct VerificationReport {
    std::string case_id;
    std::string theorem;
    CostSpec cost = CostSpec::power(2.0);
    Grid grid;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    double slack = 0.0;   // declared discretization slack
    double tol = 0.0;     // 1e-6 (1 + |rhs|) + slack
    bool pass = false;
    std::vector<std::pair<std::string, double>> constants;
    std::vector<std::pair<std::string, double>> diagnostics;
    double wall_time = 0.0;  // seconds; excluded from reproducibility
};

// One line of structured text; keys in a fixed order.
std::string to_jsonl(const VerificationReport& r, bool with_wall_time = true);

struct VerifyOptions {
    AscentOptions ascent{};
    // 1D power costs: also run the ascent next to the closed form.
    bool ascent_cross_check = true;
    std::string case_id;
};

// lhs: transport cost (W_p for T11); rhs: p * H^{-1,p} norm for T11,
// A Phi(||nu - mu||_{H^{-1,L}(mu)}) for T12 (A = Phi(p+)) and T13
// (A = Phi(p+) Phi(1/gamma)). Throws PreconditionViolation naming the clause.
VerificationReport verify_energy_bound(std::span<const double> mu, std::span<const double> nu, const CostSpec& spec,
                                       Theorem theorem, const Grid& grid, const VerifyOptions& opt = {});

// Declared grid slack for the energy bounds. T11: h sqrt(dim), the W_p
// displacement of snapping both measures to nodes. T12/T13: sum over the
// optimal plan of max_{axis, sign} |L(x - y +- h e) - L(x - y)|.
double energy_slack(Theorem theorem, const CostSpec& spec, const Grid& grid, const TransportPlan& plan);

struct LedouxCheck {
    // I(f), trapezoid of I_t(f) over the slices, int_0^1 (1 - theta) Phi(c theta' / (1 - theta)) dt.
    std::vector<double> chain_values;
    double c = 0.0;
    double delta = 0.0;
    double margin = 0.0;  // chain_values[2] - chain_values[0]
    double slack = 0.0;   // 10 (h + 1/slices)
    bool pass = false;
};

// I(f) = sum nu Q_1 f - sum mu f against the interpolation bound built from
// theta for c = ||nu - mu||_{H^{-1,L}(mu)}.
LedouxCheck verify_ledoux_interpolation(const GridField& f, std::span<const double> mu, std::span<const double> nu,
                                        const CostSpec& spec, const ThetaSolution& theta, const YoungProfile& profile,
                                        int slices = 64);

}  // namespace kte
