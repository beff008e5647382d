#include "kte/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "kte/error.hpp"
#include "kte/hopf_lax.hpp"
#include "kte/io.hpp"
#include "kte/measure.hpp"
#include "kte/rng.hpp"
#include "kte/transport.hpp"
#include "kte/young.hpp"

namespace kte {

const char* to_string(MeasureKind k) noexcept {
    switch (k) {
        case MeasureKind::Bumps: return "bumps";
        case MeasureKind::Mixture: return "mixture";
        case MeasureKind::PwConst: return "pwconst";
    }
    return "?";
}

const char* to_string(Theorem t) noexcept {
    switch (t) {
        case Theorem::T11: return "T11";
        case Theorem::T12: return "T12";
        case Theorem::T13: return "T13";
    }
    return "?";
}

MeasureKind measure_kind_from_string(const std::string& s) {
    if (s == "bumps") return MeasureKind::Bumps;
    if (s == "mixture") return MeasureKind::Mixture;
    if (s == "pwconst") return MeasureKind::PwConst;
    fail(ErrorCode::InvalidArgument, "unknown measure kind \"" + s + "\"");
}

Theorem theorem_from_string(const std::string& s) {
    if (s == "11" || s == "T11") return Theorem::T11;
    if (s == "12" || s == "T12") return Theorem::T12;
    if (s == "13" || s == "T13") return Theorem::T13;
    fail(ErrorCode::InvalidArgument, "unknown theorem \"" + s + "\"");
}

namespace {

struct Bump {
    std::array<double, 2> center;
    double sigma;
    double weight;
};

std::vector<double> density(const Grid& g, Rng& rng, MeasureKind kind) {
    std::array<double, 2> mid{}, half{};
    for (std::size_t a = 0; a < g.dim; ++a) {
        mid[a] = 0.5 * (g.lo(a) + g.hi(a));
        half[a] = 0.5 * (g.hi(a) - g.lo(a));
    }
    const double scale = 0.5 * std::min(half[0], g.dim == 2 ? half[1] : half[0]);
    std::vector<double> w(g.size(), 0.0);
    if (kind == MeasureKind::PwConst) {
        // Product of per-axis step functions on 4 to 8 random cells.
        std::array<std::vector<double>, 2> axis;
        for (std::size_t a = 0; a < g.dim; ++a) {
            std::size_t pieces = 4 + rng.index(5);
            std::vector<double> cuts{g.lo(a), g.hi(a)};
            for (std::size_t k = 1; k < pieces; ++k) cuts.push_back(rng.uniform(g.lo(a), g.hi(a)));
            std::sort(cuts.begin(), cuts.end());
            std::vector<double> level(pieces);
            for (double& l : level) l = rng.uniform(0.2, 1.0);
            axis[a].resize(g.n[a]);
            for (std::size_t i = 0; i < g.n[a]; ++i) {
                double x = g.coord(a, i);
                std::size_t cell = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
                axis[a][i] = level[std::min(std::max<std::size_t>(cell, 1), pieces) - 1];
            }
        }
        for (std::size_t k = 0; k < g.size(); ++k) {
            auto m = g.multi(k);
            w[k] = axis[0][m[0]] * (g.dim == 2 ? axis[1][m[1]] : 1.0);
        }
        return w;
    }
    std::size_t count = kind == MeasureKind::Bumps ? 1 : 2 + rng.index(2);
    double reach = kind == MeasureKind::Bumps ? 0.5 : 0.6;
    std::vector<Bump> bumps(count);
    for (auto& b : bumps) {
        for (std::size_t a = 0; a < g.dim; ++a) b.center[a] = mid[a] + rng.uniform(-reach, reach) * half[a];
        b.sigma = rng.uniform(0.3, 0.6) * scale;
        b.weight = count == 1 ? 1.0 : rng.uniform(0.2, 1.0);
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto x = g.point(k);
        for (const auto& b : bumps) {
            double r2 = 0.0;
            for (std::size_t a = 0; a < g.dim; ++a) r2 += (x[a] - b.center[a]) * (x[a] - b.center[a]);
            w[k] += b.weight * std::exp(-0.5 * r2 / (b.sigma * b.sigma));
        }
    }
    return w;
}

void floor_and_normalize(std::vector<double>& w) {
    double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x = x / s + kWeightFloor;
    s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= s;
}

// One axis of the Gaussian kernel, normalized over the in-grid targets.
std::vector<std::vector<std::pair<std::size_t, double>>> kernel_1d(const Grid& g, std::size_t axis, double eps) {
    const std::size_t n = g.n[axis];
    const double h = g.h[axis];
    const auto reach = static_cast<std::size_t>(std::floor(6.0 * eps / h));
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i >= reach ? i - reach : 0, b = std::min(n - 1, i + reach);
        double s = 0.0;
        for (std::size_t j = a; j <= b; ++j) {
            double d = (static_cast<double>(j) - static_cast<double>(i)) * h;
            double k = std::exp(-0.5 * d * d / (eps * eps));
            rows[i].push_back({j, k});
            s += k;
        }
        for (auto& e : rows[i]) e.second /= s;
    }
    return rows;
}

double moment(const Grid& g, const std::vector<double>& mu, const std::vector<double>& nu, const CostSpec& spec) {
    double s = 0.0;
    std::vector<double> z(g.dim);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.point(i);
        for (std::size_t j = 0; j < g.size(); ++j) {
            auto y = g.point(j);
            for (std::size_t a = 0; a < g.dim; ++a) z[a] = x[a] - y[a];
            s += mu[i] * nu[j] * spec.value(z);
        }
    }
    return s;
}

double max_h(const Grid& g) { return g.dim == 2 ? std::max(g.h[0], g.h[1]) : g.h[0]; }

}  // namespace

MeasurePair gen_measures(std::uint64_t seed, MeasureKind kind, const Grid& grid, const CostSpec& spec) {
    grid.validate();
    require(spec.dim() == grid.dim, ErrorCode::InvalidArgument, "cost and grid dimensions differ");
    Rng rng(seed);
    MeasurePair out;
    out.mu = density(grid, rng, kind);
    out.nu = density(grid, rng, kind);
    floor_and_normalize(out.mu);
    floor_and_normalize(out.nu);
    out.moment = moment(grid, out.mu, out.nu, spec);
    return out;
}

std::vector<double> smooth(const Grid& grid, std::span<const double> w, double eps) {
    require(eps > 0.0, ErrorCode::InvalidArgument, "smoothing needs eps > 0");
    require(w.size() == grid.size(), ErrorCode::InvalidArgument, "weights do not match the grid");
    std::vector<double> out(w.begin(), w.end());
    for (std::size_t a = 0; a < grid.dim; ++a) {
        if (eps < grid.h[a] / 10.0) continue;
        auto rows = kernel_1d(grid, a, eps);
        std::vector<double> next(out.size(), 0.0);
        for (std::size_t k = 0; k < out.size(); ++k) {
            auto m = grid.multi(k);
            for (const auto& [j, kw] : rows[m[a]]) {
                std::size_t target = a == 0 ? grid.flat(j, m[1]) : grid.flat(m[0], j);
                next[target] += kw * out[k];
            }
        }
        out.swap(next);
    }
    return out;
}

std::uint64_t master_seed() {
    const char* env = std::getenv("KTE_SEED");
    if (env == nullptr || *env == '\0') return kDefaultMasterSeed;
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 0);
    require(end != nullptr && *end == '\0', ErrorCode::InvalidArgument, "KTE_SEED must be an integer");
    return v;
}

std::uint64_t case_seed(std::uint64_t master, std::uint64_t s) { return Rng::derive(master, s); }

std::string to_jsonl(const VerificationReport& r, bool with_wall_time) {
    nlohmann::ordered_json j;
    j["case_id"] = r.case_id;
    j["theorem"] = r.theorem;
    j["cost"] = io::to_json(r.cost);
    j["grid"] = io::to_json(r.grid);
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["margin"] = r.margin;
    j["slack"] = r.slack;
    j["tol"] = r.tol;
    j["pass"] = r.pass;
    nlohmann::ordered_json c = nlohmann::ordered_json::object(), d = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.constants) c[k] = v;
    for (const auto& [k, v] : r.diagnostics) d[k] = v;
    j["constants"] = c;
    j["diagnostics"] = d;
    if (with_wall_time) j["wall_time"] = r.wall_time;
    return j.dump();
}

double energy_slack(Theorem theorem, const CostSpec& spec, const Grid& grid, const TransportPlan& plan) {
    if (theorem == Theorem::T11) return max_h(grid) * std::sqrt(static_cast<double>(grid.dim));
    double s = 0.0;
    std::vector<double> z(grid.dim), w(grid.dim);
    for (const auto& e : plan.entries) {
        auto x = plan.mu.point(e.i);
        auto y = plan.nu.point(e.j);
        for (std::size_t a = 0; a < grid.dim; ++a) z[a] = x[a] - y[a];
        const double base = spec.value(z);
        double worst = 0.0;
        for (std::size_t a = 0; a < grid.dim; ++a)
            for (double sign : {-1.0, 1.0}) {
                w = z;
                w[a] += sign * grid.h[a];
                // A shift past the edge of a tabulated cost is not scored.
                try {
                    worst = std::max(worst, std::fabs(spec.value(w) - base));
                } catch (const Error& err) {
                    if (err.code() != ErrorCode::OutOfDomain) throw;
                }
            }
        s += e.mass * worst;
    }
    return s;
}

VerificationReport verify_energy_bound(std::span<const double> mu, std::span<const double> nu, const CostSpec& spec,
                                       Theorem theorem, const Grid& grid, const VerifyOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    require(mu.size() == grid.size() && nu.size() == grid.size(), ErrorCode::InvalidArgument,
            "weights do not match the grid");
    require(spec.dim() == grid.dim, ErrorCode::InvalidArgument, "cost and grid dimensions differ");
    VerificationReport r;
    r.case_id = opt.case_id;
    r.theorem = to_string(theorem);
    r.cost = spec;
    r.grid = grid;

    if (theorem == Theorem::T11 && spec.kind() != CostKind::Power)
        fail(ErrorCode::PreconditionViolation, "T11 requires a power cost");
    if (theorem == Theorem::T12 && std::any_of(mu.begin(), mu.end(), [](double x) { return !(x > 0.0); }))
        fail(ErrorCode::PreconditionViolation, "T12 requires strictly positive mu weights");
    const double p = spec.kind() == CostKind::Power ? spec.exponent() : 0.0;
    std::optional<YoungProfile> profile;
    if (theorem != Theorem::T11) {
        profile = spec.kind() == CostKind::Power && spec.norm() == PowerNorm::Euclidean ? YoungProfile::power(p)
                                                                                        : YoungProfile::of(spec);
        if (theorem == Theorem::T13 && !(profile->p_minus() > 1.0))
            fail(ErrorCode::PreconditionViolation, "T13 requires p_minus > 1");
    }

    auto mm = DiscreteMeasure::from_grid(grid, mu, true);
    auto nn = DiscreteMeasure::from_grid(grid, nu, true);
    double cost = 0.0;
    bool certified = true;
    TransportPlan plan;
    if (std::equal(mu.begin(), mu.end(), nu.begin())) {
        r.diagnostics.push_back({"identical_measures", 1.0});
    } else {
        plan = solve_ot(mm, nn, spec);
        cost = plan.cost;
        r.diagnostics.push_back({"duality_gap", plan.gap});
        r.diagnostics.push_back({"dual_violation", plan.max_dual_violation});
        r.diagnostics.push_back({"pivots", static_cast<double>(plan.pivots)});
        certified = plan.gap <= 1e-8 * (1.0 + plan.cost) && plan.max_dual_violation <= 1e-9;
        if (grid.dim == 1) {
            auto mono = ot_1d_monotone(mm, nn, spec);
            r.diagnostics.push_back({"monotone_cost", mono.cost});
            r.diagnostics.push_back({"monotone_diff", std::fabs(mono.cost - plan.cost)});
        }
    }
    r.diagnostics.push_back({"transport_cost", cost});

    DualNormProblem prob{grid, {mu.begin(), mu.end()}, {nu.begin(), nu.end()}, {mu.begin(), mu.end()}, spec};
    if (theorem == Theorem::T11) {
        const double q = p / (p - 1.0);
        const double k = std::pow(p, 1.0 / p) * std::pow(q, 1.0 / q);
        r.constants = {{"p", p}, {"K", k}};
        r.lhs = std::pow(cost, 1.0 / p);
        double norm = 0.0;
        const bool closed_form = grid.dim == 1;
        if (closed_form) {
            norm = dual_sobolev_norm_1d_p(mu, nu, mu, grid.h[0], p);
            r.diagnostics.push_back({"norm_closed_form", norm});
        }
        if (!closed_form || opt.ascent_cross_check) {
            auto res = dual_sobolev_norm(prob, opt.ascent);
            double scaled = res.value / k;
            r.diagnostics.push_back({"norm_ascent", scaled});
            r.diagnostics.push_back({"witness_constraint", res.constraint});
            r.diagnostics.push_back({"ascent_restarts", static_cast<double>(res.restarts)});
            certified = certified && res.constraint <= 1.0 + 1e-9;
            if (!closed_form) norm = scaled;
        }
        r.rhs = p * norm;
    } else {
        const double a = theorem == Theorem::T12 ? profile->A_thm12() : profile->A_thm13();
        r.constants = {{"p_minus", profile->p_minus()}, {"p_plus", profile->p_plus()},
                       {"gamma", profile->gamma()},     {"A", a}};
        r.lhs = cost;
        double c = 0.0;
        if (!std::equal(mu.begin(), mu.end(), nu.begin())) {
            auto res = dual_sobolev_norm(prob, opt.ascent);
            c = res.value;
            r.diagnostics.push_back({"witness_constraint", res.constraint});
            r.diagnostics.push_back({"ascent_restarts", static_cast<double>(res.restarts)});
            r.diagnostics.push_back({"best_restart", static_cast<double>(res.best_restart)});
            certified = certified && res.constraint <= 1.0 + 1e-9;
        }
        r.diagnostics.push_back({"norm", c});
        r.rhs = a * profile->phi(c);
    }
    r.margin = r.rhs - r.lhs;
    r.slack = energy_slack(theorem, spec, grid, plan);
    r.tol = 1e-6 * (1.0 + std::fabs(r.rhs)) + r.slack;
    r.diagnostics.push_back({"certified", certified ? 1.0 : 0.0});
    r.pass = certified && r.margin >= -r.tol;
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

LedouxCheck verify_ledoux_interpolation(const GridField& f, std::span<const double> mu, std::span<const double> nu,
                                        const CostSpec& spec, const ThetaSolution& theta, const YoungProfile& profile,
                                        int slices) {
    require(mu.size() == f.size() && nu.size() == f.size(), ErrorCode::InvalidArgument,
            "weights do not match the grid");
    require(slices >= 2, ErrorCode::InvalidArgument, "need at least two time slices");
    auto conj = legendre(spec);
    LedouxCheck out;
    out.c = theta.c();
    out.delta = theta.delta();

    auto q1 = inf_convolve(f, spec, 1.0).value;
    double i_f = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) i_f += nu[k] * q1[k] - mu[k] * f[k];

    // Trapezoid over t_k = k / slices; theta' at t = 1 is its left limit.
    double acc = 0.0;
    for (int k = 0; k <= slices; ++k) {
        double t = static_cast<double>(k) / slices;
        GridField qt = k == 0 ? f : (k == slices ? q1 : inf_convolve(f, spec, t).value);
        double tp = theta.theta_prime(std::min(t, std::nextafter(1.0, 0.0)));
        double it = out.c * tp * gradient_norm(qt, conj, mu) - theta.complement(t) * gradient_energy(qt, conj, mu);
        acc += (k == 0 || k == slices ? 0.5 : 1.0) * it;
    }
    double integral = acc / slices;
    double bound = interpolation_constant(theta, profile);
    out.chain_values = {i_f, integral, bound};
    out.slack = 10.0 * (max_h(f.grid()) + 1.0 / slices);
    out.margin = bound - i_f;
    out.pass = out.margin >= -out.slack;
    return out;
}

}  // namespace kte
