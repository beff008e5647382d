#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kte/bvp.hpp"
#include "kte/cost.hpp"
#include "kte/error.hpp"
#include "kte/harness.hpp"
#include "kte/hopf_lax.hpp"
#include "kte/io.hpp"
#include "kte/orlicz.hpp"
#include "kte/sobolev_dual.hpp"
#include "kte/transport.hpp"
#include "kte/young.hpp"

using namespace kte;
using kte::io::json;

namespace {

CostSpec load_cost(const std::string& path) { return io::cost_from_json(io::read_json_file(path), io::parent_dir(path)); }

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write " + path);
    out << std::setprecision(17);
    return out;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

// Non-finite numbers become strings so the output stays valid structured text.
json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

YoungProfile profile_for(const CostSpec& spec) {
    if (spec.kind() == CostKind::Power && spec.norm() == PowerNorm::Euclidean) return YoungProfile::power(spec.exponent());
    return YoungProfile::of(spec);
}

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            require(used == part.size(), ErrorCode::Parse, "bad coordinate \"" + part + "\"");
        } catch (const std::logic_error&) {
            fail(ErrorCode::Parse, "bad coordinate \"" + part + "\"");
        }
    }
    return out;
}

int run_cost(const std::string& cost_path, const std::vector<std::string>& xs, const std::vector<double>& rs) {
    auto spec = load_cost(cost_path);
    json out;
    out["cost"] = io::to_json(spec);
    json values = json::array();
    std::optional<ConjugateSpec> conj;
    try {
        conj = legendre(spec);
    } catch (const Error& e) {
        out["conjugate_error"] = e.what();
    }
    for (const auto& text : xs) {
        auto x = parse_point(text);
        require(x.size() == spec.dim(), ErrorCode::InvalidArgument, "point dimension differs from the cost");
        json row{{"x", x}, {"L", number(spec.value(x))}};
        if (conj) row["L_star"] = number(conj->value(x));
        values.push_back(row);
    }
    out["values"] = values;
    try {
        auto profile = profile_for(spec);
        json phi = json::array();
        for (double r : rs) phi.push_back({{"r", r}, {"Phi", number(profile.phi(r))}, {"Psi", number(profile.psi(r))}});
        out["profile"] = {{"p_minus", profile.p_minus()}, {"p_plus", profile.p_plus()},
                          {"gamma", profile.gamma()},     {"A_thm12", profile.A_thm12()},
                          {"A_thm13", profile.A_thm13()}, {"exact", profile.exact()},
                          {"Phi", phi}};
    } catch (const Error& e) {
        out["profile_error"] = e.what();
    }
    auto d2 = check_delta2(spec);
    out["delta2"] = {{"sup_ratio", number(d2.sup_ratio)}, {"at_radius", d2.at_radius}, {"passes", d2.passes}};
    print(out);
    return 0;
}

int run_hopflax(const std::string& field_path, const std::string& cost_path, double t, const std::string& out_path,
                double semigroup_s) {
    auto f = read_csv_file(field_path);
    auto spec = load_cost(cost_path);
    auto q = inf_convolve(f, spec, t);
    std::size_t clipped = 0;
    for (auto c : q.clipped) clipped += c;
    json out{{"t", t},
             {"window_radius", q.window_radius},
             {"window_exceeds_grid", q.window_exceeds_grid},
             {"clipped_nodes", clipped}};
    if (semigroup_s > 0.0) out["semigroup_residual"] = semigroup_residual(f, spec, t, semigroup_s);
    if (!out_path.empty()) write_csv_file(out_path, q.value);
    else {
        json v = json::array();
        for (double x : q.value.values()) v.push_back(x);
        out["value"] = v;
    }
    if (q.window_exceeds_grid) std::cerr << "warning: WindowExceedsGrid at " << clipped << " nodes\n";
    print(out);
    return 0;
}

// {"measure": {"dim":n,"points":[...],"weights":[...]}, "u": [[...], ...] or [...]}
int run_norm(const std::string& sample_path, const std::string& cost_path) {
    auto j = io::read_json_file(sample_path);
    require(j.contains("measure") && j.contains("u"), ErrorCode::Parse, "sample needs \"measure\" and \"u\"");
    auto lam = io::measure_from_json(j.at("measure"));
    auto spec = load_cost(cost_path);
    std::vector<double> flat;
    for (const auto& row : j.at("u")) {
        if (row.is_array())
            for (const auto& x : row) flat.push_back(x.get<double>());
        else flat.push_back(row.get<double>());
    }
    VectorSample u(lam.dim(), flat);
    double lux = luxemburg_norm(u, spec, lam);
    json out{{"luxemburg", lux}};
    try {
        double orl = orlicz_norm(u, spec, lam);
        out["orlicz"] = orl;
        out["ratio"] = lux > 0.0 ? number(orl / lux) : json(nullptr);
    } catch (const Error& e) {
        out["orlicz_error"] = e.what();
    }
    print(out);
    return 0;
}

int run_dualnorm(const std::string& problem_path, int restarts, const std::string& witness_path) {
    auto prob = io::problem_from_json(io::read_json_file(problem_path), io::parent_dir(problem_path));
    AscentOptions opt;
    opt.restarts = restarts;
    auto res = dual_sobolev_norm(prob, opt);
    json out{{"value", res.value},       {"constraint", res.constraint}, {"degenerate", res.degenerate},
             {"restarts", res.restarts}, {"best_restart", res.best_restart}, {"iterations", res.iterations}};
    if (prob.grid.dim == 1 && prob.spec.kind() == CostKind::Power && prob.spec.norm() == PowerNorm::Euclidean) {
        const double p = prob.spec.exponent(), q = p / (p - 1.0);
        const double k = std::pow(p, 1.0 / p) * std::pow(q, 1.0 / q);
        double oracle = dual_sobolev_norm_1d_p(prob.mu, prob.nu, prob.lam, prob.grid.h[0], p);
        out["oracle_1d_p"] = oracle;
        out["orlicz_scale"] = k;
        out["relative_gap"] = oracle > 0.0 ? std::fabs(res.value / k - oracle) / oracle : 0.0;
    }
    if (!witness_path.empty()) write_csv_file(witness_path, res.witness);
    print(out);
    return 0;
}

int run_ot(const std::string& mu_path, const std::string& nu_path, const std::string& cost_path, const std::string& oracle,
           const std::string& plan_path) {
    auto mu = io::measure_from_json(io::read_json_file(mu_path));
    auto nu = io::measure_from_json(io::read_json_file(nu_path));
    auto spec = load_cost(cost_path);
    auto plan = solve_ot(mu, nu, spec);
    auto support = support_optimality_check(plan, spec);
    json out{{"cost", plan.cost},
             {"dual", plan.dual},
             {"gap", plan.gap},
             {"max_dual_violation", plan.max_dual_violation},
             {"pivots", plan.pivots},
             {"support_check", {{"pass", support.pass}, {"max_residual", support.max_residual}, {"checked", support.checked}}}};
    if (!oracle.empty()) {
        require(oracle == "1d", ErrorCode::InvalidArgument, "unknown oracle \"" + oracle + "\"");
        auto mono = ot_1d_monotone(mu, nu, spec);
        out["oracle_1d"] = {{"cost", mono.cost}, {"abs_diff", std::fabs(mono.cost - plan.cost)}};
    }
    if (!plan_path.empty()) {
        auto os = open_out(plan_path);
        io::write_plan_csv(os, plan.entries);
    }
    print(out);
    return 0;
}

int run_bvp(const std::string& cost_path, double c, const std::string& theta_path, std::size_t samples) {
    auto spec = load_cost(cost_path);
    auto profile = profile_for(spec);
    auto sol = solve_theta(c, profile);
    json out{{"c", c},
             {"delta", sol.delta()},
             {"A_thm12_Phi_c", profile.A_thm12() * profile.phi(c)},
             {"r_at_one", sol.r_at_one()},
             {"residual_sup", sol.residual_sup()},
             {"probes", sol.probes()},
             {"interpolation_constant", interpolation_constant(sol, profile)}};
    if (!theta_path.empty()) {
        auto os = open_out(theta_path);
        os << "t,theta,theta_prime\n";
        for (std::size_t k = 0; k < samples; ++k) {
            double t = static_cast<double>(k) / static_cast<double>(samples - 1) * ThetaSolution::probe_end;
            os << t << ',' << sol.theta(t) << ',' << sol.theta_prime(t) << '\n';
        }
    }
    print(out);
    return 0;
}

struct VerifyArgs {
    std::string theorem;
    std::string cost;
    std::string seeds = "0..99";
    std::string grid = "N=256,range=[-2,2]";
    std::string out;
    std::string kind = "bumps";
    int restarts = 20;
    bool no_cross_check = false;
};

int run_verify(const VerifyArgs& a) {
    const Theorem theorem = theorem_from_string(a.theorem);
    const MeasureKind kind = measure_kind_from_string(a.kind);
    auto spec = load_cost(a.cost);
    auto grid = io::parse_grid_arg(a.grid);
    auto seeds = io::parse_seed_list(a.seeds);
    const std::uint64_t master = master_seed();
    std::ofstream file;
    if (!a.out.empty()) file = open_out(a.out);
    std::ostream& os = a.out.empty() ? std::cout : file;
    std::size_t failed = 0;
    double worst = std::numeric_limits<double>::infinity();
    // Cases run in seed order, so the report stream is ordered by case id.
    for (auto s : seeds) {
        auto m = gen_measures(case_seed(master, s), kind, grid, spec);
        VerifyOptions opt;
        opt.ascent.restarts = a.restarts;
        opt.ascent_cross_check = !a.no_cross_check;
        opt.case_id = std::string(to_string(theorem)) + "/" + a.kind + "/" + std::to_string(s);
        auto r = verify_energy_bound(m.mu, m.nu, spec, theorem, grid, opt);
        r.diagnostics.push_back({"moment", m.moment});
        os << to_jsonl(r) << '\n';
        failed += r.pass ? 0 : 1;
        worst = std::min(worst, r.margin + r.tol);
    }
    std::cerr << seeds.size() << " cases, " << failed << " failed, min(margin + tol) = " << worst << '\n';
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kte: transport-energy inequalities on grids"};
    app.require_subcommand(1);

    std::string cost_path;
    std::vector<std::string> xs;
    std::vector<double> rs;
    auto* cost = app.add_subcommand("cost", "Evaluate L, L*, the Young profile and the Delta_2 scan");
    cost->add_option("--cost", cost_path, "cost JSON")->required();
    cost->add_option("--x", xs, "evaluation point, comma separated per coordinate");
    cost->add_option("--r", rs, "profile argument r");

    std::string field_path, out_path;
    double t = 1.0, semigroup_s = 0.0;
    auto* hopflax = app.add_subcommand("hopflax", "Infimum convolution Q_t f of a grid field");
    hopflax->add_option("--field", field_path, "grid field CSV")->required();
    hopflax->add_option("--cost", cost_path, "cost JSON")->required();
    hopflax->add_option("--t", t, "time")->check(CLI::PositiveNumber);
    hopflax->add_option("--out", out_path, "write Q_t f as CSV");
    hopflax->add_option("--semigroup", semigroup_s, "also report the residual of Q_{t+s} against Q_t Q_s");

    std::string sample_path;
    auto* norm = app.add_subcommand("norm", "Luxemburg and Orlicz norms of a sample");
    norm->add_option("--sample", sample_path, "JSON with measure and u")->required();
    norm->add_option("--cost", cost_path, "cost JSON")->required();

    std::string problem_path, witness_path;
    int restarts = 20;
    auto* dualnorm = app.add_subcommand("dualnorm", "Dual Sobolev norm by ascent");
    dualnorm->add_option("--problem", problem_path, "problem JSON")->required();
    dualnorm->add_option("--restarts", restarts, "ascent restarts")->check(CLI::PositiveNumber);
    dualnorm->add_option("--emit-witness", witness_path, "write the witness field as CSV");

    std::string mu_path, nu_path, oracle, plan_path;
    auto* ot = app.add_subcommand("ot", "Exact discrete optimal transport");
    ot->add_option("--mu", mu_path, "source measure JSON")->required();
    ot->add_option("--nu", nu_path, "target measure JSON")->required();
    ot->add_option("--cost", cost_path, "cost JSON")->required();
    ot->add_option("--oracle", oracle, "cross-check oracle")->check(CLI::IsMember({"1d"}));
    ot->add_option("--emit-plan", plan_path, "write the plan as CSV");

    double c = 1.0;
    std::string theta_path;
    std::size_t samples = 1001;
    auto* bvp = app.add_subcommand("bvp", "Solve for delta and theta");
    bvp->add_option("--cost", cost_path, "cost JSON")->required();
    bvp->add_option("--c", c, "norm value c")->check(CLI::PositiveNumber);
    bvp->add_option("--emit-theta", theta_path, "write t, theta, theta' as CSV");
    bvp->add_option("--samples", samples, "rows in the theta CSV")->check(CLI::Range(2, 10'000'000));

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Energy-bound verification over seeded cases");
    verify->add_option("--theorem", va.theorem, "11, 12 or 13")->required()->check(CLI::IsMember({"11", "12", "13"}));
    verify->add_option("--cost", va.cost, "cost JSON")->required();
    verify->add_option("--seeds", va.seeds, "seed list: 0..99, 7 or 1,4,9");
    verify->add_option("--grid", va.grid, "N=256,range=[-2,2][,dim=2]");
    verify->add_option("--out", va.out, "report file, one object per line");
    verify->add_option("--kind", va.kind, "measure family")->check(CLI::IsMember({"bumps", "mixture", "pwconst"}));
    verify->add_option("--restarts", va.restarts, "ascent restarts")->check(CLI::PositiveNumber);
    verify->add_flag("--no-cross-check", va.no_cross_check, "skip the ascent next to the 1D closed form");

    CLI11_PARSE(app, argc, argv);
    std::cout << std::setprecision(17);
    try {
        if (*cost) return run_cost(cost_path, xs, rs);
        if (*hopflax) return run_hopflax(field_path, cost_path, t, out_path, semigroup_s);
        if (*norm) return run_norm(sample_path, cost_path);
        if (*dualnorm) return run_dualnorm(problem_path, restarts, witness_path);
        if (*ot) return run_ot(mu_path, nu_path, cost_path, oracle, plan_path);
        if (*bvp) return run_bvp(cost_path, c, theta_path, samples);
        if (*verify) return run_verify(va);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
