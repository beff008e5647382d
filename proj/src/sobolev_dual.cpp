#include "kte/sobolev_dual.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "kte/error.hpp"
#include "kte/rng.hpp"
#include "kte/young.hpp"

namespace kte {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Rows: node k, axis a -> k * dim + a.
SpMat gradient_matrix(const Grid& g) {
    const std::size_t n = g.size(), dim = g.dim;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * n * dim);
    for (std::size_t k = 0; k < n; ++k) {
        auto m = g.multi(k);
        for (std::size_t a = 0; a < dim; ++a) {
            std::size_t stride = (dim == 2 && a == 0) ? g.n[1] : 1;
            std::size_t lo = k, hi = k + stride;
            if (m[a] + 1 == g.n[a]) lo = k - stride, hi = k;
            double inv = 1.0 / g.h[a];
            auto row = static_cast<int>(k * dim + a);
            t.emplace_back(row, static_cast<int>(hi), inv);
            t.emplace_back(row, static_cast<int>(lo), -inv);
        }
    }
    SpMat d(static_cast<int>(n * dim), static_cast<int>(n));
    d.setFromTriplets(t.begin(), t.end());
    return d;
}

// L*(y) and its gradient in one pass.
double conj_value_grad(const ConjugateSpec& conj, std::span<const double> y, std::span<double> grad) {
    const CostSpec& c = conj.cost();
    if (c.is_radial_form()) {
        double r = 0.0;
        for (double v : y) r += v * v;
        r = std::sqrt(r);
        if (r == 0.0) {
            std::fill(grad.begin(), grad.end(), 0.0);
            return 0.0;
        }
        auto s = conj.scalar(r);
        for (std::size_t k = 0; k < y.size(); ++k) grad[k] = s.argmax * y[k] / r;
        return s.value;
    }
    conj.gradient(y, grad);
    return conj.value(y);
}

// Luxemburg norm of g (dim entries per node) in L*(lam): Newton on
// s -> sum lam L*(s g) = 1 from above, which is monotone for a convex
// increasing function, with a bisection guard.
double conj_luxemburg(const ConjugateSpec& conj, const double* g, std::size_t nodes, std::size_t dim,
                      std::span<const double> lam) {
    double scale = 0.0;
    for (std::size_t j = 0; j < nodes * dim; ++j) scale = std::fmax(scale, std::fabs(g[j]));
    if (scale == 0.0) return 0.0;
    std::vector<double> y(dim), gr(dim);
    auto eval = [&](double s, double& deriv) {
        double v = 0.0;
        deriv = 0.0;
        for (std::size_t k = 0; k < nodes; ++k) {
            bool zero = true;
            for (std::size_t a = 0; a < dim; ++a) {
                y[a] = s * g[k * dim + a];
                zero = zero && y[a] == 0.0;
            }
            if (zero) continue;
            v += lam[k] * conj_value_grad(conj, y, gr);
            for (std::size_t a = 0; a < dim; ++a) deriv += lam[k] * gr[a] * g[k * dim + a];
        }
        return v;
    };
    double d = 0.0;
    double lo = 1.0 / scale, hi = 1.0 / scale;
    while (eval(lo, d) > 1.0) lo *= 0.5;
    double vhi = eval(hi, d);
    while (vhi <= 1.0) {
        lo = hi;
        hi *= 2.0;
        vhi = eval(hi, d);
        require(std::isfinite(hi), ErrorCode::InvalidArgument, "dual norm bracket diverged");
    }
    double s = hi, v = vhi;
    bool bisect = false;
    for (int it = 0; it < 200 && v - 1.0 > 1e-15 && s - lo > 1e-15 * s; ++it) {
        double next = (!bisect && d > 0.0) ? s - (v - 1.0) / d : 0.5 * (lo + s);
        if (!(next > lo && next < s)) next = 0.5 * (lo + s);
        double dn = 0.0;
        double vn = eval(next, dn);
        if (vn > 1.0) {
            s = next;
            v = vn;
            d = dn;
            bisect = false;
        } else {
            // Undershoot only happens through rounding or a kinked L*.
            lo = next;
            bisect = true;
        }
    }
    return 1.0 / s;
}

struct Ascent {
    const DualNormProblem& prob;
    const ConjugateSpec conj;
    SpMat D;
    Vec d;  // nu - mu
    std::size_t n, dim;

    struct State {
        Vec f;
        Vec g;
        double ell = 0.0;
        double norm = 0.0;
        double ratio = -std::numeric_limits<double>::infinity();
    };

    Ascent(const DualNormProblem& p)
        : prob(p), conj(legendre(p.spec)), D(gradient_matrix(p.grid)), n(p.grid.size()), dim(p.grid.dim) {
        d.resize(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) d[static_cast<Eigen::Index>(k)] = p.nu[k] - p.mu[k];
    }

    State evaluate(Vec f) const {
        State s;
        s.f = std::move(f);
        s.g = D * s.f;
        s.ell = s.f.dot(d);
        s.norm = conj_luxemburg(conj, s.g.data(), n, dim, prob.lam);
        s.ratio = s.norm > 0.0 ? s.ell / s.norm : -std::numeric_limits<double>::infinity();
        return s;
    }

    // Per-node weight lam_k * kappa_k with grad L*(z) ~ kappa z, z = g / norm;
    // also returns grad_g of the norm.
    void weights(const State& s, std::vector<double>& node_w, Vec& dnorm) const {
        std::vector<double> y(dim), gr(dim);
        node_w.assign(n, 0.0);
        dnorm.setZero(static_cast<Eigen::Index>(n * dim));
        double denom = 0.0, kmax = 0.0;
        std::vector<double> kappa(n, -1.0);
        for (std::size_t k = 0; k < n; ++k) {
            double zz = 0.0, gz = 0.0;
            for (std::size_t a = 0; a < dim; ++a) y[a] = s.g[static_cast<Eigen::Index>(k * dim + a)] / s.norm;
            conj_value_grad(conj, y, gr);
            for (std::size_t a = 0; a < dim; ++a) {
                zz += y[a] * y[a];
                gz += gr[a] * y[a];
                dnorm[static_cast<Eigen::Index>(k * dim + a)] = prob.lam[k] * gr[a];
            }
            denom += prob.lam[k] * gz;
            if (zz > 0.0) {
                kappa[k] = gz / zz;
                kmax = std::fmax(kmax, kappa[k]);
            }
        }
        if (denom > 0.0) dnorm /= denom;
        double kfloor = kmax > 0.0 ? 1e-8 * kmax : 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            double kk = kappa[k];
            if (!(kk > kfloor) || !std::isfinite(kk)) kk = kk > 0.0 && !std::isfinite(kk) ? 1e8 * kmax : kfloor;
            node_w[k] = prob.lam[k] * kk;
        }
    }

    // P = D^T W D restricted to nodes 1..n-1 (node 0 pinned at 0).
    bool factor(const std::vector<double>& node_w, Eigen::SimplicialLDLT<SpMat>& solver) const {
        Vec w(static_cast<Eigen::Index>(n * dim));
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t a = 0; a < dim; ++a) w[static_cast<Eigen::Index>(k * dim + a)] = node_w[k];
        SpMat P = D.transpose() * w.asDiagonal() * D;
        SpMat R = P.bottomRightCorner(P.rows() - 1, P.cols() - 1);
        solver.compute(R);
        return solver.info() == Eigen::Success;
    }

    Vec solve(Eigen::SimplicialLDLT<SpMat>& solver, const Vec& rhs) const {
        Vec out = Vec::Zero(rhs.size());
        out.tail(rhs.size() - 1) = solver.solve(rhs.tail(rhs.size() - 1));
        return out;
    }

    State run(Vec f0, const AscentOptions& opt, int& iterations) const {
        State cur = evaluate(std::move(f0));
        std::vector<double> node_w;
        Vec dnorm;
        Eigen::SimplicialLDLT<SpMat> solver;
        int stall = 0;
        for (int it = 0; it < opt.max_iterations && stall < opt.stall_window; ++it) {
            ++iterations;
            weights(cur, node_w, dnorm);
            if (!factor(node_w, solver)) break;
            double before = cur.ratio;
            bool improved = false;
            State cand = evaluate(solve(solver, d));
            if (cand.ratio > cur.ratio) {
                cur = std::move(cand);
                improved = true;
            } else {
                Vec grad = d / cur.norm - (cur.ell / (cur.norm * cur.norm)) * (D.transpose() * dnorm);
                Vec step = solve(solver, grad);
                double fs = cur.f.norm(), ss = step.norm();
                if (ss > 0.0 && fs > 0.0) {
                    double alpha = 2.0 * fs / ss;
                    for (int bt = 0; bt < 40; ++bt, alpha *= 0.5) {
                        State t = evaluate(cur.f + alpha * step);
                        if (t.ratio > cur.ratio) {
                            cur = std::move(t);
                            improved = true;
                            break;
                        }
                    }
                }
            }
            // Neither the fixed-point candidate nor a preconditioned gradient
            // step improves beyond rounding: stationary to working precision.
            double gain = (cur.ratio - before) / std::fabs(cur.ratio);
            if (!improved || gain < 1e-14) break;
            stall = gain < opt.stall_tol ? stall + 1 : 0;
            // Rescale so the iterate stays well inside floating range.
            if (cur.norm > 0.0 && std::isfinite(cur.norm)) {
                double inv = 1.0 / cur.norm;
                cur.f *= inv;
                cur.g *= inv;
                cur.ell *= inv;
                cur.norm = 1.0;
            }
        }
        return cur;
    }
};

void check_weights(std::span<const double> w, std::size_t n, const char* what, bool strictly_positive) {
    require(w.size() == n, ErrorCode::InvalidArgument, std::string(what) + " has the wrong number of nodes");
    double total = 0.0;
    for (double x : w) {
        require(std::isfinite(x) && (strictly_positive ? x > 0.0 : x >= 0.0), ErrorCode::InvalidArgument,
                std::string(what) + (strictly_positive ? " must be positive on every node" : " must be nonnegative"));
        total += x;
    }
    if (!strictly_positive)
        require(std::fabs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument, std::string(what) + " must sum to 1");
}

}  // namespace

GridField forward_gradient(const GridField& f) {
    require(f.components() == 1, ErrorCode::InvalidArgument, "gradient of a vector field");
    const Grid& g = f.grid();
    SpMat D = gradient_matrix(g);
    Vec v(static_cast<Eigen::Index>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k) v[static_cast<Eigen::Index>(k)] = f[k];
    Vec out = D * v;
    return GridField(g, std::vector<double>(out.data(), out.data() + out.size()), g.dim);
}

double gradient_norm(const GridField& f, const ConjugateSpec& conj, std::span<const double> lam) {
    require(lam.size() == f.size(), ErrorCode::InvalidArgument, "gradient weights have the wrong length");
    require(conj.dim() == f.grid().dim, ErrorCode::InvalidArgument, "cost dimension does not match the grid");
    auto g = forward_gradient(f);
    return conj_luxemburg(conj, g.values().data(), g.size(), g.components(), lam);
}

double gradient_energy(const GridField& f, const ConjugateSpec& conj, std::span<const double> lam) {
    require(lam.size() == f.size(), ErrorCode::InvalidArgument, "gradient weights have the wrong length");
    auto g = forward_gradient(f);
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += lam[k] * conj.value(g.vec(k));
    return s;
}

void DualNormProblem::validate() const {
    grid.validate();
    require(spec.dim() == grid.dim, ErrorCode::InvalidArgument, "cost dimension does not match the grid");
    check_weights(mu, grid.size(), "mu", false);
    check_weights(nu, grid.size(), "nu", false);
    check_weights(lam, grid.size(), "lam", true);
}

DualNormResult dual_sobolev_norm(const DualNormProblem& prob, const AscentOptions& opt) {
    prob.validate();
    require(opt.restarts >= 1, ErrorCode::InvalidArgument, "ascent needs at least one restart");
    Ascent asc(prob);
    DualNormResult res;
    const std::size_t n = prob.grid.size();
    if (asc.d.cwiseAbs().maxCoeff() == 0.0) {
        res.degenerate = true;
        res.witness = GridField(prob.grid, std::vector<double>(n, 0.0));
        return res;
    }
    Ascent::State best;
    for (int r = 0; r < opt.restarts; ++r) {
        Rng rng(Rng::derive(opt.seed, static_cast<std::uint64_t>(r)));
        Vec f0(static_cast<Eigen::Index>(n));
        for (Eigen::Index k = 0; k < f0.size(); ++k) f0[k] = rng.normal();
        auto s = asc.run(std::move(f0), opt, res.iterations);
        ++res.restarts;
        if (s.ratio > best.ratio) {
            best = std::move(s);
            res.best_restart = r;
        }
    }
    // Rescale onto the constraint boundary and center.
    double norm = conj_luxemburg(asc.conj, best.g.data(), n, prob.grid.dim, prob.lam);
    Vec w = best.f / norm;
    w.array() -= w.mean();
    std::vector<double> wv(w.data(), w.data() + w.size());
    res.witness = GridField(prob.grid, std::move(wv));
    res.value = 0.0;
    for (std::size_t k = 0; k < n; ++k) res.value += res.witness[k] * (prob.nu[k] - prob.mu[k]);
    res.constraint = gradient_energy(res.witness, asc.conj, prob.lam);
    return res;
}

double dual_sobolev_norm_1d_p(std::span<const double> mu, std::span<const double> nu, std::span<const double> lam,
                              double h, double p) {
    const std::size_t n = lam.size();
    require(n >= 2 && mu.size() == n && nu.size() == n, ErrorCode::InvalidArgument,
            "1D dual norm needs aligned weights on at least two nodes");
    require(h > 0.0 && p > 1.0, ErrorCode::InvalidArgument, "1D dual norm needs h > 0 and p > 1");
    double F = 0.0, sum = 0.0;
    for (std::size_t e = 0; e + 1 < n; ++e) {
        F += mu[e] - nu[e];
        double le = lam[e] + (e + 2 == n ? lam[n - 1] : 0.0);
        require(le > 0.0, ErrorCode::InvalidArgument, "lam must be positive on every node");
        double w = le / h;
        sum += std::pow(std::fabs(F), p) * std::pow(w, 1.0 - p) * h;
    }
    return std::pow(sum, 1.0 / p);
}

LscCheck lsc_check(const Grid& grid, std::span<const MeasureTriple> sequence, const MeasureTriple& limit,
                   const CostSpec& spec, const AscentOptions& opt) {
    require(!sequence.empty(), ErrorCode::InvalidArgument, "lsc check needs a nonempty sequence");
    auto norm = [&](const MeasureTriple& m) {
        DualNormProblem p{grid, m.mu, m.nu, m.lam, spec};
        return dual_sobolev_norm(p, opt).value;
    };
    LscCheck c;
    for (const auto& m : sequence) c.values.push_back(norm(m));
    c.limit = norm(limit);
    std::size_t tail = std::min<std::size_t>(3, c.values.size());
    c.liminf_proxy = *std::min_element(c.values.end() - static_cast<std::ptrdiff_t>(tail), c.values.end());
    c.pass = c.limit <= c.liminf_proxy + 1e-6;
    return c;
}

ContinuityCheck convolution_continuity_check(const DualNormProblem& prob, const Mollifier& kappa,
                                             std::span<const double> eps_list, const AscentOptions& opt) {
    prob.validate();
    require(!eps_list.empty(), ErrorCode::InvalidArgument, "continuity check needs at least one eps");
    for (std::size_t i = 0; i < eps_list.size(); ++i)
        require(eps_list[i] > 0.0 && (i == 0 || eps_list[i] < eps_list[i - 1]), ErrorCode::InvalidArgument,
                "eps list must be positive and decreasing");
    ContinuityCheck c;
    c.eps.assign(eps_list.begin(), eps_list.end());
    c.limit = dual_sobolev_norm(prob, opt).value;
    c.power = prob.spec.kind() == CostKind::Power;
    c.gamma = c.power ? 1.0 : YoungProfile::of(prob.spec).gamma();
    for (double eps : eps_list) {
        DualNormProblem p = prob;
        p.mu = kappa(prob.mu, eps);
        p.nu = kappa(prob.nu, eps);
        p.lam = kappa(prob.lam, eps);
        c.values.push_back(dual_sobolev_norm(p, opt).value);
    }
    std::size_t tail = std::min<std::size_t>(3, c.values.size());
    auto first = c.values.end() - static_cast<std::ptrdiff_t>(tail);
    c.lower_proxy = *std::min_element(first, c.values.end());
    c.upper_proxy = *std::max_element(first, c.values.end());
    if (c.power) {
        c.band_lo = c.limit * 0.95;
        c.band_hi = c.limit * 1.05;
        c.pass = c.values.back() >= c.band_lo && c.values.back() <= c.band_hi;
    } else {
        c.band_lo = c.limit - 1e-6;
        c.band_hi = c.limit / c.gamma + 1e-6;
        c.pass = c.lower_proxy >= c.band_lo && c.upper_proxy <= c.band_hi;
    }
    return c;
}

}  // namespace kte
