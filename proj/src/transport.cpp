#include "kte/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kte/error.hpp"
#include "kte/hopf_lax.hpp"

namespace kte {

namespace {

std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& spec) {
    const std::size_t m = mu.size(), k = nu.size(), dim = mu.dim();
    std::vector<double> c(m * k);
    std::vector<double> z(dim);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t d = 0; d < dim; ++d) z[d] = mu.point(i)[d] - nu.point(j)[d];
            double v = spec.value(z);
            require(std::isfinite(v), ErrorCode::InvalidArgument, "transport cost is not finite");
            c[i * k + j] = v;
        }
    return c;
}

// Transportation simplex on the complete bipartite graph. Tree nodes are
// rows 0..m-1 and columns m..m+k-1; a basic cell (i, j) is a tree edge.
class NetworkSimplex {
public:
    NetworkSimplex(std::span<const double> a, std::span<const double> b, const std::vector<double>& c)
        : m_(a.size()), k_(b.size()), a_(a), b_(b), c_(c), flow_(m_ * k_, 0.0), basic_(m_ * k_, 0),
          adj_(m_ + k_), u_(m_), v_(k_) {
        double cmax = 0.0;
        for (double x : c_) cmax = std::max(cmax, std::fabs(x));
        tol_ = 1e-12 * (1.0 + cmax);
    }

    std::size_t solve() {
        northwest_corner();
        potentials();
        const std::size_t cells = m_ * k_;
        const std::size_t block = std::max<std::size_t>(16, static_cast<std::size_t>(std::sqrt(double(cells))));
        std::size_t cursor = 0, pivots = 0, degenerate_run = 0;
        const std::size_t bland_after = m_ + k_;
        for (;;) {
            std::size_t enter = cells;
            if (degenerate_run > bland_after) {
                // Bland: first improving cell in index order.
                for (std::size_t e = 0; e < cells; ++e)
                    if (!basic_[e] && reduced(e) < -tol_) {
                        enter = e;
                        break;
                    }
            } else {
                double best = -tol_;
                std::size_t scanned = 0;
                while (scanned < cells) {
                    std::size_t end = std::min(scanned + block, cells);
                    for (; scanned < end; ++scanned) {
                        std::size_t e = (cursor + scanned) % cells;
                        if (basic_[e]) continue;
                        double r = reduced(e);
                        if (r < best || (r == best && enter != cells && e < enter)) {
                            best = r;
                            enter = e;
                        }
                    }
                    if (enter != cells) break;
                }
                if (enter != cells) cursor = (enter + 1) % cells;
            }
            if (enter == cells) break;
            double theta = pivot(enter);
            degenerate_run = theta <= 0.0 ? degenerate_run + 1 : 0;
            potentials();
            ++pivots;
            require(pivots < 50 * cells + 1000, ErrorCode::InvalidArgument, "network simplex failed to terminate");
        }
        recompute_flows();
        potentials();
        return pivots;
    }

    double flow(std::size_t e) const { return flow_[e]; }
    bool basic(std::size_t e) const { return basic_[e] != 0; }
    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& v() const { return v_; }

private:
    struct Edge {
        std::size_t node;
        std::size_t cell;
    };

    double reduced(std::size_t e) const { return c_[e] - u_[e / k_] - v_[e % k_]; }

    void add_basic(std::size_t e) {
        basic_[e] = 1;
        std::size_t i = e / k_, j = e % k_;
        adj_[i].push_back({m_ + j, e});
        adj_[m_ + j].push_back({i, e});
    }

    void remove_basic(std::size_t e) {
        basic_[e] = 0;
        std::size_t i = e / k_, j = e % k_;
        auto drop = [e](std::vector<Edge>& list) {
            list.erase(std::find_if(list.begin(), list.end(), [e](const Edge& x) { return x.cell == e; }));
        };
        drop(adj_[i]);
        drop(adj_[m_ + j]);
    }

    void northwest_corner() {
        std::vector<double> ra(a_.begin(), a_.end()), rb(b_.begin(), b_.end());
        std::size_t i = 0, j = 0;
        while (i < m_ && j < k_) {
            std::size_t e = i * k_ + j;
            double x = std::max(0.0, std::min(ra[i], rb[j]));
            add_basic(e);
            flow_[e] = x;
            ra[i] -= x;
            rb[j] -= x;
            if (i + 1 == m_)
                ++j;
            else if (j + 1 == k_)
                ++i;
            else if (ra[i] <= rb[j])
                ++i;
            else
                ++j;
        }
    }

    // u_0 = 0 and u_i + v_j = c_ij on the tree.
    void potentials() {
        std::vector<char> seen(m_ + k_, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        u_[0] = 0.0;
        while (!stack.empty()) {
            std::size_t n = stack.back();
            stack.pop_back();
            for (const Edge& ed : adj_[n]) {
                if (seen[ed.node]) continue;
                seen[ed.node] = 1;
                if (ed.node >= m_)
                    v_[ed.node - m_] = c_[ed.cell] - u_[n];
                else
                    u_[ed.node] = c_[ed.cell] - v_[n - m_];
                stack.push_back(ed.node);
            }
        }
    }

    // Tree path from row i to column node m + j as a list of cells.
    std::vector<std::size_t> path(std::size_t i, std::size_t j) const {
        const std::size_t target = m_ + j;
        std::vector<std::size_t> parent(m_ + k_, SIZE_MAX), via(m_ + k_, SIZE_MAX);
        std::vector<std::size_t> queue{i};
        parent[i] = i;
        for (std::size_t q = 0; q < queue.size() && parent[target] == SIZE_MAX; ++q) {
            std::size_t n = queue[q];
            for (const Edge& ed : adj_[n]) {
                if (parent[ed.node] != SIZE_MAX) continue;
                parent[ed.node] = n;
                via[ed.node] = ed.cell;
                queue.push_back(ed.node);
            }
        }
        std::vector<std::size_t> cells;
        for (std::size_t n = target; n != i; n = parent[n]) cells.push_back(via[n]);
        std::reverse(cells.begin(), cells.end());
        return cells;
    }

    double pivot(std::size_t enter) {
        auto cyc = path(enter / k_, enter % k_);
        // Cells at odd positions (1-based) along the row-to-column path lose mass.
        double theta = INFINITY;
        std::size_t leave = SIZE_MAX;
        for (std::size_t p = 0; p < cyc.size(); p += 2) {
            std::size_t e = cyc[p];
            if (flow_[e] < theta || (flow_[e] == theta && e < leave)) {
                theta = flow_[e];
                leave = e;
            }
        }
        theta = std::max(theta, 0.0);
        for (std::size_t p = 0; p < cyc.size(); ++p) flow_[cyc[p]] += (p % 2 == 0) ? -theta : theta;
        flow_[enter] = theta;
        flow_[leave] = 0.0;
        remove_basic(leave);
        add_basic(enter);
        return theta;
    }

    // Exact tree flows by peeling leaves, removing drift from the pivots.
    void recompute_flows() {
        std::vector<double> rem(m_ + k_);
        for (std::size_t i = 0; i < m_; ++i) rem[i] = a_[i];
        for (std::size_t j = 0; j < k_; ++j) rem[m_ + j] = b_[j];
        std::vector<std::size_t> degree(m_ + k_);
        for (std::size_t n = 0; n < m_ + k_; ++n) degree[n] = adj_[n].size();
        std::vector<char> done_cell(m_ * k_, 0);
        std::vector<std::size_t> leaves;
        for (std::size_t n = 0; n < m_ + k_; ++n)
            if (degree[n] == 1) leaves.push_back(n);
        while (!leaves.empty()) {
            std::size_t n = leaves.back();
            leaves.pop_back();
            if (degree[n] != 1) continue;
            for (const Edge& ed : adj_[n]) {
                if (done_cell[ed.cell]) continue;
                done_cell[ed.cell] = 1;
                double x = rem[n];
                if (std::fabs(x) < 1e-15) x = 0.0;
                flow_[ed.cell] = x;
                rem[ed.node] -= x;
                rem[n] = 0.0;
                degree[n] = 0;
                if (--degree[ed.node] == 1) leaves.push_back(ed.node);
                break;
            }
        }
    }

    std::size_t m_, k_;
    std::span<const double> a_, b_;
    const std::vector<double>& c_;
    std::vector<double> flow_;
    std::vector<char> basic_;
    std::vector<std::vector<Edge>> adj_;
    std::vector<double> u_, v_;
    double tol_ = 0.0;
};

void finish(TransportPlan& plan, const std::vector<double>& c) {
    const std::size_t m = plan.mu.size(), k = plan.nu.size();
    plan.cost = 0.0;
    for (const auto& e : plan.entries) plan.cost += e.mass * c[e.i * k + e.j];
    plan.dual = 0.0;
    for (std::size_t i = 0; i < m; ++i) plan.dual += plan.mu.weight(i) * plan.f[i];
    for (std::size_t j = 0; j < k; ++j) plan.dual += plan.nu.weight(j) * plan.g[j];
    plan.gap = std::fabs(plan.cost - plan.dual);
    plan.max_dual_violation = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j)
            plan.max_dual_violation = std::max(plan.max_dual_violation, plan.f[i] + plan.g[j] - c[i * k + j]);
}

bool identical(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return a.same_support(b) && std::equal(a.weights().begin(), a.weights().end(), b.weights().begin());
}

}  // namespace

TransportPlan solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& spec) {
    require(mu.dim() == nu.dim() && mu.dim() == spec.dim(), ErrorCode::InvalidArgument,
            "measures and cost must share one dimension");
    const std::size_t m = mu.size(), k = nu.size();
    if (m > kMaxCostCells / k) fail(ErrorCode::SizeLimit, "transport problem exceeds the cost matrix size limit");
    auto c = cost_matrix(mu, nu, spec);
    TransportPlan plan{mu, nu, {}, std::vector<double>(m, 0.0), std::vector<double>(k, 0.0)};
    if (m == 1 && k == 1) {
        plan.entries.push_back({0, 0, 1.0});
        plan.g[0] = c[0];
    } else if (identical(mu, nu)) {
        for (std::size_t i = 0; i < m; ++i) plan.entries.push_back({i, i, mu.weight(i)});
    } else {
        NetworkSimplex ns(mu.weights(), nu.weights(), c);
        plan.pivots = ns.solve();
        for (std::size_t e = 0; e < m * k; ++e)
            if (ns.basic(e) && ns.flow(e) > 0.0) plan.entries.push_back({e / k, e % k, ns.flow(e)});
        plan.f = ns.u();
        plan.g = ns.v();
    }
    finish(plan, c);
    return plan;
}

MonotoneCoupling ot_1d_monotone(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& spec) {
    require(mu.dim() == 1 && nu.dim() == 1 && spec.dim() == 1, ErrorCode::InvalidArgument,
            "monotone coupling needs one-dimensional measures");
    auto order = [](const DiscreteMeasure& m) {
        std::vector<std::size_t> o(m.size());
        std::iota(o.begin(), o.end(), std::size_t{0});
        std::sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return m.point(a)[0] < m.point(b)[0]; });
        return o;
    };
    auto om = order(mu), on = order(nu);
    MonotoneCoupling out;
    std::size_t a = 0, b = 0;
    double ra = mu.weight(om[0]), rb = nu.weight(on[0]);
    while (a < om.size() && b < on.size()) {
        double mass = std::min(ra, rb);
        if (mass > 0.0) {
            double x = mu.point(om[a])[0], y = nu.point(on[b])[0];
            out.cost += mass * spec.value(x - y);
            out.plan.push_back({om[a], on[b], mass});
        }
        ra -= mass;
        rb -= mass;
        // Advance whichever quantile slice is used up; on a tie advance both.
        bool next_a = ra <= 1e-15 || b + 1 == on.size();
        bool next_b = rb <= 1e-15 || a + 1 == om.size();
        if (!next_a && !next_b) next_a = ra <= rb;
        if (next_a && ++a < om.size()) ra = mu.weight(om[a]);
        if (next_b && ++b < on.size()) rb = nu.weight(on[b]);
    }
    return out;
}

SupportCheck support_optimality_check(const TransportPlan& plan, const CostSpec& spec) {
    SupportCheck out;
    const std::size_t dim = plan.mu.dim();
    std::vector<double> z(dim);
    for (const auto& e : plan.entries) {
        if (e.mass <= 1e-12) continue;
        for (std::size_t d = 0; d < dim; ++d) z[d] = plan.mu.point(e.i)[d] - plan.nu.point(e.j)[d];
        double r = std::fabs(plan.f[e.i] + plan.g[e.j] - spec.value(z));
        out.max_residual = std::max(out.max_residual, r);
        ++out.checked;
    }
    out.pass = out.max_residual <= 1e-8;
    return out;
}

double dual_via_hopf_lax(const GridField& f, std::span<const double> mu, std::span<const double> nu,
                         const CostSpec& spec) {
    require(mu.size() == f.size() && nu.size() == f.size(), ErrorCode::InvalidArgument,
            "grid weights have the wrong length");
    // inf_convolve pairs L with (node - source); the transport cost pairs it
    // with (mu point - nu point), hence the reflection.
    auto q = inf_convolve(f, spec.reflected(), 1.0);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += nu[k] * q.value[k] - mu[k] * f[k];
    return s;
}

}  // namespace kte
