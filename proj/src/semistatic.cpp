#include "fim/semistatic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fim {

TreeMarket TreeMarket::build(std::vector<Node> in) {
    if (in.empty()) throw std::invalid_argument("tree: no nodes");
    TreeMarket t;
    t.nodes = std::move(in);
    int max_depth = 0;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        Node& nd = t.nodes[i];
        if (!(nd.price > 0.0)) throw std::invalid_argument("tree: prices must be strictly positive");
        if (i == 0) {
            nd.depth = 0;
        } else {
            if (nd.parent < 0 || nd.parent >= static_cast<int>(i))
                throw std::invalid_argument("tree: parents must precede children");
            nd.depth = t.nodes[static_cast<std::size_t>(nd.parent)].depth + 1;
        }
        max_depth = std::max(max_depth, nd.depth);
    }
    t.n_steps = max_depth;
    for (const Node& nd : t.nodes)
        if (nd.children.empty() && nd.depth != max_depth)
            throw std::invalid_argument("tree: every leaf must sit at the final step");

    // Enumerate root-to-leaf paths in child order.
    std::vector<int> walk{0};
    std::function<void(int)> dfs = [&](int id) {
        const Node& nd = t.nodes[static_cast<std::size_t>(id)];
        if (nd.children.empty()) {
            t.paths.push_back(walk);
            return;
        }
        for (int ch : nd.children) {
            walk.push_back(ch);
            dfs(ch);
            walk.pop_back();
        }
    };
    dfs(0);
    return t;
}

TreeMarket TreeMarket::from_factors(double s0, const std::vector<std::vector<double>>& factors) {
    std::vector<Node> nodes;
    nodes.push_back(Node{s0, -1, 0, {}});
    std::vector<int> level{0};
    for (const auto& fs : factors) {
        std::vector<int> next;
        for (int id : level) {
            for (double f : fs) {
                Node nd;
                nd.price = nodes[static_cast<std::size_t>(id)].price * f;
                nd.parent = id;
                int nid = static_cast<int>(nodes.size());
                nodes.push_back(nd);
                nodes[static_cast<std::size_t>(id)].children.push_back(nid);
                next.push_back(nid);
            }
        }
        level = std::move(next);
    }
    return build(std::move(nodes));
}

namespace {

// Rows of the measure LP: normalization, one martingale constraint per
// non-leaf node, one price constraint per static.
struct MeasureLp {
    MatrixXd A;
    VectorXd b;
    std::vector<int> inner_nodes; // row order of the martingale block
};

MeasureLp measure_constraints(const TreeMarket& tree, const std::vector<StaticInstrument>& statics) {
    const int np = tree.n_paths();
    MeasureLp lp;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i)
        if (!tree.nodes[i].children.empty()) lp.inner_nodes.push_back(static_cast<int>(i));
    const int m = 1 + static_cast<int>(lp.inner_nodes.size()) + static_cast<int>(statics.size());
    lp.A = MatrixXd::Zero(m, np);
    lp.b = VectorXd::Zero(m);
    lp.A.row(0).setOnes();
    lp.b[0] = 1.0;
    for (std::size_t r = 0; r < lp.inner_nodes.size(); ++r) {
        int node = lp.inner_nodes[r];
        int depth = tree.nodes[static_cast<std::size_t>(node)].depth;
        for (int p = 0; p < np; ++p) {
            const auto& path = tree.paths[static_cast<std::size_t>(p)];
            if (path[static_cast<std::size_t>(depth)] != node) continue;
            double child = tree.nodes[static_cast<std::size_t>(path[static_cast<std::size_t>(depth + 1)])].price;
            lp.A(static_cast<Eigen::Index>(r + 1), p) =
                child - tree.nodes[static_cast<std::size_t>(node)].price;
        }
    }
    for (std::size_t i = 0; i < statics.size(); ++i) {
        if (statics[i].payoff.size() != np)
            throw std::invalid_argument("semistatic: static payoff size mismatch");
        lp.A.row(static_cast<Eigen::Index>(1 + lp.inner_nodes.size() + i)) =
            statics[i].payoff.transpose();
        lp.b[static_cast<Eigen::Index>(1 + lp.inner_nodes.size() + i)] = statics[i].price;
    }
    return lp;
}

} // namespace

LPReport dual_price(const TreeMarket& tree, const VectorXd& claim,
                    const std::vector<StaticInstrument>& statics) {
    const int np = tree.n_paths();
    if (claim.size() != np) throw std::invalid_argument("semistatic: claim size mismatch");
    MeasureLp lp = measure_constraints(tree, statics);
    LpSolution sol = solve_lp_max(lp.A, lp.b, claim);

    LPReport rep;
    rep.status = sol.status;
    if (sol.status != LpStatus::Optimal) return rep;
    rep.dual_value = sol.value;
    rep.q = sol.x;
    // The multipliers are exactly the cheapest hedge: c_0 from the
    // normalization row, gamma from the martingale rows, c_i from prices.
    rep.statics_coef = VectorXd(statics.size() + 1);
    rep.statics_coef[0] = sol.dual[0];
    rep.gamma.assign(lp.inner_nodes.size(), 0.0);
    for (std::size_t r = 0; r < lp.inner_nodes.size(); ++r)
        rep.gamma[r] = sol.dual[static_cast<Eigen::Index>(r + 1)];
    double cost = sol.dual[0];
    for (std::size_t i = 0; i < statics.size(); ++i) {
        double ci = sol.dual[static_cast<Eigen::Index>(1 + lp.inner_nodes.size() + i)];
        rep.statics_coef[static_cast<Eigen::Index>(i + 1)] = ci;
        cost += ci * statics[i].price;
    }
    rep.primal_value = cost;
    return rep;
}

LPReport primal_superhedge(const TreeMarket& tree, const VectorXd& claim,
                           const std::vector<StaticInstrument>& statics) {
    const int np = tree.n_paths();
    if (claim.size() != np) throw std::invalid_argument("semistatic: claim size mismatch");
    MeasureLp meas = measure_constraints(tree, statics);
    const int n_inner = static_cast<int>(meas.inner_nodes.size());
    const int n_stat = static_cast<int>(statics.size());
    const int n_free = 1 + n_stat + n_inner;

    // Variables: free coefficients split into +/- parts, then per-path
    // surplus. Rows: one domination equality per path.
    const int n_cols = 2 * n_free + np;
    MatrixXd A = MatrixXd::Zero(np, n_cols);
    VectorXd b = claim;
    VectorXd c = VectorXd::Zero(n_cols);
    // Column layout of the free part mirrors the measure LP's row order,
    // so A_free = meas.A transposed.
    for (int p = 0; p < np; ++p) {
        for (int r = 0; r < n_free; ++r) {
            double a = meas.A(r, p);
            A(p, 2 * r) = a;
            A(p, 2 * r + 1) = -a;
        }
        A(p, 2 * n_free + p) = -1.0; // surplus
    }
    c[0] = 1.0;
    c[1] = -1.0;
    for (int i = 0; i < n_stat; ++i) {
        double pi = statics[static_cast<std::size_t>(i)].price;
        c[2 * (1 + n_inner + i)] = pi;
        c[2 * (1 + n_inner + i) + 1] = -pi;
    }

    LpSolution sol = solve_lp_min(A, b, c);
    LPReport rep;
    rep.status = sol.status;
    if (sol.status == LpStatus::Unbounded) return rep; // statics admit arbitrage
    if (sol.status != LpStatus::Optimal) return rep;

    rep.primal_value = sol.value;
    auto free_val = [&](int r) { return sol.x[2 * r] - sol.x[2 * r + 1]; };
    rep.statics_coef = VectorXd(n_stat + 1);
    rep.statics_coef[0] = free_val(0);
    rep.gamma.assign(static_cast<std::size_t>(n_inner), 0.0);
    for (int r = 0; r < n_inner; ++r) rep.gamma[static_cast<std::size_t>(r)] = free_val(1 + r);
    for (int i = 0; i < n_stat; ++i)
        rep.statics_coef[i + 1] = free_val(1 + n_inner + i);
    // Multipliers of the domination rows recover the optimal measure.
    rep.q = sol.dual;
    rep.dual_value = claim.dot(rep.q);
    return rep;
}

bool feasibility_ball(const TreeMarket& tree, const std::vector<StaticInstrument>& statics,
                      double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("feasibility_ball: eps must be positive");
    if (statics.empty()) return true;
    MeasureLp lp = measure_constraints(tree, statics);
    const int n_stat = static_cast<int>(statics.size());
    const Eigen::Index first_stat = 1 + static_cast<Eigen::Index>(lp.inner_nodes.size());
    VectorXd zero = VectorXd::Zero(tree.n_paths());
    for (long corner = 0; corner < (1L << n_stat); ++corner) {
        VectorXd b = lp.b;
        for (int i = 0; i < n_stat; ++i) {
            double sign = (corner >> i) & 1 ? 1.0 : -1.0;
            b[first_stat + i] = statics[static_cast<std::size_t>(i)].price + sign * eps;
        }
        LpSolution sol = solve_lp_max(lp.A, b, zero);
        if (sol.status != LpStatus::Optimal) return false;
    }
    return true;
}

VectorXd terminal_call_payoff(const TreeMarket& tree, double strike) {
    VectorXd h(tree.n_paths());
    for (int p = 0; p < tree.n_paths(); ++p) {
        double sT = tree.nodes[static_cast<std::size_t>(tree.paths[static_cast<std::size_t>(p)].back())].price;
        h[p] = std::max(sT - strike, 0.0);
    }
    return h;
}

VectorXd terminal_put_payoff(const TreeMarket& tree, double strike) {
    VectorXd h(tree.n_paths());
    for (int p = 0; p < tree.n_paths(); ++p) {
        double sT = tree.nodes[static_cast<std::size_t>(tree.paths[static_cast<std::size_t>(p)].back())].price;
        h[p] = std::max(strike - sT, 0.0);
    }
    return h;
}

} // namespace fim
