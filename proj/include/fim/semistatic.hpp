#pragma once

#include "fim/common.hpp"
#include "fim/simplex.hpp"

#include <vector>

namespace fim {

// Finite non-recombining tree of strictly positive prices; one node per
// history, so path-dependent claims are just vectors over leaves.
struct TreeMarket {
    struct Node {
        double price = 0.0;
        int parent = -1;
        int depth = 0;
        std::vector<int> children;
    };
    std::vector<Node> nodes;
    int n_steps = 0;
    std::vector<std::vector<int>> paths; // node ids per path, root to leaf

    double s0() const { return nodes.front().price; }
    int n_paths() const { return static_cast<int>(paths.size()); }

    // nodes[0] is the root; children listed per node. Throws unless every
    // leaf sits at depth n_steps and all prices are positive.
    static TreeMarket build(std::vector<Node> nodes);

    // Convenience builder: level k multiplies each level k-1 node's price
    // by every factor in factors[k-1].
    static TreeMarket from_factors(double s0, const std::vector<std::vector<double>>& factors);
};

struct StaticInstrument {
    VectorXd payoff; // per path
    double price = 0.0;
};

struct LPReport {
    LpStatus status = LpStatus::Infeasible;
    double dual_value = 0.0;   // sup over constrained martingale measures
    double primal_value = 0.0; // cheapest semi-static superhedge
    VectorXd statics_coef;     // c_0 .. c_N
    std::vector<double> gamma; // dynamic holding per non-leaf node
    VectorXd q;                // optimal measure per path
};

// Measure side: max E_q[H] over martingale measures matching the static
// prices. Infeasible status signals arbitrage in the statics.
LPReport dual_price(const TreeMarket& tree, const VectorXd& claim,
                    const std::vector<StaticInstrument>& statics);

// Hedge side: min c_0 + sum c_i P_i subject to pathwise domination.
LPReport primal_superhedge(const TreeMarket& tree, const VectorXd& claim,
                           const std::vector<StaticInstrument>& statics);

// True iff every corner of the price box prod_i [P_i - eps, P_i + eps] is
// attained by some martingale measure; convexity fills in the box.
bool feasibility_ball(const TreeMarket& tree, const std::vector<StaticInstrument>& statics,
                      double eps);

// Per-path claim helpers.
VectorXd terminal_call_payoff(const TreeMarket& tree, double strike);
VectorXd terminal_put_payoff(const TreeMarket& tree, double strike);

} // namespace fim
