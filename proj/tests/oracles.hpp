#pragma once

// Test-only oracles, independent of the implementation paths they audit.

#include "fim/semistatic.hpp"

#include <optional>
#include <vector>

namespace fim::test {

// Direct maximization of E_q[H] over the martingale polytope by vertex
// enumeration: every basic feasible solution of {A q = b, q >= 0} is
// visited. Only usable for small path counts.
inline std::optional<double> brute_force_dual(const TreeMarket& tree, const VectorXd& claim,
                                              const std::vector<StaticInstrument>& statics) {
    const int np = tree.n_paths();
    std::vector<int> inner;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i)
        if (!tree.nodes[i].children.empty()) inner.push_back(static_cast<int>(i));
    const int m = 1 + static_cast<int>(inner.size()) + static_cast<int>(statics.size());
    MatrixXd A = MatrixXd::Zero(m, np);
    VectorXd b = VectorXd::Zero(m);
    A.row(0).setOnes();
    b[0] = 1.0;
    for (std::size_t r = 0; r < inner.size(); ++r) {
        int node = inner[r];
        int depth = tree.nodes[static_cast<std::size_t>(node)].depth;
        for (int p = 0; p < np; ++p) {
            const auto& path = tree.paths[static_cast<std::size_t>(p)];
            if (path[static_cast<std::size_t>(depth)] != node) continue;
            A(static_cast<Eigen::Index>(r + 1), p) =
                tree.nodes[static_cast<std::size_t>(path[static_cast<std::size_t>(depth + 1)])].price -
                tree.nodes[static_cast<std::size_t>(node)].price;
        }
    }
    for (std::size_t i = 0; i < statics.size(); ++i) {
        A.row(static_cast<Eigen::Index>(1 + inner.size() + i)) = statics[i].payoff.transpose();
        b[static_cast<Eigen::Index>(1 + inner.size() + i)] = statics[i].price;
    }

    Eigen::FullPivLU<MatrixXd> lu(A);
    const int rank = static_cast<int>(lu.rank());

    double best = -kInf;
    bool found = false;
    std::vector<int> subset(static_cast<std::size_t>(rank));
    std::function<void(int, int)> recurse = [&](int start, int picked) {
        if (picked == rank) {
            MatrixXd As(m, rank);
            for (int j = 0; j < rank; ++j) As.col(j) = A.col(subset[static_cast<std::size_t>(j)]);
            VectorXd qs = As.fullPivLu().solve(b);
            if ((As * qs - b).cwiseAbs().maxCoeff() > 1e-7) return;
            if ((qs.array() < -1e-9).any()) return;
            VectorXd q = VectorXd::Zero(np);
            for (int j = 0; j < rank; ++j) q[subset[static_cast<std::size_t>(j)]] = qs[j];
            best = std::max(best, claim.dot(q));
            found = true;
            return;
        }
        for (int c = start; c < np; ++c) {
            subset[static_cast<std::size_t>(picked)] = c;
            recurse(c + 1, picked + 1);
        }
    };
    recurse(0, 0);
    if (!found) return std::nullopt;
    return best;
}

} // namespace fim::test
