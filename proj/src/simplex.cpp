#include "fim/simplex.hpp"

#include <cmath>
#include <vector>

namespace fim {

namespace {

struct Tableau {
    MatrixXd T;              // m x (n + m + 1): columns, artificials, rhs
    VectorXd obj;            // reduced-cost row, same width
    std::vector<int> basis;  // basic column per row
    int m, n;

    int width() const { return n + m + 1; }
    int rhs() const { return n + m; }

    // Rebuild the reduced-cost row z - c for a cost vector spanning both
    // structural and artificial columns, eliminating the basic ones.
    void load_objective(const VectorXd& c) {
        obj = VectorXd::Zero(width());
        obj.head(c.size()) = -c;
        for (int i = 0; i < m; ++i) {
            double cb = c[basis[static_cast<std::size_t>(i)]];
            if (cb != 0.0) obj += cb * T.row(i).transpose();
        }
    }

    // Bland's rule: smallest eligible column enters, smallest basic index
    // breaks ratio ties. Returns false when optimal, throws on unbounded.
    bool pivot_once(bool allow_artificial, double tol) {
        int enter = -1;
        int limit = allow_artificial ? n + m : n;
        for (int j = 0; j < limit; ++j) {
            if (obj[j] < -tol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) return false;
        int leave = -1;
        double best = 0.0;
        for (int i = 0; i < m; ++i) {
            double a = T(i, enter);
            if (a > tol) {
                double ratio = T(i, rhs()) / a;
                if (leave < 0 || ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 &&
                     basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    leave = i;
                    best = ratio;
                }
            }
        }
        if (leave < 0) throw LpStatus::Unbounded;
        double piv = T(leave, enter);
        T.row(leave) /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            double f = T(i, enter);
            if (f != 0.0) T.row(i) -= f * T.row(leave);
        }
        double fo = obj[enter];
        if (fo != 0.0) obj -= fo * T.row(leave).transpose();
        basis[static_cast<std::size_t>(leave)] = enter;
        return true;
    }
};

} // namespace

LpSolution solve_lp_max(const MatrixXd& A, const VectorXd& b, const VectorXd& c, double tol) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    Tableau tb;
    tb.m = m;
    tb.n = n;
    tb.T = MatrixXd::Zero(m, n + m + 1);
    tb.basis.resize(static_cast<std::size_t>(m));
    VectorXd flip = VectorXd::Ones(m);
    for (int i = 0; i < m; ++i) {
        double s = b[i] < 0.0 ? -1.0 : 1.0;
        flip[i] = s;
        tb.T.block(i, 0, 1, n) = s * A.row(i);
        tb.T(i, n + i) = 1.0;
        tb.T(i, n + m) = s * b[i];
        tb.basis[static_cast<std::size_t>(i)] = n + i;
    }

    LpSolution sol;
    try {
        // Phase 1: maximize -sum(artificials); feasible iff the optimum is 0.
        VectorXd c1 = VectorXd::Zero(n + m);
        c1.tail(m).setConstant(-1.0);
        tb.load_objective(c1);
        while (tb.pivot_once(true, tol)) {}
        double phase1_value = tb.obj[tb.rhs()]; // equals -sum(artificials)
        if (phase1_value < -1e-7 * (1.0 + b.cwiseAbs().maxCoeff())) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Drive any lingering artificial out of the basis when possible.
        for (int i = 0; i < m; ++i) {
            if (tb.basis[static_cast<std::size_t>(i)] < n) continue;
            int enter = -1;
            for (int j = 0; j < n; ++j) {
                if (std::abs(tb.T(i, j)) > 1e-8) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) continue; // redundant row
            double piv = tb.T(i, enter);
            tb.T.row(i) /= piv;
            for (int k = 0; k < m; ++k) {
                if (k == i) continue;
                double f = tb.T(k, enter);
                if (f != 0.0) tb.T.row(k) -= f * tb.T.row(i);
            }
            tb.basis[static_cast<std::size_t>(i)] = enter;
        }

        // Phase 2: maximize c'x with artificials barred from entering.
        VectorXd c2 = VectorXd::Zero(n + m);
        c2.head(n) = c;
        tb.load_objective(c2);
        while (tb.pivot_once(false, tol)) {}
    } catch (LpStatus s) {
        sol.status = s;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.x = VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) {
        int bj = tb.basis[static_cast<std::size_t>(i)];
        if (bj < n) sol.x[bj] = tb.T(i, tb.rhs());
    }
    sol.value = c.dot(sol.x);
    // Duals y = c_B B^{-1} sit in the artificial columns of the final
    // reduced-cost row; undo the row sign flips applied to make b >= 0.
    sol.dual = VectorXd(m);
    for (int i = 0; i < m; ++i) sol.dual[i] = tb.obj[n + i] * flip[i];
    return sol;
}

LpSolution solve_lp_min(const MatrixXd& A, const VectorXd& b, const VectorXd& c, double tol) {
    LpSolution sol = solve_lp_max(A, b, -c, tol);
    if (sol.status == LpStatus::Optimal) {
        sol.value = -sol.value;
        sol.dual = -sol.dual;
    }
    return sol;
}

} // namespace fim
