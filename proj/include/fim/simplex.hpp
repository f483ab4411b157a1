#pragma once

#include "fim/common.hpp"

namespace fim {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    VectorXd x;
    VectorXd dual; // one multiplier per equality row
};

// min c'x  s.t.  A x = b, x >= 0. Dense two-phase tableau simplex with
// Bland's rule, adequate for the desk-scale trees handled here.
LpSolution solve_lp_min(const MatrixXd& A, const VectorXd& b, const VectorXd& c,
                        double tol = 1e-9);

LpSolution solve_lp_max(const MatrixXd& A, const VectorXd& b, const VectorXd& c,
                        double tol = 1e-9);

} // namespace fim
