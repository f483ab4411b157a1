#pragma once

// Internal helpers shared between the envelope solver and its tests.

#include "fim/payoff.hpp"

namespace fim::detail {

// Exact slope of a payoff as x -> 0+.
double slope_at_zero(const PayoffFn& f);

// One red-black Gauss-Seidel sweep of h -> max(f1, min(f2, avg)) with the
// pinned left boundary and the slope right boundary. Returns the sup-change;
// min_delta reports the most negative pointwise move (monotone tracking).
double obstacle_sweep(Eigen::ArrayXd& h, const Eigen::ArrayXd& f1v, const Eigen::ArrayXd& f2v,
                      double mhat_dx, double* min_delta);

} // namespace fim::detail
