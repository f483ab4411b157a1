#pragma once

#include "fim/common.hpp"
#include "fim/payoff.hpp"

#include <optional>

namespace fim {

// Parameters of the closed-form envelope for convex pairs: threshold A,
// initial slope beta, asymptotic slope m of f1, slope-crossing price rho.
// Any of them may be +inf, but min(beta, m) is always finite.
struct ConvexEnvelopeParams {
    double A;
    double beta;
    double m;
    double rho;
};

ConvexEnvelopeParams convex_params(const GamePayoffPair& pair);

double g_closed_form(const ConvexEnvelopeParams& p, const GamePayoffPair& pair, double x);
double right_derivative(const ConvexEnvelopeParams& p, const GamePayoffPair& pair, double x);

// Contact set {x : g(x) = f2(x)} of the closed-form envelope, as a closed
// interval with the empty/inf conventions.
Interval contact_interval(const ConvexEnvelopeParams& p, const GamePayoffPair& pair);

// K_x: the maximal open interval around x on which g < f2; empty when
// g(x) = f2(x).
Interval stop_interval(const ConvexEnvelopeParams& p, const GamePayoffPair& pair, double x);

enum class GridMethod {
    // Active-set tridiagonal solve of the double-obstacle system, followed
    // by plain sweeps until the sup-change drops below tol. The fixed point
    // is unique, so this lands on the same function as the from-below
    // iteration at a fraction of the cost.
    Direct,
    // Monotone from-below iteration exactly as stated: h0 = f1, red-black
    // Gauss-Seidel sweeps of T until sup-change < tol.
    Sweeps,
};

struct GridOptions {
    int n_points = 4096;
    double tol = 1e-9;
    GridMethod method = GridMethod::Direct;
    long max_sweep_factor = 10; // sweep cap = factor * n^2
};

struct EnvelopeResult {
    ArrayXd xs;
    ArrayXd g;
    ArrayXd dplus;
    std::vector<std::uint8_t> stop_mask;
    std::optional<ConvexEnvelopeParams> convex;
    double tol = 1e-9;

    long sweeps = 0;
    double final_change = 0.0;
    // Largest pointwise decrease observed while iterating from h = f1; the
    // monotone operator keeps this at zero up to rounding.
    double monotone_violation = 0.0;

    double value_at(double x) const;
    double dplus_at(double x) const;
    int index_at(double x) const;
};

// Least fixed point of h -> max(f1, min(f2, avg)) above f1 on a uniform
// price grid. Throws on non-convergence, carrying the last sup-change.
EnvelopeResult g_grid(const GamePayoffPair& pair, double x_min, double x_max,
                      const GridOptions& opt = {});

// Default grid domain: [1e-4 s0, ~8 s0], with the spacing nudged so the
// payoff kink nearest s0 lands on a node. Kink-aligned meshing keeps the
// fixed point inside the closed-form tolerance band.
std::pair<double, double> choose_domain(const GamePayoffPair& pair, double s0, int n_points);

Interval stop_interval(const EnvelopeResult& env, double x);

} // namespace fim
