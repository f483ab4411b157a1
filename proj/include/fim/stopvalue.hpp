#pragma once

#include "fim/common.hpp"
#include "fim/payoff.hpp"

namespace fim {

// Explicit finite-difference lattice in log-price for the optimal stopping
// value under volatility uncertainty, volatility controlled in [v_lo, v_hi].
struct LatticeSpec {
    double x_min = 1.0;
    double x_max = 3000.0;
    int n_y = 1200;
    double u = 1.0; // horizon
    int n_t = 0;
    double v_lo = 1e-3;
    double v_hi = 6.0;

    // n_t chosen from the stability bound dt <= dy^2 / v_hi^2.
    static LatticeSpec with_cfl(double x_min, double x_max, int n_y, double u, double v_lo,
                                double v_hi);
    double dy() const { return (std::log(x_max) - std::log(x_min)) / (n_y - 1); }
    double dt() const { return u / n_t; }
    void validate() const;
};

struct ValueSurface {
    LatticeSpec spec;
    ArrayXd y; // log-price grid
    // Time slices are stored with a fixed stride so big lattices stay small
    // in memory; slice 0 is t = 0 and the last slice is t = u.
    std::vector<double> slice_times;
    std::vector<ArrayXd> values;
    std::vector<std::vector<std::uint8_t>> feedback_hi; // argmax volatility == v_hi

    double value0_at(double x) const; // V(0, ln x), linear in y
};

ValueSurface solve_g_lattice(const GamePayoffPair& pair, const LatticeSpec& spec,
                             int max_stored_slices = 129);

double horizon_invariance_gap(const GamePayoffPair& pair, const LatticeSpec& spec, double x0,
                              double u1, double u2);

// Recorded argmax volatilities, clamped to [v_lo, v_hi]. Requires v_lo > 0
// so the reciprocal of the control stays bounded.
struct FeedbackTable {
    std::vector<double> times;
    ArrayXd y;
    std::vector<ArrayXd> vol;
    double alpha0_at_x0 = 0.0;
};
FeedbackTable extract_feedback_vol(const ValueSurface& surface, double x0);

} // namespace fim
