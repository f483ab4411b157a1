#pragma once

#include "fim/common.hpp"
#include "fim/envelope.hpp"
#include "fim/payoff.hpp"

namespace fim {

// Buy-and-hold portfolio plus cancellation at the first exit from an
// interval: the cheapest super-replicating strategy.
struct TrivialHedge {
    double initial_capital = 0.0; // g(s0)
    double gamma = 0.0;           // d+g(s0) off the contact set, 0 on it
    double cash0 = 0.0;           // initial_capital - gamma * s0
    double s0 = 0.0;
    Interval exit_interval;       // K_{s0}; empty means cancel at once
    bool assumption_ok = true;
    bool override_used = false;
};

struct AssumptionCheck {
    bool ok = false;
    // which branch made it pass
    bool rate_zero = false;
    bool contact_at_s0 = false;     // g(s0) = f2(s0)
    bool nonneg_bank = false;       // g(s0) - s0 d+g(s0) >= 0
    // sufficient conditions, reported for diagnostics
    bool constant_penalty = false;  // f2 = f1 + const
    bool nonpos_f2_slope = false;   // sup d+f2 = 0 (puts)
    bool infinite_f1_slope = false; // sup d+f1 = inf (powers)
};

AssumptionCheck check_assumption(const GamePayoffPair& pair, double s0, double g_s0,
                                 double dplus_s0, bool rate_is_zero);

TrivialHedge build_hedge(const ConvexEnvelopeParams& params, const GamePayoffPair& pair, double s0,
                         bool rate_is_zero, bool allow_override = false);
TrivialHedge build_hedge(const EnvelopeResult& env, const GamePayoffPair& pair, double s0,
                         bool rate_is_zero, bool allow_override = false);

// Value of the buy-and-hold portfolio: b_ratio * cash0 + gamma * s_t.
double portfolio_value(const TrivialHedge& hedge, double s_t, double b_ratio);

struct PathCheck {
    double slack_min = kInf;
    Eigen::Index sigma_index = 0; // grid index of cancellation
    double overshoot = 0.0;       // distance past the exit boundary at sigma
    bool violated = false;
};

// Audits the super-replication inequality along one sampled path. The
// per-path tolerance is base_tol + L * overshoot, absorbing the grid-time
// rendering of the continuous exit time.
PathCheck verify_path(const TrivialHedge& hedge, const GamePayoffPair& pair,
                      const ArrayXd& times, const Eigen::Ref<const Eigen::RowVectorXd>& s_path,
                      const ArrayXd& b_path, double base_tol);

} // namespace fim
