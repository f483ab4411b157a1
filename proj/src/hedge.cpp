#include "fim/hedge.hpp"

#include <cmath>

namespace fim {

AssumptionCheck check_assumption(const GamePayoffPair& pair, double s0, double g_s0,
                                 double dplus_s0, bool rate_is_zero) {
    AssumptionCheck c;
    double f2_s0 = pair.f2(s0);
    c.rate_zero = rate_is_zero;
    c.contact_at_s0 = g_s0 >= f2_s0 - 1e-9 * (1.0 + std::abs(f2_s0));
    c.nonneg_bank = g_s0 - s0 * dplus_s0 >= -1e-12 * (1.0 + std::abs(g_s0));
    c.ok = c.rate_zero || c.contact_at_s0 || c.nonneg_bank;

    // Sufficient conditions from the examples: constant penalty, puts,
    // powers. Reported only; the direct check above decides.
    if (pair.f1.kind() == pair.f2.kind() && pair.f1.kind() != PayoffKind::Tabulated) {
        bool same_shape = pair.f1.kind() == PayoffKind::Power
                              ? pair.f1.exponent() == pair.f2.exponent()
                              : pair.f1.strike() == pair.f2.strike();
        c.constant_penalty = same_shape && pair.f1.scale() == pair.f2.scale() &&
                             pair.f2.penalty() > pair.f1.penalty();
    }
    double sup_f2 = pair.f2.asymptotic_slope();
    c.nonpos_f2_slope = sup_f2 <= 0.0;
    c.infinite_f1_slope = std::isinf(pair.f1.asymptotic_slope());
    return c;
}

namespace {

TrivialHedge make_hedge(const GamePayoffPair& pair, double s0, double g_s0, double dplus_s0,
                        double f2_s0, Interval exit, bool rate_is_zero, bool allow_override) {
    TrivialHedge h;
    h.s0 = s0;
    h.initial_capital = g_s0;
    bool contact = g_s0 >= f2_s0 - 1e-9 * (1.0 + std::abs(f2_s0));
    if (contact) {
        h.initial_capital = f2_s0;
        h.gamma = 0.0;
        h.exit_interval = Interval{s0, s0, true}; // cancel immediately
    } else {
        h.gamma = dplus_s0;
        h.exit_interval = exit;
    }
    h.cash0 = h.initial_capital - h.gamma * s0;

    AssumptionCheck chk = check_assumption(pair, s0, g_s0, dplus_s0, rate_is_zero);
    h.assumption_ok = chk.ok;
    if (!chk.ok) {
        if (!allow_override)
            throw std::invalid_argument(
                "build_hedge: hedge has a negative bank leg under r > 0; "
                "pass allow_override to build it anyway");
        h.override_used = true;
    }
    return h;
}

} // namespace

TrivialHedge build_hedge(const ConvexEnvelopeParams& params, const GamePayoffPair& pair, double s0,
                         bool rate_is_zero, bool allow_override) {
    if (!(s0 > 0.0)) throw std::domain_error("build_hedge: s0 must be positive");
    double g_s0 = g_closed_form(params, pair, s0);
    double d_s0 = right_derivative(params, pair, s0);
    return make_hedge(pair, s0, g_s0, d_s0, pair.f2(s0), stop_interval(params, pair, s0),
                      rate_is_zero, allow_override);
}

TrivialHedge build_hedge(const EnvelopeResult& env, const GamePayoffPair& pair, double s0,
                         bool rate_is_zero, bool allow_override) {
    double g_s0 = env.value_at(s0);
    double d_s0 = env.dplus_at(s0);
    return make_hedge(pair, s0, g_s0, d_s0, pair.f2(s0), stop_interval(env, s0), rate_is_zero,
                      allow_override);
}

double portfolio_value(const TrivialHedge& hedge, double s_t, double b_ratio) {
    return b_ratio * hedge.cash0 + hedge.gamma * s_t;
}

PathCheck verify_path(const TrivialHedge& hedge, const GamePayoffPair& pair, const ArrayXd& times,
                      const Eigen::Ref<const Eigen::RowVectorXd>& s_path, const ArrayXd& b_path,
                      double base_tol) {
    const Eigen::Index m = times.size();
    if (s_path.size() != m || b_path.size() != m)
        throw std::invalid_argument("verify_path: path arrays misaligned with time grid");

    // sigma: first grid time outside the exit interval (0 when empty).
    Eigen::Index sigma = m - 1;
    if (hedge.exit_interval.empty) {
        sigma = 0;
    } else {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (!hedge.exit_interval.contains(s_path[j])) {
                sigma = j;
                break;
            }
        }
    }

    PathCheck out;
    out.sigma_index = sigma;
    if (!hedge.exit_interval.empty && sigma < m) {
        double s = s_path[sigma];
        if (s <= hedge.exit_interval.lo) out.overshoot = hedge.exit_interval.lo - s;
        else if (s >= hedge.exit_interval.hi) out.overshoot = s - hedge.exit_interval.hi;
    }

    // Grid times strictly before the exit are inside the interval, where the
    // concavity bound holds pathwise; only the sigma-indexed legs feel the
    // discrete crossing and receive the L * overshoot allowance.
    double interior_min = kInf, exit_min = kInf;
    for (Eigen::Index j = 0; j < sigma; ++j) {
        double slack = portfolio_value(hedge, s_path[j], b_path[j]) - pair.f1(s_path[j]);
        interior_min = std::min(interior_min, slack);
    }
    double z_sigma = portfolio_value(hedge, s_path[sigma], b_path[sigma]);
    exit_min = z_sigma - pair.f1(s_path[sigma]); // t = sigma keeps the buyer leg
    if (sigma < m - 1) exit_min = std::min(exit_min, z_sigma - pair.f2(s_path[sigma]));

    out.slack_min = std::min(interior_min, exit_min);
    out.violated = interior_min < -base_tol ||
                   exit_min < -(base_tol + pair.L * out.overshoot);
    return out;
}

} // namespace fim
