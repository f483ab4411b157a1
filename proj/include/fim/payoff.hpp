#pragma once

#include "fim/common.hpp"

#include <string>
#include <vector>

namespace fim {

enum class PayoffKind { Call, Put, Power, Tabulated };

// One side of a game-option contract: a continuous non-negative payoff
// on (0, inf). Immutable after construction.
class PayoffFn {
  public:
    static PayoffFn call(double strike, double scale = 1.0, double penalty = 0.0);
    static PayoffFn put(double strike, double scale = 1.0, double penalty = 0.0);
    static PayoffFn power(double exponent, double scale = 1.0, double penalty = 0.0);
    // Strictly increasing abscissae; linear interpolation inside, linear
    // extrapolation with the boundary slopes outside.
    static PayoffFn tabulated(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;
    double right_derivative(double x) const;

    double value_at_zero() const;       // limit as x -> 0+
    double asymptotic_slope() const;    // lim_{x->inf} d+f, may be +inf
    bool is_convex() const;
    std::vector<double> kinks() const;  // abscissae where d+f jumps

    PayoffKind kind() const { return kind_; }
    double strike() const { return strike_; }
    double exponent() const { return exponent_; }
    double scale() const { return scale_; }
    double penalty() const { return penalty_; }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

  private:
    PayoffKind kind_ = PayoffKind::Call;
    double strike_ = 0.0, exponent_ = 0.0, scale_ = 1.0, penalty_ = 0.0;
    std::vector<double> xs_, ys_;
    double slope_lo_ = 0.0, slope_hi_ = 0.0; // tabulated boundary slopes
};

// The contract pair f1 <= f2 together with the growth constant L of the
// modulus condition |f(x)-f(y)| <= L|x-y|(1 + f(x)/x + f(y)/y).
struct GamePayoffPair {
    PayoffFn f1;
    PayoffFn f2;
    double L = 4.0;

    GamePayoffPair(PayoffFn buyer, PayoffFn seller, double growth_L);
    bool both_convex() const { return f1.is_convex() && f2.is_convex(); }
};

struct ValidationReport {
    bool pass = true;
    enum class Failure { None, Order, Growth } failure = Failure::None;
    double x = 0.0, y = 0.0; // first offending point / pair
    std::string message;
};

ValidationReport validate_pair(const GamePayoffPair& pair, const std::vector<double>& probe);

// Log-spaced probe grid around s0 plus every payoff kink.
std::vector<double> default_probe(const GamePayoffPair& pair, double s0, int n = 512);

// Bounds f_i(x) <= Ltilde (1 + x^N) on (0, inf), N > 1.
struct GrowthBound {
    double Ltilde;
    double N;
};
GrowthBound growth_exponent(const GamePayoffPair& pair);

} // namespace fim
