#include "fim/payoff.hpp"

#include <algorithm>
#include <cmath>

namespace fim {

PayoffFn PayoffFn::call(double strike, double scale, double penalty) {
    if (strike <= 0.0) throw std::invalid_argument("call: strike must be positive");
    if (scale < 0.0 || penalty < 0.0) throw std::invalid_argument("call: scale/penalty must be >= 0");
    PayoffFn f;
    f.kind_ = PayoffKind::Call;
    f.strike_ = strike;
    f.scale_ = scale;
    f.penalty_ = penalty;
    return f;
}

PayoffFn PayoffFn::put(double strike, double scale, double penalty) {
    if (strike <= 0.0) throw std::invalid_argument("put: strike must be positive");
    if (scale < 0.0 || penalty < 0.0) throw std::invalid_argument("put: scale/penalty must be >= 0");
    PayoffFn f;
    f.kind_ = PayoffKind::Put;
    f.strike_ = strike;
    f.scale_ = scale;
    f.penalty_ = penalty;
    return f;
}

PayoffFn PayoffFn::power(double exponent, double scale, double penalty) {
    if (exponent <= 1.0) throw std::invalid_argument("power: exponent must exceed 1");
    if (scale < 0.0 || penalty < 0.0) throw std::invalid_argument("power: scale/penalty must be >= 0");
    PayoffFn f;
    f.kind_ = PayoffKind::Power;
    f.exponent_ = exponent;
    f.scale_ = scale;
    f.penalty_ = penalty;
    return f;
}

PayoffFn PayoffFn::tabulated(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size())
        throw std::invalid_argument("tabulated: need matching xs/ys with at least two nodes");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] <= 0.0) throw std::invalid_argument("tabulated: abscissae must be positive");
        if (ys[i] < 0.0) throw std::invalid_argument("tabulated: values must be non-negative");
        if (i > 0 && xs[i] <= xs[i - 1])
            throw std::invalid_argument("tabulated: abscissae must be strictly increasing");
    }
    PayoffFn f;
    f.kind_ = PayoffKind::Tabulated;
    f.xs_ = std::move(xs);
    f.ys_ = std::move(ys);
    std::size_t n = f.xs_.size();
    f.slope_lo_ = (f.ys_[1] - f.ys_[0]) / (f.xs_[1] - f.xs_[0]);
    f.slope_hi_ = (f.ys_[n - 1] - f.ys_[n - 2]) / (f.xs_[n - 1] - f.xs_[n - 2]);
    // Non-negativity must survive extrapolation on all of (0, inf).
    if (f.ys_[0] - f.slope_lo_ * f.xs_[0] < 0.0)
        throw std::invalid_argument("tabulated: left extrapolation dips below zero near 0");
    if (f.slope_hi_ < 0.0)
        throw std::invalid_argument("tabulated: negative right boundary slope goes negative at infinity");
    return f;
}

double PayoffFn::operator()(double x) const {
    if (!(x > 0.0)) throw std::domain_error("payoff: price must be positive");
    switch (kind_) {
        case PayoffKind::Call: return scale_ * std::max(x - strike_, 0.0) + penalty_;
        case PayoffKind::Put: return scale_ * std::max(strike_ - x, 0.0) + penalty_;
        case PayoffKind::Power: return scale_ * std::pow(x, exponent_) + penalty_;
        case PayoffKind::Tabulated: {
            if (x <= xs_.front()) return ys_.front() + slope_lo_ * (x - xs_.front());
            if (x >= xs_.back()) return ys_.back() + slope_hi_ * (x - xs_.back());
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            std::size_t i = static_cast<std::size_t>(it - xs_.begin());
            double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
            return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
        }
    }
    throw std::logic_error("payoff: unknown kind");
}

double PayoffFn::right_derivative(double x) const {
    if (!(x > 0.0)) throw std::domain_error("payoff: price must be positive");
    switch (kind_) {
        case PayoffKind::Call: return x >= strike_ ? scale_ : 0.0;
        case PayoffKind::Put: return x >= strike_ ? 0.0 : -scale_;
        case PayoffKind::Power: return scale_ * exponent_ * std::pow(x, exponent_ - 1.0);
        case PayoffKind::Tabulated: {
            if (x < xs_.front()) return slope_lo_;
            if (x >= xs_.back()) return slope_hi_;
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            std::size_t i = static_cast<std::size_t>(it - xs_.begin());
            return (ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]);
        }
    }
    throw std::logic_error("payoff: unknown kind");
}

double PayoffFn::value_at_zero() const {
    switch (kind_) {
        case PayoffKind::Call: return penalty_;
        case PayoffKind::Put: return scale_ * strike_ + penalty_;
        case PayoffKind::Power: return penalty_;
        case PayoffKind::Tabulated: return ys_.front() - slope_lo_ * xs_.front();
    }
    throw std::logic_error("payoff: unknown kind");
}

double PayoffFn::asymptotic_slope() const {
    switch (kind_) {
        case PayoffKind::Call: return scale_;
        case PayoffKind::Put: return 0.0;
        case PayoffKind::Power: return scale_ > 0.0 ? kInf : 0.0;
        case PayoffKind::Tabulated: return slope_hi_;
    }
    throw std::logic_error("payoff: unknown kind");
}

bool PayoffFn::is_convex() const {
    if (kind_ != PayoffKind::Tabulated) return true;
    double prev = slope_lo_;
    for (std::size_t i = 1; i < xs_.size(); ++i) {
        double s = (ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]);
        double scale = 1.0 + std::abs(prev) + std::abs(s);
        if (s < prev - 1e-12 * scale) return false;
        prev = s;
    }
    return true;
}

std::vector<double> PayoffFn::kinks() const {
    switch (kind_) {
        case PayoffKind::Call:
        case PayoffKind::Put: return {strike_};
        case PayoffKind::Power: return {};
        case PayoffKind::Tabulated: return xs_;
    }
    return {};
}

namespace {

// Structural dominance check for same-family pairs; anything else is left
// to validate_pair.
void check_structural_order(const PayoffFn& f1, const PayoffFn& f2) {
    if (f1.kind() != f2.kind() || f1.kind() == PayoffKind::Tabulated) return;
    bool same_shape = (f1.kind() == PayoffKind::Power) ? f1.exponent() == f2.exponent()
                                                       : f1.strike() == f2.strike();
    if (!same_shape) return;
    if (f2.scale() < f1.scale() || f2.penalty() < f1.penalty())
        throw std::invalid_argument("pair: seller payoff does not dominate buyer payoff");
}

} // namespace

GamePayoffPair::GamePayoffPair(PayoffFn buyer, PayoffFn seller, double growth_L)
    : f1(std::move(buyer)), f2(std::move(seller)), L(growth_L) {
    if (!(L > 1.0)) throw std::invalid_argument("pair: growth constant L must exceed 1");
    check_structural_order(f1, f2);
}

ValidationReport validate_pair(const GamePayoffPair& pair, const std::vector<double>& probe) {
    if (probe.empty()) throw std::invalid_argument("validate_pair: empty probe grid");
    for (double x : probe)
        if (!(x > 0.0)) throw std::invalid_argument("validate_pair: probe points must be positive");

    ValidationReport rep;
    for (double x : probe) {
        if (pair.f1(x) > pair.f2(x) + 1e-12 * (1.0 + std::abs(pair.f2(x)))) {
            rep.pass = false;
            rep.failure = ValidationReport::Failure::Order;
            rep.x = x;
            rep.message = "f1 exceeds f2";
            return rep;
        }
    }
    const PayoffFn* fs[2] = {&pair.f1, &pair.f2};
    for (const PayoffFn* f : fs) {
        for (double x : probe) {
            double fx = (*f)(x);
            for (double y : probe) {
                if (y <= x) continue;
                double fy = (*f)(y);
                double lhs = std::abs(fx - fy);
                double rhs = pair.L * (y - x) * (1.0 + fx / x + fy / y);
                if (lhs > rhs * (1.0 + 1e-12)) {
                    rep.pass = false;
                    rep.failure = ValidationReport::Failure::Growth;
                    rep.x = x;
                    rep.y = y;
                    rep.message = "growth modulus condition fails";
                    return rep;
                }
            }
        }
    }
    return rep;
}

std::vector<double> default_probe(const GamePayoffPair& pair, double s0, int n) {
    if (!(s0 > 0.0)) throw std::invalid_argument("default_probe: s0 must be positive");
    std::vector<double> probe;
    probe.reserve(static_cast<std::size_t>(n) + 8);
    double lo = std::log(s0 * 1e-3), hi = std::log(s0 * 1e3);
    for (int i = 0; i < n; ++i)
        probe.push_back(std::exp(lo + (hi - lo) * i / static_cast<double>(n - 1)));
    for (double k : pair.f1.kinks()) probe.push_back(k);
    for (double k : pair.f2.kinks()) probe.push_back(k);
    std::sort(probe.begin(), probe.end());
    probe.erase(std::unique(probe.begin(), probe.end()), probe.end());
    return probe;
}

namespace {

constexpr double kEta = 0.01; // N is floored at 1 + eta; the exact value is immaterial

GrowthBound payoff_growth(const PayoffFn& f) {
    switch (f.kind()) {
        case PayoffKind::Call: return {f.scale() + f.penalty() + 1.0, 1.0 + kEta};
        case PayoffKind::Put: return {f.scale() * f.strike() + f.penalty(), 1.0 + kEta};
        case PayoffKind::Power:
            return {f.scale() + f.penalty() + 1.0, std::max(f.exponent(), 1.0 + kEta)};
        case PayoffKind::Tabulated: {
            double max_y = *std::max_element(f.ys().begin(), f.ys().end());
            double lo_part = std::abs(f.right_derivative(f.xs().front() * 0.5)) * f.xs().front();
            double hi_part = std::max(f.asymptotic_slope(), 0.0);
            return {max_y + lo_part + hi_part, 1.0 + kEta};
        }
    }
    throw std::logic_error("payoff_growth: unknown kind");
}

} // namespace

GrowthBound growth_exponent(const GamePayoffPair& pair) {
    GrowthBound b1 = payoff_growth(pair.f1);
    GrowthBound b2 = payoff_growth(pair.f2);
    return {std::max(b1.Ltilde, b2.Ltilde), std::max(b1.N, b2.N)};
}

} // namespace fim
