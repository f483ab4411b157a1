#pragma once

#include "fim/common.hpp"
#include "fim/models.hpp"

#include <cstdint>

namespace fim {

// Target volatility functional of (t, W_t): either a constant nu0 or
// nu0 * exp(clip(a W_t + b t, +-cap)). Bounded with bounded reciprocal by
// construction, and equal to nu0 at t = 0.
struct SteerTarget {
    enum class Kind { Const, ExpAffine } kind = Kind::Const;
    double nu0 = 0.3;
    double a = 0.0;
    double b = 0.0;
    double cap = 1.0;

    static SteerTarget constant(double nu0) { return SteerTarget{Kind::Const, nu0, 0, 0, 0}; }
    static SteerTarget exp_affine(double nu0, double a, double b, double cap);

    double value(double t, double w) const;
    double bound() const; // C with 1/C <= alpha <= C
};

struct SteerReport {
    double prob_exceed = 0.0;
    double mc_stderr = 0.0;
    int n_blocks = 0;
    // Coefficient-bound threshold 2*C~/T from the block construction; block
    // counts below it are reported, not rejected.
    double block_threshold = 0.0;
    bool below_threshold = false;
};

// Block-drift change of measure for the Heston volatility: simulates nu
// directly under the steered measure and estimates the chance that the
// running distance to the target ever exceeds eps.
SteerReport steer_volatility(const ModelSpec& heston, const SteerTarget& target, int n_blocks,
                             double eps, int n_paths, int n_steps, std::uint64_t seed,
                             int threads = 1);

} // namespace fim
