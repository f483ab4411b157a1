#pragma once

#include "fim/common.hpp"
#include "fim/hedge.hpp"
#include "fim/models.hpp"
#include "fim/stopvalue.hpp"

#include <cstdint>

namespace fim {

struct SuperRepReport {
    int n_paths = 0;
    double violation_fraction = 0.0;
    double min_slack = 0.0;
    double slack_tolerance = 0.0;
    double max_overshoot = 0.0;
    double capital = 0.0;
    double gamma = 0.0;
    std::vector<int> per_path_sigma;
    std::vector<double> per_path_slack;
    std::uint64_t seed = 0;
};

// Builds the envelope and cheapest trivial hedge for the pair at s0,
// simulates the model, and audits the super-replication inequality on every
// path. The slack tolerance separates float noise from the measured
// grid-crossing overshoot: 1e-9 (1+capital) + L * max overshoot.
SuperRepReport mc_superreplication(const ModelSpec& spec, const GamePayoffPair& pair, double s0,
                                   int n_paths, int n_steps, std::uint64_t seed,
                                   bool allow_override = false, int threads = 1);

// As above but on an already simulated batch (shared across pairs).
SuperRepReport mc_superreplication_batch(const PathBatch& batch, const GamePayoffPair& pair,
                                         bool rate_is_zero, bool allow_override, int threads = 1);

struct CounterexampleConfig {
    double r = 0.05;
    double delta = 0.0;
    double c2 = 2.0;
    double s0 = 120.0;
    int n_paths = 10000;
    int n_steps = 512;
};

// The negative configuration: doubled call with no penalty, started above
// the strike under a positive rate, hedge built with the override. Every
// path that stays above the strike for one grid step violates.
SuperRepReport counterexample_run(std::uint64_t seed, const CounterexampleConfig& cfg = {},
                                  int threads = 1);

struct LowerBoundRow {
    double v_hi = 0.0;
    double lattice_value = 0.0;
    double g_s0 = 0.0;
    double gap = 0.0;
};

struct LowerBoundTable {
    std::vector<LowerBoundRow> rows;
    bool pass = false;
};

// Lattice stopping value against the envelope at s0 for a ladder of
// volatility caps: the gaps must rise with v_hi and the final one must
// clear -1% (1 + g(s0)).
LowerBoundTable lower_bound_check(const GamePayoffPair& pair, double s0,
                                  const std::vector<double>& v_hi_list, const LatticeSpec& grid);

} // namespace fim
