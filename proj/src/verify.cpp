#include "fim/verify.hpp"
#include "fim/envelope.hpp"

#include <cmath>

namespace fim {

namespace {

TrivialHedge hedge_for(const GamePayoffPair& pair, double s0, bool rate_is_zero,
                       bool allow_override) {
    if (pair.both_convex()) {
        ConvexEnvelopeParams cp = convex_params(pair);
        return build_hedge(cp, pair, s0, rate_is_zero, allow_override);
    }
    GridOptions opt;
    auto [lo, hi] = choose_domain(pair, s0, opt.n_points);
    EnvelopeResult env = g_grid(pair, lo, hi, opt);
    return build_hedge(env, pair, s0, rate_is_zero, allow_override);
}

} // namespace

SuperRepReport mc_superreplication_batch(const PathBatch& batch, const GamePayoffPair& pair,
                                         bool rate_is_zero, bool allow_override, int threads) {
    const int n_paths = static_cast<int>(batch.S.rows());
    double s0 = batch.S(0, 0);
    TrivialHedge hedge = hedge_for(pair, s0, rate_is_zero, allow_override);

    SuperRepReport rep;
    rep.n_paths = n_paths;
    rep.capital = hedge.initial_capital;
    rep.gamma = hedge.gamma;
    rep.seed = batch.seed;
    rep.per_path_sigma.resize(static_cast<std::size_t>(n_paths));
    rep.per_path_slack.resize(static_cast<std::size_t>(n_paths));
    std::vector<double> overshoot(static_cast<std::size_t>(n_paths));
    std::vector<std::uint8_t> violated(static_cast<std::size_t>(n_paths));
    const double base_tol = 1e-9 * (1.0 + std::abs(hedge.initial_capital));

    parallel_for(n_paths, threads, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t p = lo; p < hi; ++p) {
            PathCheck chk =
                verify_path(hedge, pair, batch.times, batch.S.row(p), batch.bank, base_tol);
            rep.per_path_sigma[static_cast<std::size_t>(p)] = static_cast<int>(chk.sigma_index);
            rep.per_path_slack[static_cast<std::size_t>(p)] = chk.slack_min;
            overshoot[static_cast<std::size_t>(p)] = chk.overshoot;
            violated[static_cast<std::size_t>(p)] = chk.violated ? 1 : 0;
        }
    });

    // Violations are judged per path (each with its own crossing allowance);
    // the reported tolerance covers min_slack across the batch.
    rep.max_overshoot = 0.0;
    for (double o : overshoot) rep.max_overshoot = std::max(rep.max_overshoot, o);
    rep.slack_tolerance = base_tol + pair.L * rep.max_overshoot;
    rep.min_slack = kInf;
    long n_violated = 0;
    for (int p = 0; p < n_paths; ++p) {
        rep.min_slack = std::min(rep.min_slack, rep.per_path_slack[static_cast<std::size_t>(p)]);
        n_violated += violated[static_cast<std::size_t>(p)];
    }
    rep.violation_fraction = static_cast<double>(n_violated) / n_paths;
    return rep;
}

SuperRepReport mc_superreplication(const ModelSpec& spec, const GamePayoffPair& pair, double s0,
                                   int n_paths, int n_steps, std::uint64_t seed,
                                   bool allow_override, int threads) {
    if (std::abs(spec.s0 - s0) > 1e-12 * (1.0 + s0))
        throw std::invalid_argument("mc_superreplication: spec.s0 must equal s0");
    PathBatch batch = simulate(spec, n_steps, n_paths, seed, threads);
    return mc_superreplication_batch(batch, pair, spec.rate.is_zero(), allow_override, threads);
}

SuperRepReport counterexample_run(std::uint64_t seed, const CounterexampleConfig& cfg,
                                  int threads) {
    GamePayoffPair pair{PayoffFn::call(100.0, 1.0, 0.0), PayoffFn::call(100.0, cfg.c2, cfg.delta),
                        4.0};
    ModelSpec spec = ModelSpec::heston(cfg.s0, cfg.r, 1.0, 2.0, 0.09, 0.3, -0.5, 0.09);
    return mc_superreplication(spec, pair, cfg.s0, cfg.n_paths, cfg.n_steps, seed,
                               /*allow_override=*/true, threads);
}

LowerBoundTable lower_bound_check(const GamePayoffPair& pair, double s0,
                                  const std::vector<double>& v_hi_list, const LatticeSpec& grid) {
    double g_s0;
    if (pair.both_convex()) {
        g_s0 = g_closed_form(convex_params(pair), pair, s0);
    } else {
        GridOptions opt;
        auto [lo, hi] = choose_domain(pair, s0, opt.n_points);
        g_s0 = g_grid(pair, lo, hi, opt).value_at(s0);
    }

    LowerBoundTable table;
    for (double v_hi : v_hi_list) {
        LatticeSpec spec =
            LatticeSpec::with_cfl(grid.x_min, grid.x_max, grid.n_y, grid.u, grid.v_lo, v_hi);
        ValueSurface surf = solve_g_lattice(pair, spec, 2);
        LowerBoundRow row;
        row.v_hi = v_hi;
        row.lattice_value = surf.value0_at(s0);
        row.g_s0 = g_s0;
        row.gap = row.lattice_value - g_s0;
        table.rows.push_back(row);
    }
    double tol = 1e-3 * (1.0 + std::abs(g_s0));
    bool monotone = true;
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        if (table.rows[i].gap < table.rows[i - 1].gap - tol) monotone = false;
    bool final_ok = !table.rows.empty() &&
                    table.rows.back().gap >= -0.01 * (1.0 + std::abs(g_s0));
    table.pass = monotone && final_ok;
    return table;
}

} // namespace fim
