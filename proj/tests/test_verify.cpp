#include "fim/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace fim;

TEST_CASE("pathwise super-replication across a quick model sweep") {
    GamePayoffPair call{PayoffFn::call(100, 1, 0), PayoffFn::call(100, 1, 10), 4.0};
    std::vector<ModelSpec> specs = {
        ModelSpec::heston(80, 0, 1, 2.0, 0.09, 0.3, -0.5, 0.09),
        ModelSpec::hull_white(80, 0, 1, 0.2, 0.5, -0.3, 0.09),
        ModelSpec::scott(80, 0, 1, 0.3, 1.0, 0.4, -0.3, 0.0),
        ModelSpec::rough_fou(80, 0, 1, 0.1, 1.0, 1.0, -0.3, 0.3),
    };
    for (const auto& spec : specs) {
        SuperRepReport rep = mc_superreplication(spec, call, 80.0, 1500, 128, 42, false, 4);
        CHECK(rep.violation_fraction == 0.0);
        CHECK(rep.capital == doctest::Approx(8.0));
        CHECK(rep.min_slack >= -rep.slack_tolerance);
    }
}

TEST_CASE("put with positive rate keeps the guarantee") {
    GamePayoffPair put{PayoffFn::put(100, 1, 0), PayoffFn::put(100, 1, 10), 4.0};
    ModelSpec spec = ModelSpec::heston(80, 0.03, 1, 2.0, 0.09, 0.3, -0.5, 0.09);
    SuperRepReport rep = mc_superreplication(spec, put, 80.0, 1500, 128, 7, false, 4);
    CHECK(rep.violation_fraction == 0.0);
    CHECK(rep.capital == doctest::Approx(28.0));
}

TEST_CASE("counterexample violates and its controls do not") {
    CounterexampleConfig cfg;
    cfg.n_paths = 1500;
    cfg.n_steps = 128;
    SuperRepReport bad = counterexample_run(99, cfg, 4);
    CHECK(bad.violation_fraction >= 0.99);

    CounterexampleConfig zero = cfg;
    zero.r = 0.0;
    CHECK(counterexample_run(99, zero, 4).violation_fraction == 0.0);

    CounterexampleConfig pinned = cfg;
    pinned.delta = 100.0; // delta = strike: the bank leg vanishes
    CHECK(counterexample_run(99, pinned, 4).violation_fraction == 0.0);
}

TEST_CASE("sigma equals zero on the contact set") {
    GamePayoffPair put{PayoffFn::put(100, 1, 0), PayoffFn::put(100, 1, 10), 4.0};
    ModelSpec spec = ModelSpec::heston(120, 0, 1, 2.0, 0.09, 0.3, -0.5, 0.09);
    SuperRepReport rep = mc_superreplication(spec, put, 120.0, 400, 64, 3);
    CHECK(rep.violation_fraction == 0.0);
    CHECK(rep.capital == doctest::Approx(10.0));
    for (int s : rep.per_path_sigma) CHECK(s == 0);
}

TEST_CASE("reports are identical across thread counts") {
    GamePayoffPair call{PayoffFn::call(100, 1, 0), PayoffFn::call(100, 1, 10), 4.0};
    ModelSpec spec = ModelSpec::heston(80, 0, 1, 2.0, 0.09, 0.3, -0.5, 0.09);
    SuperRepReport a = mc_superreplication(spec, call, 80.0, 600, 64, 5, false, 1);
    SuperRepReport b = mc_superreplication(spec, call, 80.0, 600, 64, 5, false, 8);
    CHECK(a.min_slack == b.min_slack);
    CHECK(a.max_overshoot == b.max_overshoot);
    CHECK(a.per_path_sigma == b.per_path_sigma);
    CHECK(a.per_path_slack == b.per_path_slack);
}

TEST_CASE("lattice lower bound table on the worked call") {
    GamePayoffPair call{PayoffFn::call(100, 1, 0), PayoffFn::call(100, 1, 10), 4.0};
    LatticeSpec grid;
    grid.x_min = 1;
    grid.x_max = 3000;
    grid.n_y = 600;
    grid.u = 1.0;
    grid.v_lo = 1e-3;
    grid.n_t = 1; // ladder entries re-derive their own CFL step counts
    LowerBoundTable tab = lower_bound_check(call, 80.0, {2.0, 4.0, 6.0}, grid);
    REQUIRE(tab.rows.size() == 3);
    CHECK(tab.pass);
    CHECK(tab.rows[0].gap <= tab.rows[2].gap + 1e-6);
    CHECK(std::abs(tab.rows[2].gap) <= 0.01 * (1.0 + 8.0));

    // identity pair: the obstacle binds immediately at every cap
    GamePayoffPair ident{PayoffFn::call(100, 1, 0), PayoffFn::call(100, 1, 0), 4.0};
    LowerBoundTable flat = lower_bound_check(ident, 80.0, {2.0, 4.0}, grid);
    for (const auto& row : flat.rows) CHECK(std::abs(row.gap) < 1e-9);
}
