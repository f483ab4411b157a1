#include "fim/envelope.hpp"

#include <doctest.h>

#include <cmath>

using namespace fim;

namespace {

GamePayoffPair call_pair(double c2 = 1.0, double delta = 10.0) {
    return GamePayoffPair{PayoffFn::call(100, 1, 0), PayoffFn::call(100, c2, delta), 4.0};
}

GamePayoffPair put_pair(double delta = 10.0) {
    return GamePayoffPair{PayoffFn::put(100, 1, 0), PayoffFn::put(100, 1, delta), 4.0};
}

GamePayoffPair power_pair(double c2 = 1.0, double delta = 4.0) {
    return GamePayoffPair{PayoffFn::power(2, 1, 0), PayoffFn::power(2, c2, delta), 4.0};
}

} // namespace

TEST_CASE("closed-form parameters for the worked call") {
    auto p = convex_params(call_pair());
    CHECK(p.A == doctest::Approx(100.0));
    CHECK(p.beta == doctest::Approx(0.1));
    CHECK(p.m == doctest::Approx(1.0));
    CHECK(std::isinf(p.rho));
}

TEST_CASE("closed-form parameters for the worked put") {
    auto p = convex_params(put_pair());
    CHECK(p.A == doctest::Approx(100.0));
    CHECK(p.beta == doctest::Approx(-0.9));
    CHECK(p.m == doctest::Approx(0.0));
    CHECK(std::isinf(p.rho));
}

TEST_CASE("closed-form parameters for the worked power") {
    auto p = convex_params(power_pair());
    CHECK(p.A == doctest::Approx(2.0));
    CHECK(p.beta == doctest::Approx(4.0));
    CHECK(std::isinf(p.m));
    CHECK(std::isinf(p.rho));
}

TEST_CASE("closed-form envelope values") {
    auto cp = call_pair();
    auto p = convex_params(cp);
    CHECK(g_closed_form(p, cp, 80) == doctest::Approx(8.0));
    CHECK(g_closed_form(p, cp, 120) == doctest::Approx(30.0));

    auto pp = GamePayoffPair{PayoffFn::put(100, 1, 0), PayoffFn::put(100, 1, 120), 4.0};
    auto q = convex_params(pp);
    CHECK(g_closed_form(q, pp, 50) == doctest::Approx(100.0));
    CHECK(g_closed_form(q, pp, 150) == doctest::Approx(100.0));
    CHECK_THROWS_AS(g_closed_form(q, pp, 0.0), std::domain_error);
}

TEST_CASE("right derivatives of the closed form") {
    auto cp = call_pair();
    auto p = convex_params(cp);
    CHECK(right_derivative(p, cp, 80) == doctest::Approx(0.1));

    auto pp = put_pair();
    auto q = convex_params(pp);
    CHECK(right_derivative(q, pp, 80) == doctest::Approx(-0.9));

    auto flat = GamePayoffPair{PayoffFn::put(100, 1, 0), PayoffFn::put(100, 1, 120), 4.0};
    auto r = convex_params(flat);
    CHECK(right_derivative(r, flat, 30) == doctest::Approx(0.0));
    CHECK(right_derivative(r, flat, 300) == doctest::Approx(0.0));
}

TEST_CASE("numeric and analytic parameter routes agree on a mixed pair") {
    // Same payoffs, but f2 written as a tabulated function (kink node at
    // the strike) so the generic threshold search is exercised.
    std::vector<double> xs = {1, 50, 100, 150, 300, 1000};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(std::max(x - 100.0, 0.0) + 10.0);
    GamePayoffPair mixed{PayoffFn::call(100, 1, 0), PayoffFn::tabulated(xs, ys), 4.0};
    auto p = convex_params(mixed);
    CHECK(p.A == doctest::Approx(100.0).epsilon(1e-6));
    CHECK(p.beta == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(p.m == doctest::Approx(1.0));
}

TEST_CASE("grid envelope matches the closed form on the convex corpus") {
    struct Case {
        GamePayoffPair pair;
        double s0;
    };
    std::vector<Case> corpus = {
        {call_pair(1.0, 10.0), 80}, {call_pair(2.0, 10.0), 80},
        {call_pair(2.0, 120.0), 120}, {put_pair(10.0), 80},
        {GamePayoffPair{PayoffFn::put(100, 1, 0), PayoffFn::put(100, 1, 120), 4.0}, 50},
        {power_pair(1.0, 4.0), 1.0}, {power_pair(2.0, 0.0), 1.0},
    };
    for (const auto& [pair, s0] : corpus) {
        auto params = convex_params(pair);
        GridOptions opt;
        auto [lo, hi] = choose_domain(pair, s0, opt.n_points);
        EnvelopeResult env = g_grid(pair, lo, hi, opt);
        for (int i = 0; i <= 200; ++i) {
            double x = s0 / 4.0 + (4.0 * s0 - s0 / 4.0) * i / 200.0;
            double exact = g_closed_form(params, pair, x);
            CHECK(std::abs(env.value_at(x) - exact) <= 2e-3 * (1.0 + std::abs(exact)));
        }
    }
}

TEST_CASE("grid envelope reproduces the documented example") {
    auto cp = call_pair();
    GridOptions opt;
    EnvelopeResult env = g_grid(cp, 0.1, 1000.0, opt);
    CHECK(std::abs(env.value_at(80.0) - 8.0) <= 2e-3);
    // identity pair collapses to the common payoff exactly
    GamePayoffPair ident{PayoffFn::put(100, 1, 0), PayoffFn::put(100, 1, 0), 2.0};
    EnvelopeResult envi = g_grid(ident, 0.1, 1000.0, opt);
    for (Eigen::Index i = 0; i < envi.xs.size(); ++i)
        CHECK(envi.g[i] == doctest::Approx(ident.f1(envi.xs[i])).epsilon(1e-12));
}

TEST_CASE("plain monotone iteration agrees with the direct solve") {
    auto cp = call_pair();
    GridOptions direct;
    direct.n_points = 257;
    GridOptions plain = direct;
    plain.method = GridMethod::Sweeps;
    EnvelopeResult a = g_grid(cp, 0.1, 800.0, direct);
    EnvelopeResult b = g_grid(cp, 0.1, 800.0, plain);
    CHECK(b.monotone_violation == 0.0);
    for (Eigen::Index i = 0; i < a.g.size(); ++i)
        CHECK(a.g[i] == doctest::Approx(b.g[i]).epsilon(1e-5));
}

TEST_CASE("sandwich and midpoint concavity hold on the grid") {
    for (auto pair : {call_pair(2.0, 10.0), put_pair(10.0), power_pair(1.0, 4.0)}) {
        GridOptions opt;
        opt.n_points = 1024;
        EnvelopeResult env = g_grid(pair, 0.05, 600.0, opt);
        for (Eigen::Index i = 0; i < env.xs.size(); ++i) {
            double f1 = pair.f1(env.xs[i]), f2 = pair.f2(env.xs[i]);
            CHECK(env.g[i] >= f1 - env.tol);
            CHECK(env.g[i] <= f2 + env.tol);
            if (i > 0 && i + 1 < env.xs.size() && !env.stop_mask[static_cast<std::size_t>(i)]) {
                CHECK(env.g[i] >= 0.5 * (env.g[i - 1] + env.g[i + 1]) - 1e-7);
            }
        }
    }
}

TEST_CASE("scaling consistency of the closed form") {
    for (double s : {0.5, 2.0, 7.0}) {
        GamePayoffPair base = call_pair(1.0, 10.0);
        GamePayoffPair scaled{PayoffFn::call(100 * s, 1, 0), PayoffFn::call(100 * s, 1, 10 * s),
                              4.0};
        auto p0 = convex_params(base);
        auto p1 = convex_params(scaled);
        for (double x : {20.0, 80.0, 100.0, 130.0, 400.0}) {
            CHECK(g_closed_form(p1, scaled, s * x) ==
                  doctest::Approx(s * g_closed_form(p0, base, x)).epsilon(1e-12));
        }
        GamePayoffPair pbase = put_pair(10.0);
        GamePayoffPair pscdesign{PayoffFn::put(100 * s, 1, 0), PayoffFn::put(100 * s, 1, 10 * s),
                                 4.0};
        auto q0 = convex_params(pbase);
        auto q1 = convex_params(pscdesign);
        for (double x : {20.0, 80.0, 100.0, 130.0, 400.0}) {
            CHECK(g_closed_form(q1, pscdesign, s * x) ==
                  doctest::Approx(s * g_closed_form(q0, pbase, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("stop intervals follow the contact set") {
    auto cp = call_pair();
    auto p = convex_params(cp);
    Interval k80 = stop_interval(p, cp, 80.0);
    CHECK_FALSE(k80.empty);
    CHECK(std::isinf(k80.lo));
    CHECK(k80.hi == doctest::Approx(100.0));

    // Deep put penalty: no contact anywhere, so the interval is the line.
    GamePayoffPair deep{PayoffFn::put(100, 1, 0), PayoffFn::put(100, 1, 120), 4.0};
    Interval kd = stop_interval(convex_params(deep), deep, 50.0);
    CHECK_FALSE(kd.empty);
    CHECK(std::isinf(kd.lo));
    CHECK(std::isinf(kd.hi));

    // On the contact set the interval is empty.
    Interval kc = stop_interval(p, cp, 150.0);
    CHECK(kc.empty);

    // Grid route agrees.
    GridOptions opt;
    EnvelopeResult env = g_grid(cp, 0.1, 1000.0, opt);
    Interval kg = stop_interval(env, 80.0);
    CHECK_FALSE(kg.empty);
    CHECK(std::isinf(kg.lo));
    CHECK(kg.hi == doctest::Approx(100.0).epsilon(0.01));
    CHECK(stop_interval(env, 150.0).empty);
}

TEST_CASE("grid handles a non-convex tabulated pair") {
    PayoffFn f1 = PayoffFn::tabulated({40, 70, 100, 130, 250}, {30, 50, 35, 25, 25});
    PayoffFn f2 = PayoffFn::tabulated({40, 70, 100, 130, 250}, {35, 55, 40, 30, 30});
    GamePayoffPair pair{f1, f2, 6.0};
    CHECK_FALSE(pair.both_convex());
    CHECK_THROWS_AS(convex_params(pair), std::invalid_argument);
    GridOptions opt;
    opt.n_points = 2048;
    EnvelopeResult env = g_grid(pair, 0.1, 800.0, opt);
    for (Eigen::Index i = 0; i < env.xs.size(); ++i) {
        CHECK(env.g[i] >= pair.f1(env.xs[i]) - 1e-6);
        CHECK(env.g[i] <= pair.f2(env.xs[i]) + 1e-6);
    }
    // the hump forces contact with f2 somewhere around the peak
    bool some_contact = false;
    for (std::size_t i = 0; i < env.stop_mask.size(); ++i) some_contact |= env.stop_mask[i] != 0;
    CHECK(some_contact);
}
