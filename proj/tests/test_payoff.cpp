#include "fim/payoff.hpp"

#include <doctest.h>

#include <cmath>

using namespace fim;

TEST_CASE("payoff evaluation matches the contract formulas") {
    CHECK(PayoffFn::call(100, 1, 0)(120) == doctest::Approx(20.0));
    CHECK(PayoffFn::put(100, 1, 10)(80) == doctest::Approx(30.0));
    CHECK(PayoffFn::power(2, 1, 4)(3) == doctest::Approx(13.0));
    CHECK_THROWS_AS(PayoffFn::call(100, 1, 0)(0.0), std::domain_error);
    CHECK_THROWS_AS(PayoffFn::call(100, 1, 0)(-3.0), std::domain_error);
}

TEST_CASE("tabulated payoff interpolates and extrapolates linearly") {
    PayoffFn f = PayoffFn::tabulated({1.0, 2.0, 4.0}, {3.0, 5.0, 5.0});
    CHECK(f(1.5) == doctest::Approx(4.0));
    CHECK(f(3.0) == doctest::Approx(5.0));
    CHECK(f(0.5) == doctest::Approx(2.0));  // left slope 2
    CHECK(f(10.0) == doctest::Approx(5.0)); // right slope 0
    CHECK_THROWS_AS(PayoffFn::tabulated({1.0, 2.0}, {0.0, 5.0}), std::invalid_argument);
    CHECK_THROWS_AS(PayoffFn::tabulated({2.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PayoffFn::tabulated({1.0, 2.0}, {5.0, 3.0}), std::invalid_argument);
}

TEST_CASE("payoff continuity on a fine grid") {
    std::vector<PayoffFn> fns = {PayoffFn::call(100, 2, 5), PayoffFn::put(100, 1, 3),
                                 PayoffFn::power(1.5, 1, 2),
                                 PayoffFn::tabulated({50, 80, 120}, {60, 40, 40})};
    for (const auto& f : fns) {
        for (int i = 0; i <= 2000; ++i) {
            double x = 0.5 + i * 0.1;
            CHECK(std::abs(f(x + 1e-7) - f(x)) < 1e-4);
            CHECK(f(x) >= -1e-12);
        }
    }
}

TEST_CASE("validate_pair accepts the worked families at L = 4") {
    std::vector<GamePayoffPair> pairs;
    pairs.emplace_back(PayoffFn::call(100, 1, 0), PayoffFn::call(100, 2, 10), 4.0);
    pairs.emplace_back(PayoffFn::put(100, 1, 0), PayoffFn::put(100, 1, 10), 4.0);
    pairs.emplace_back(PayoffFn::power(2, 1, 0), PayoffFn::power(2, 1, 4), 4.0);
    for (const auto& p : pairs) {
        auto probe = default_probe(p, 100.0, 256);
        CHECK(validate_pair(p, probe).pass);
    }
}

TEST_CASE("validate_pair flags an inverted pair") {
    // f1 = 2(x-K)+ exceeds f2 = (x-K)+ beyond the strike; the structural
    // precheck already rejects at construction for same-family pairs.
    CHECK_THROWS_AS(GamePayoffPair(PayoffFn::call(100, 2, 0), PayoffFn::call(100, 1, 0), 4.0),
                    std::invalid_argument);
    // A mixed pair with the same defect is caught by validate_pair.
    GamePayoffPair mixed{PayoffFn::call(100, 2, 0),
                         PayoffFn::tabulated({50, 100, 200}, {0, 0, 100}), 4.0};
    auto rep = validate_pair(mixed, default_probe(mixed, 100.0, 128));
    CHECK_FALSE(rep.pass);
    CHECK(rep.failure == ValidationReport::Failure::Order);
    CHECK(rep.x > 100.0);
}

TEST_CASE("identity pair passes validation") {
    GamePayoffPair p{PayoffFn::put(100, 1, 0), PayoffFn::put(100, 1, 0), 2.0};
    std::vector<double> probe;
    for (int i = 1; i <= 300; ++i) probe.push_back(i);
    CHECK(validate_pair(p, probe).pass);
}

TEST_CASE("growth exponents cover the declared envelope") {
    GamePayoffPair call{PayoffFn::call(100, 1, 0), PayoffFn::call(100, 2, 10), 4.0};
    auto gb = growth_exponent(call);
    CHECK(gb.N == doctest::Approx(1.01));
    CHECK(std::isfinite(gb.Ltilde));

    GamePayoffPair pow{PayoffFn::power(2, 1, 0), PayoffFn::power(2, 1, 4), 4.0};
    CHECK(growth_exponent(pow).N == doctest::Approx(2.0));

    GamePayoffPair constant{PayoffFn::tabulated({1, 2}, {5, 5}), PayoffFn::tabulated({1, 2}, {5, 5}),
                            2.0};
    auto gc = growth_exponent(constant);
    CHECK(gc.Ltilde == doctest::Approx(5.0));
    CHECK(gc.N == doctest::Approx(1.01));

    // The bound itself must hold on a wide log-spaced grid.
    for (const auto& pr : {call, pow, constant}) {
        auto b = growth_exponent(pr);
        for (int i = 0; i <= 300; ++i) {
            double x = std::pow(10.0, -3.0 + 9.0 * i / 300.0);
            CHECK(pr.f1(x) <= b.Ltilde * (1.0 + std::pow(x, b.N)) * (1 + 1e-12));
            CHECK(pr.f2(x) <= b.Ltilde * (1.0 + std::pow(x, b.N)) * (1 + 1e-12));
        }
    }
}

TEST_CASE("growth condition check catches a super-linear violation") {
    // For f = x^3 the modulus ratio tends to 3/2, so L = 1.01 must fail.
    GamePayoffPair p{PayoffFn::power(3, 1, 0), PayoffFn::power(3, 1, 1), 1.01};
    auto rep = validate_pair(p, default_probe(p, 1.0, 64));
    CHECK_FALSE(rep.pass);
    CHECK(rep.failure == ValidationReport::Failure::Growth);
}
