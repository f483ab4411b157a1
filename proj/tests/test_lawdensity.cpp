#include "fim/lawdensity.hpp"
#include "fim/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace fim;

namespace {

DiscreteMartingaleLaw two_point_law() {
    DiscreteMartingaleLaw law;
    law.s0 = 100;
    law.T = 1.0;
    law.n = 1;
    DiscreteMartingaleLaw::Conditional c;
    c.given = 100;
    c.support = {80, 120};
    c.prob = {0.5, 0.5};
    c.cdf = {0.5, 1.0};
    law.steps = {{c}};
    law.validate();
    return law;
}

DiscreteMartingaleLaw two_step_binomial() {
    // +-20% multiplicative moves with the risk-neutral weights (1/2, 1/2).
    DiscreteMartingaleLaw law;
    law.s0 = 100;
    law.T = 1.0;
    law.n = 2;
    auto cond = [](double parent) {
        DiscreteMartingaleLaw::Conditional c;
        c.given = parent;
        c.support = {0.8 * parent, 1.2 * parent};
        c.prob = {0.5, 0.5};
        c.cdf = {0.5, 1.0};
        return c;
    };
    law.steps = {{cond(100)}, {cond(80), cond(120)}};
    law.validate();
    return law;
}

} // namespace

TEST_CASE("law validation catches a broken martingale") {
    DiscreteMartingaleLaw law = two_point_law();
    law.steps[0][0].support = {80, 130};
    CHECK_THROWS_AS(law.validate(), std::invalid_argument);
}

TEST_CASE("two-point coupling inverts at the median") {
    DiscreteMartingaleLaw law = two_point_law();
    auto samples = quantile_coupling_sample(law, 20000, 11, 4);
    long up = 0;
    for (const auto& s : samples) {
        CHECK(s.m[0] == 100.0);
        bool is_up = s.m[1] == 120.0;
        bool z_pos = s.z[0] > 0.0;
        CHECK(is_up == z_pos);
        up += is_up;
    }
    double frac = static_cast<double>(up) / samples.size();
    CHECK(std::abs(frac - 0.5) < 4.0 * std::sqrt(0.25 / samples.size()));
}

TEST_CASE("degenerate law is reproduced exactly") {
    DiscreteMartingaleLaw law = two_point_law();
    law.steps[0][0].support = {100};
    law.steps[0][0].prob = {1.0};
    law.steps[0][0].cdf = {1.0};
    auto samples = quantile_coupling_sample(law, 500, 3);
    for (const auto& s : samples) CHECK(s.m[1] == 100.0);
    auto res = law_match_test(samples, law);
    CHECK(res.tv_distance == 0.0);
    CHECK(res.pass);
}

TEST_CASE("two-step binomial law match at the 99% level") {
    DiscreteMartingaleLaw law = two_step_binomial();
    auto samples = quantile_coupling_sample(law, 100000, 17, 4);
    auto res = law_match_test(samples, law);
    CHECK(res.cells == 4);
    CHECK(res.pass);
    CHECK(res.tv_distance < 0.01);

    // Chain stays inside [1/C, C].
    double C = law.bound_C();
    for (const auto& s : samples)
        for (double m : s.m) {
            CHECK(m >= 1.0 / C - 1e-12);
            CHECK(m <= C + 1e-12);
        }
}

TEST_CASE("coupled chain is a martingale within buckets") {
    DiscreteMartingaleLaw law = two_step_binomial();
    auto samples = quantile_coupling_sample(law, 50000, 29, 4);
    for (double bucket : {80.0, 120.0}) {
        double sum = 0.0, sum2 = 0.0;
        long count = 0;
        for (const auto& s : samples) {
            if (s.m[1] != bucket) continue;
            double d = s.m[2] - s.m[1];
            sum += d;
            sum2 += d * d;
            ++count;
        }
        double mean = sum / count;
        double se = std::sqrt((sum2 / count - mean * mean) / count);
        CHECK(std::abs(mean) <= 4.0 * se);
    }
}

TEST_CASE("a corrupted sampler fails the law match") {
    DiscreteMartingaleLaw law = two_point_law();
    auto samples = quantile_coupling_sample(law, 50000, 5, 4);
    // Flip half of the up-moves down: stays on the support, wrecks the pmf.
    bool flip = false;
    for (auto& s : samples) {
        if (s.m[1] == 120.0) {
            if (flip) s.m[1] = 80.0;
            flip = !flip;
        }
    }
    auto res = law_match_test(samples, law);
    CHECK_FALSE(res.pass);
    CHECK(res.tv_distance == doctest::Approx(0.25).epsilon(0.1));

    // Off-support values are a hard failure.
    samples[0].m[1] = 97.0;
    CHECK_THROWS_AS(law_match_test(samples, law), std::runtime_error);
}

TEST_CASE("interpolation matches the two-point closed form") {
    DiscreteMartingaleLaw law = two_point_law();
    CouplingSample s;
    s.z = {0.3};
    s.m = {100, 120};
    double sd = std::sqrt(0.5);
    for (double w : {-1.0, -0.25, 0.0, 0.4, 1.7}) {
        double expect = 80.0 + 40.0 * stats::normal_cdf(w / sd);
        CHECK(brownian_interpolation(law, s, 0.5, w) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(brownian_interpolation(law, s, 0.5, 0.0) == doctest::Approx(100.0));
}

TEST_CASE("interpolation equals the chain at grid times") {
    DiscreteMartingaleLaw law = two_step_binomial();
    auto samples = quantile_coupling_sample(law, 200, 7);
    for (const auto& s : samples) {
        CHECK(std::abs(brownian_interpolation(law, s, 0.0, 0.0) - s.m[0]) < 1e-8);
        CHECK(std::abs(brownian_interpolation(law, s, 0.5, 0.0) - s.m[1]) < 1e-8);
        CHECK(std::abs(brownian_interpolation(law, s, 1.0, 0.0) - s.m[2]) < 1e-8);
    }
}

TEST_CASE("interpolation is monotone in the increment") {
    DiscreteMartingaleLaw law = two_step_binomial();
    CouplingSample s;
    s.z = {0.1, -0.2};
    s.m = {100, 120, 96};
    for (double t : {0.2, 0.5, 0.8}) {
        double prev = -kInf;
        for (int i = 0; i <= 40; ++i) {
            double w = -2.0 + 4.0 * i / 40.0;
            double v = brownian_interpolation(law, s, t, w);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("gauss-hermite route is spot-checked against the exact one") {
    DiscreteMartingaleLaw law = two_point_law();
    CouplingSample s;
    s.z = {0.0};
    s.m = {100, 80};
    double worst = 0.0;
    for (double w : {-0.8, -0.2, 0.0, 0.3, 0.9}) {
        double exact = brownian_interpolation(law, s, 0.25, w, 0);
        double gh = brownian_interpolation(law, s, 0.25, w, 64);
        worst = std::max(worst, std::abs(gh - exact));
    }
    // The integrand is a step function: quadrature is only good to a few
    // percent of the jump, which is exactly why the exact route exists.
    CHECK(worst < 4.0);
    CHECK(worst > 1e-10);
}

TEST_CASE("weak distance diagnostics behave") {
    auto rows = weak_distance_diag(100.0, 0.4, 1.0, {4, 8, 16}, 2000, 23, 4);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.proxy >= 0.0);
        CHECK(r.mc_stderr > 0.0);
    }
    // degenerate law: proxy identically zero
    auto flat = weak_distance_diag(100.0, 0.0, 1.0, {4, 8}, 500, 23);
    for (const auto& r : flat) CHECK(r.proxy == 0.0);

    // doubling the sample count roughly halves the stderr
    auto small = weak_distance_diag(100.0, 0.4, 1.0, {8}, 2000, 31);
    auto big = weak_distance_diag(100.0, 0.4, 1.0, {8}, 8000, 31);
    CHECK(big[0].mc_stderr < small[0].mc_stderr);
}
