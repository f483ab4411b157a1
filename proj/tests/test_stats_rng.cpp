#include "fim/rng.hpp"
#include "fim/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace fim;

TEST_CASE("normal cdf and quantile invert each other") {
    for (double p : {1e-9, 1e-4, 0.02, 0.31, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
        double x = stats::normal_quantile(p);
        CHECK(stats::normal_cdf(x) == doctest::Approx(p).epsilon(1e-11));
    }
    CHECK(stats::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("chi-square cdf matches reference points") {
    // Known values: P(chi2_2 <= 5.991) = 0.95, P(chi2_1 <= 6.635) = 0.99.
    CHECK(stats::chi2_cdf(2, 5.991) == doctest::Approx(0.95).epsilon(1e-3));
    CHECK(stats::chi2_cdf(1, 6.635) == doctest::Approx(0.99).epsilon(1e-3));
    CHECK(stats::chi2_quantile(3, 0.99) == doctest::Approx(11.345).epsilon(1e-3));
}

TEST_CASE("gauss-hermite integrates gaussian moments") {
    stats::GaussHermite gh = stats::gauss_hermite(32);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0;
    for (Eigen::Index i = 0; i < gh.nodes.size(); ++i) {
        double x = gh.nodes[i], w = gh.weights[i];
        m0 += w;
        m2 += w * x * x;
        m4 += w * x * x * x * x;
    }
    double sp = std::sqrt(M_PI);
    CHECK(m0 == doctest::Approx(sp).epsilon(1e-12));
    CHECK(m2 == doctest::Approx(0.5 * sp).epsilon(1e-12));
    CHECK(m4 == doctest::Approx(0.75 * sp).epsilon(1e-12));
}

TEST_CASE("rng substreams are reproducible and independent of order") {
    Rng a = Rng::for_stream(42, 7);
    Rng b = Rng::for_stream(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng c = Rng::for_stream(42, 8);
    Rng d = Rng::for_stream(42, 7);
    bool all_equal = true;
    for (int i = 0; i < 32; ++i) all_equal = all_equal && (c.next_u64() == d.next_u64());
    CHECK_FALSE(all_equal);
}

TEST_CASE("rng normals have the right first moments") {
    Rng r = Rng::for_stream(2024, 0);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = r.next_normal();
        s += z;
        s2 += z * z;
    }
    double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}
