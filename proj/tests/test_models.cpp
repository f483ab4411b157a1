#include "fim/fbm.hpp"
#include "fim/models.hpp"
#include "fim/steering.hpp"

#include <doctest.h>

#include <cmath>

using namespace fim;

namespace {

ModelSpec default_heston(double s0 = 80.0, double r = 0.0) {
    return ModelSpec::heston(s0, r, 1.0, 2.0, 0.09, 0.3, -0.5, 0.09);
}

} // namespace

TEST_CASE("feller check") {
    CHECK(feller_check(ModelSpec::heston(80, 0, 1, 2.0, 0.09, 0.3, -0.5, 0.09)));
    ModelSpec bad = default_heston();
    bad.kappa = 1.0;
    bad.theta = 0.01;
    CHECK_FALSE(feller_check(bad));
    CHECK_THROWS_AS(simulate(bad, 8, 4, 1), std::invalid_argument);
    ModelSpec degenerate = default_heston();
    degenerate.xi = 0.0;
    CHECK(feller_check(degenerate));
}

TEST_CASE("martingale property at r = 0 for all variants") {
    std::vector<ModelSpec> specs = {
        default_heston(),
        ModelSpec::hull_white(80, 0, 1, 0.2, 0.5, -0.3, 0.09),
        ModelSpec::scott(80, 0, 1, 0.3, 1.0, 0.4, -0.3, 0.0),
        ModelSpec::rough_fou(80, 0, 1, 0.1, 1.0, 1.0, -0.3, 0.3),
    };
    for (const auto& spec : specs) {
        PathBatch b = simulate(spec, 64, 4000, 77, 4);
        double mean = b.S.col(b.S.cols() - 1).mean();
        double sd = std::sqrt((b.S.col(b.S.cols() - 1).array() - mean).square().mean() /
                              (b.S.rows() - 1.0));
        CHECK(std::abs(mean - 80.0) < 4.0 * sd + 1e-9);
        CHECK((b.S.array() > 0.0).all());
        CHECK((b.nu.array() >= 0.0).all());
        CHECK(b.bank[0] == 1.0);
        for (Eigen::Index k = 1; k < b.bank.size(); ++k) CHECK(b.bank[k] >= b.bank[k - 1]);
        // driver increments: mean ~ 0, variance ~ dt at sample scale
        double dt = b.times[1] - b.times[0];
        ArrayXd inc = b.W.col(1).array() - b.W.col(0).array();
        CHECK(std::abs(inc.mean()) < 4.0 * std::sqrt(dt / b.S.rows()));
        CHECK(inc.square().mean() == doctest::Approx(dt).epsilon(0.1));
    }
}

TEST_CASE("deterministic volatility limit of heston") {
    ModelSpec spec = default_heston();
    spec.xi = 0.0; // theta == v0 keeps the variance pinned
    PathBatch b = simulate(spec, 16, 8, 3);
    CHECK((b.nu.array() == 0.3).all());
}

TEST_CASE("discounted mean is s0 under a positive rate") {
    ModelSpec spec = default_heston(80.0, 0.05);
    PathBatch b = simulate(spec, 64, 4000, 11, 4);
    double bT = b.bank[b.bank.size() - 1];
    CHECK(bT == doctest::Approx(std::exp(0.05)));
    double mean = b.S.col(b.S.cols() - 1).mean() / bT;
    double sd = std::sqrt((b.S.col(b.S.cols() - 1).array() / bT - mean).square().mean() /
                          (b.S.rows() - 1.0));
    CHECK(std::abs(mean - 80.0) < 4.0 * sd);
}

TEST_CASE("simulation is reproducible across thread counts") {
    ModelSpec spec = default_heston();
    PathBatch a = simulate(spec, 32, 64, 99, 1);
    PathBatch b = simulate(spec, 32, 64, 99, 8);
    CHECK((a.S.array() == b.S.array()).all());
    CHECK((a.nu.array() == b.nu.array()).all());
    CHECK((a.W.array() == b.W.array()).all());
    PathBatch c = simulate(spec, 32, 64, 100, 1);
    CHECK_FALSE((a.S.array() == c.S.array()).all());
}

TEST_CASE("fbm reduces to brownian motion at H = 1/2") {
    ArrayXd times = ArrayXd::LinSpaced(33, 0.0, 1.0);
    RowMat b = fbm_sample(0.5, times, 4000, 5);
    // Cov(B_s, B_t) = min(s,t) within 3 standard errors at a few probes.
    auto cov = [&](int i, int j) {
        ArrayXd x = b.col(i).array(), y = b.col(j).array();
        return (x * y).mean() - x.mean() * y.mean();
    };
    CHECK(cov(8, 8) == doctest::Approx(times[8]).epsilon(0.12));
    CHECK(cov(8, 24) == doctest::Approx(times[8]).epsilon(0.12));
    CHECK(cov(32, 32) == doctest::Approx(1.0).epsilon(0.12));
}

TEST_CASE("fbm variance normalization and negative roughness correlation") {
    ArrayXd times = ArrayXd::LinSpaced(17, 0.0, 1.0);
    for (double H : {0.1, 0.3, 0.7}) {
        RowMat b = fbm_sample(H, times, 6000, 9);
        ArrayXd bT = b.col(16).array();
        double var = bT.square().mean() - bT.mean() * bT.mean();
        CHECK(var == doctest::Approx(1.0).epsilon(0.1));
    }
    // lag-1 increment correlation at H = 0.1 must be negative and match
    // the exact increment covariance.
    double H = 0.1;
    RowMat b = fbm_sample(H, times, 6000, 13);
    double dt = times[1] - times[0];
    ArrayXd i1 = b.col(1).array() - b.col(0).array();
    ArrayXd i2 = b.col(2).array() - b.col(1).array();
    double c = (i1 * i2).mean() - i1.mean() * i2.mean();
    double exact = 0.5 * std::pow(dt, 2 * H) * (std::pow(2.0, 2 * H) - 2.0);
    CHECK(c < 0.0);
    CHECK(c == doctest::Approx(exact).epsilon(0.15));
}

TEST_CASE("cholesky and circulant fbm sampling agree in law") {
    ArrayXd times = ArrayXd::LinSpaced(25, 0.0, 1.0);
    for (double H : {0.2, 0.8}) {
        RowMat a = fbm_sample(H, times, 6000, 21, FbmMethod::Cholesky);
        RowMat c = fbm_sample(H, times, 6000, 22, FbmMethod::Circulant);
        for (int col : {6, 12, 24}) {
            ArrayXd xa = a.col(col).array(), xc = c.col(col).array();
            double va = xa.square().mean() - xa.mean() * xa.mean();
            double vc = xc.square().mean() - xc.mean() * xc.mean();
            double exact = fbm_covariance(H, times[col], times[col]);
            CHECK(va == doctest::Approx(exact).epsilon(0.12));
            CHECK(vc == doctest::Approx(exact).epsilon(0.12));
        }
    }
    CHECK_THROWS_AS(fbm_sample(0.5, ArrayXd::LinSpaced(4, 0.5, 1.0), 4, 1), std::invalid_argument);
}

TEST_CASE("rough fou at H = 1/2 is an ou process") {
    // U_t = e^{-lambda t} int e^{lambda u} dB_u has Var(U_T) = (1-e^{-2lT})/(2l).
    ModelSpec spec = ModelSpec::rough_fou(80, 0, 1, 0.5, 1.0, 1.0, 0.0, 0.2);
    PathBatch b = simulate(spec, 128, 6000, 31, 4);
    // Recover U from nu = nu0 exp(kappa U): U = log(nu/nu0).
    ArrayXd uT = (b.nu.col(b.nu.cols() - 1).array() / 0.2).log();
    double var = uT.square().mean() - uT.mean() * uT.mean();
    double exact = (1.0 - std::exp(-2.0)) / 2.0;
    CHECK(var == doctest::Approx(exact).epsilon(0.12));
}

TEST_CASE("integration-by-parts fou tracks the euler recursion as steps halve") {
    // Same Brownian path, two discretizations of the same integral; the
    // difference is a smooth O(dt) correction.
    const double lambda = 1.0;
    double prev_err = -1.0;
    for (int steps : {64, 128, 256, 512}) {
        ArrayXd times = ArrayXd::LinSpaced(steps + 1, 0.0, 1.0);
        RowMat b = fbm_sample(0.5, times, 1, 123);
        double dt = 1.0 / steps;
        double integral = 0.0, u_rec = 0.0, err = 0.0;
        for (int k = 0; k < steps; ++k) {
            integral += 0.5 * dt * (b(0, k) * std::exp(lambda * times[k]) +
                                    b(0, k + 1) * std::exp(lambda * times[k + 1]));
            double u_ibp = b(0, k + 1) - lambda * std::exp(-lambda * times[k + 1]) * integral;
            u_rec = std::exp(-lambda * dt) * (u_rec + (b(0, k + 1) - b(0, k)));
            err = std::max(err, std::abs(u_ibp - u_rec));
        }
        if (prev_err > 0.0) {
            double ratio = err / prev_err;
            CHECK(ratio > 0.3);
            CHECK(ratio < 0.75);
        }
        prev_err = err;
    }
}

TEST_CASE("steering leaves a constant-volatility model alone") {
    ModelSpec spec = default_heston();
    spec.xi = 1e-6;
    SteerReport rep = steer_volatility(spec, SteerTarget::constant(0.3), 8, 0.05, 500, 128, 17);
    CHECK(rep.prob_exceed == 0.0);
    CHECK(rep.below_threshold); // 1/b blows past the block threshold
}

TEST_CASE("steering probability decreases with block count") {
    ModelSpec spec = default_heston();
    std::vector<double> probs;
    for (int nb : {8, 16, 32, 64}) {
        SteerReport r = steer_volatility(spec, SteerTarget::constant(0.3), nb, 0.05, 1500, 512, 7);
        probs.push_back(r.prob_exceed);
    }
    for (std::size_t i = 1; i < probs.size(); ++i) CHECK(probs[i] <= probs[i - 1] + 0.04);
    CHECK(probs.back() < probs.front());
}

TEST_CASE("steering meets the definition inequality at an achievable eps") {
    ModelSpec spec = default_heston();
    double eps = 0.25;
    SteerReport r = steer_volatility(spec, SteerTarget::constant(0.3), 64, eps, 2000, 1024, 19);
    CHECK(r.prob_exceed < eps);
    CHECK_FALSE(r.below_threshold);
}

TEST_CASE("steering validates its target") {
    ModelSpec spec = default_heston();
    CHECK_THROWS_AS(steer_volatility(spec, SteerTarget::constant(0.5), 8, 0.05, 10, 64, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(SteerTarget::exp_affine(0.3, 1.0, 0.0, kInf), std::invalid_argument);
    // exp-affine target within caps works end to end
    SteerTarget t = SteerTarget::exp_affine(0.3, 0.2, -0.1, 0.8);
    SteerReport r = steer_volatility(spec, t, 16, 0.4, 200, 256, 23);
    CHECK(r.prob_exceed >= 0.0);
    CHECK(r.prob_exceed <= 1.0);
}
