#pragma once

#include "fim/common.hpp"

#include <cstdint>
#include <vector>

namespace fim {

// Finite-support martingale law: per step, conditional distributions keyed
// by the parent value. Every conditional mean equals its parent value and
// all support points stay inside [1/C, C].
struct DiscreteMartingaleLaw {
    struct Conditional {
        double given = 0.0;
        std::vector<double> support;
        std::vector<double> prob;
        std::vector<double> cdf; // running sums, cdf.back() == 1
    };

    double s0 = 100.0;
    double T = 1.0;
    int n = 1;
    std::vector<std::vector<Conditional>> steps; // steps[k]: law of M_{k+1}

    void validate() const;
    double bound_C() const;
    const Conditional& conditional(int step, double parent) const;

    // n-step CRR binomial discretization of driftless geometric Brownian
    // motion; sigma = 0 degenerates to the constant chain.
    static DiscreteMartingaleLaw binomial_gbm(double s0, double sigma, double T, int n);
};

struct CouplingSample {
    std::vector<double> z; // Gaussian increments, variance T/n each
    std::vector<double> m; // chain M_0..M_n
};

// Inverts each conditional CDF at the Gaussian quantile of the increment,
// which reproduces the target law exactly for step conditionals.
std::vector<CouplingSample> quantile_coupling_sample(const DiscreteMartingaleLaw& law,
                                                     int n_samples, std::uint64_t seed,
                                                     int threads = 1);

struct LawMatchResult {
    double tv_distance = 0.0;
    double chi2_stat = 0.0;
    double chi2_crit = 0.0;
    int cells = 0;
    bool pass = false;
};

// Empirical joint pmf of the sampled chains against the exact one; throws
// if a sample leaves the law's support (that is an inversion bug, not a
// statistical event).
LawMatchResult law_match_test(const std::vector<CouplingSample>& samples,
                              const DiscreteMartingaleLaw& law);

// Martingale interpolation between chain times: the conditional expectation
// of the next chain value given the partial Brownian increment w at time t.
// quadrature_order = 0 evaluates the Gaussian integral exactly via normal
// CDF differences (the integrand is a step function); a positive order uses
// Gauss-Hermite instead.
double brownian_interpolation(const DiscreteMartingaleLaw& law, const CouplingSample& sample,
                              double t, double w, int quadrature_order = 0);

struct WeakDistanceRow {
    int n = 0;
    double proxy = 0.0;
    double mc_stderr = 0.0;
};

// Distance proxy between interpolated coupled paths and the target
// geometric Brownian motion: max over a fixed family of bounded test
// functionals (capped marginals at T/2 and T, capped running max) of the
// mean discrepancy on a fixed 64-step grid.
std::vector<WeakDistanceRow> weak_distance_diag(double s0, double sigma, double T,
                                                const std::vector<int>& n_list, int n_samples,
                                                std::uint64_t seed, int threads = 1);

} // namespace fim
