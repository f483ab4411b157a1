#pragma once

#include "fim/common.hpp"

#include <cstdint>
#include <string>

namespace fim {

enum class ModelKind { Heston, HullWhite, Scott, RoughFOU };

// Deterministic piecewise-constant short rate; r(t) = rates[k] on
// (t_end[k-1], t_end[k]]. A single segment is a constant rate.
struct RateSchedule {
    std::vector<double> t_end{kInf};
    std::vector<double> rates{0.0};

    static RateSchedule constant(double r) { return RateSchedule{{kInf}, {r}}; }
    double at(double t) const;
    bool is_zero() const;
    void validate() const;
};

struct ModelSpec {
    ModelKind kind = ModelKind::Heston;
    double s0 = 100.0;
    RateSchedule rate;
    double T = 1.0;

    // Heston: dU = kappa (theta - U) dt + xi sqrt(U) dW^U, nu = sqrt(U)
    double kappa = 2.0;
    double theta = 0.09;
    double xi = 0.3;
    double rho = -0.5;
    double v0 = 0.09;

    // Hull-White: dU = U (kappa dt + theta dW^U), nu = sqrt(U)
    double u0 = 0.09;

    // Scott: dU = -kappa U dt + theta dW^U, nu = lambda e^U
    double lambda = 0.3;

    // Rough fOU: nu = nu0 exp(kappa_exp * U), U_t = e^{-lt} int e^{lu} dB^H_u
    double hurst = 0.1;
    double kappa_exp = 1.0;
    double nu0 = 0.3;

    void validate() const;
    double nu_start() const;

    static ModelSpec heston(double s0, double r, double T, double kappa, double theta, double xi,
                            double rho, double v0);
    static ModelSpec hull_white(double s0, double r, double T, double kappa, double theta,
                                double rho, double u0);
    static ModelSpec scott(double s0, double r, double T, double lambda, double kappa,
                           double theta, double rho, double u0);
    static ModelSpec rough_fou(double s0, double r, double T, double hurst, double lambda,
                               double kappa_exp, double rho, double nu0);
};

// 2 kappa theta > xi^2, keeping the Heston variance strictly positive.
bool feller_check(const ModelSpec& spec);

struct PathBatch {
    ArrayXd times; // 0 = t0 < ... < tM = T
    ArrayXd bank;  // deterministic, shared across paths, bank[0] = 1
    RowMat S;      // n_paths x (M+1)
    RowMat nu;
    RowMat W;      // driving Brownian motion of the stock
    std::uint64_t seed = 0;
    std::string scheme;
};

PathBatch simulate(const ModelSpec& spec, int n_steps, int n_paths, std::uint64_t seed,
                   int threads = 1);

} // namespace fim
