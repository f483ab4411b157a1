#include "fim/steering.hpp"
#include "fim/rng.hpp"

#include <algorithm>
#include <cmath>

namespace fim {

SteerTarget SteerTarget::exp_affine(double nu0, double a, double b, double cap) {
    if (!(nu0 > 0.0)) throw std::invalid_argument("steer target: nu0 must be positive");
    if (!(cap > 0.0) || !std::isfinite(cap))
        throw std::invalid_argument("steer target: exponent cap must be positive and finite");
    return SteerTarget{Kind::ExpAffine, nu0, a, b, cap};
}

double SteerTarget::value(double t, double w) const {
    if (kind == Kind::Const) return nu0;
    return nu0 * std::exp(std::clamp(a * w + b * t, -cap, cap));
}

double SteerTarget::bound() const {
    double hi = kind == Kind::Const ? nu0 : nu0 * std::exp(cap);
    double lo = kind == Kind::Const ? nu0 : nu0 * std::exp(-cap);
    return std::max(hi, 1.0 / lo);
}

namespace {

// Heston reduction of the volatility SDE: nu = sqrt(U) solves
// dnu = a(t,nu) dt + b dW_hat + c dW.
struct HestonNuCoeffs {
    double kappa, theta, xi, rho;
    double a(double x) const {
        return 0.5 * kappa * (theta / x - x) - xi * xi / (8.0 * x);
    }
    double b() const { return 0.5 * xi * std::sqrt(1.0 - rho * rho); }
    double c() const { return 0.5 * xi * rho; }
};

} // namespace

SteerReport steer_volatility(const ModelSpec& spec, const SteerTarget& target, int n_blocks,
                             double eps, int n_paths, int n_steps, std::uint64_t seed,
                             int threads) {
    if (spec.kind != ModelKind::Heston)
        throw std::invalid_argument("steer: the block construction is implemented for Heston");
    spec.validate();
    if (n_blocks < 1 || n_paths < 1) throw std::invalid_argument("steer: need positive counts");
    if (!(eps > 0.0)) throw std::invalid_argument("steer: eps must be positive");
    double nu0 = spec.nu_start();
    if (std::abs(target.value(0.0, 0.0) - nu0) > 1e-12 * (1.0 + nu0))
        throw std::invalid_argument("steer: target(0) must equal the model's nu0");

    HestonNuCoeffs cf{spec.kappa, spec.theta, spec.xi, spec.rho};
    const double T = spec.T;
    // Steps per block; the drift is refreshed only at block boundaries.
    int spb = std::max(1, (n_steps + n_blocks - 1) / n_blocks);
    int steps = spb * n_blocks;
    const double dt = T / steps;
    const double sdt = std::sqrt(dt);
    const double clamp_lim = static_cast<double>(n_blocks) * static_cast<double>(n_blocks);

    // Coefficient bound along trajectories that have not yet exceeded eps:
    // nu stays in [1/(2C), C + 1/(2C)] per the stopped-time argument.
    double C = target.bound();
    double lo = 1.0 / (2.0 * C), hi = C + 1.0 / (2.0 * C);
    double ctil = 0.0;
    for (int i = 0; i <= 256; ++i) {
        double x = lo + (hi - lo) * i / 256.0;
        double v = std::abs(cf.a(x)) + std::abs(cf.b()) + std::abs(cf.c());
        if (cf.b() > 0.0) v += 1.0 / cf.b();
        ctil = std::max(ctil, v);
    }
    double threshold = 2.0 * ctil / T;

    std::vector<std::uint8_t> exceeded(static_cast<std::size_t>(n_paths), 0);
    parallel_for(n_paths, threads, [&](std::int64_t plo, std::int64_t phi) {
        for (std::int64_t p = plo; p < phi; ++p) {
            Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(p));
            double nu = nu0, w = 0.0;
            double gamma = 0.0;      // block drift, zero on the first block
            double iacc = 0.0, lacc = 0.0; // I_k and L_k accumulators
            double alpha_prev = nu0; // target at the last block boundary
            bool out = false;
            for (int k = 0; k < steps && !out; ++k) {
                double t = k * dt;
                double zw = rng.next_normal();
                double zt = rng.next_normal(); // d(W tilde)
                double nu_s = std::max(nu, 1e-12);
                double a = cf.a(nu_s), b = cf.b(), c = cf.c();
                iacc += a * dt + c * sdt * zw;
                lacc += b * sdt * zt;
                nu += a * dt + b * (sdt * zt + gamma * dt) + c * sdt * zw;
                w += sdt * zw;
                double tn = t + dt;
                double alpha = target.value(tn, w);
                if (std::abs(alpha - nu) > eps) {
                    out = true;
                    break;
                }
                if ((k + 1) % spb == 0) {
                    // End of block m: refresh the drift for block m+1.
                    double jk = alpha - alpha_prev;
                    double num = static_cast<double>(n_blocks) * (jk - iacc - lacc);
                    gamma = b > 0.0 ? std::clamp(num / (b * T), -clamp_lim, clamp_lim) : 0.0;
                    alpha_prev = alpha;
                    iacc = 0.0;
                    lacc = 0.0;
                }
            }
            exceeded[static_cast<std::size_t>(p)] = out ? 1 : 0;
        }
    });

    long count = 0;
    for (std::uint8_t e : exceeded) count += e;
    SteerReport rep;
    rep.n_blocks = n_blocks;
    rep.block_threshold = threshold;
    rep.below_threshold = n_blocks < threshold;
    rep.prob_exceed = static_cast<double>(count) / n_paths;
    rep.mc_stderr = std::sqrt(rep.prob_exceed * (1.0 - rep.prob_exceed) /
                              static_cast<double>(n_paths));
    return rep;
}

} // namespace fim
