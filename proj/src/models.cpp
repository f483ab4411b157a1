#include "fim/models.hpp"
#include "fim/fbm.hpp"
#include "fim/rng.hpp"

#include <cmath>

namespace fim {

double RateSchedule::at(double t) const {
    for (std::size_t i = 0; i < t_end.size(); ++i)
        if (t <= t_end[i]) return rates[i];
    return rates.back();
}

bool RateSchedule::is_zero() const {
    for (double r : rates)
        if (r != 0.0) return false;
    return true;
}

void RateSchedule::validate() const {
    if (t_end.empty() || t_end.size() != rates.size())
        throw std::invalid_argument("rate: schedule arrays misaligned");
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] < 0.0) throw std::invalid_argument("rate: negative rate");
        if (i > 0 && t_end[i] <= t_end[i - 1])
            throw std::invalid_argument("rate: breakpoints must increase");
    }
}

ModelSpec ModelSpec::heston(double s0, double r, double T, double kappa, double theta, double xi,
                            double rho, double v0) {
    ModelSpec m;
    m.kind = ModelKind::Heston;
    m.s0 = s0;
    m.rate = RateSchedule::constant(r);
    m.T = T;
    m.kappa = kappa;
    m.theta = theta;
    m.xi = xi;
    m.rho = rho;
    m.v0 = v0;
    return m;
}

ModelSpec ModelSpec::hull_white(double s0, double r, double T, double kappa, double theta,
                                double rho, double u0) {
    ModelSpec m;
    m.kind = ModelKind::HullWhite;
    m.s0 = s0;
    m.rate = RateSchedule::constant(r);
    m.T = T;
    m.kappa = kappa;
    m.theta = theta;
    m.rho = rho;
    m.u0 = u0;
    return m;
}

ModelSpec ModelSpec::scott(double s0, double r, double T, double lambda, double kappa,
                           double theta, double rho, double u0) {
    ModelSpec m;
    m.kind = ModelKind::Scott;
    m.s0 = s0;
    m.rate = RateSchedule::constant(r);
    m.T = T;
    m.lambda = lambda;
    m.kappa = kappa;
    m.theta = theta;
    m.rho = rho;
    m.u0 = u0;
    return m;
}

ModelSpec ModelSpec::rough_fou(double s0, double r, double T, double hurst, double lambda,
                               double kappa_exp, double rho, double nu0) {
    ModelSpec m;
    m.kind = ModelKind::RoughFOU;
    m.s0 = s0;
    m.rate = RateSchedule::constant(r);
    m.T = T;
    m.hurst = hurst;
    m.lambda = lambda;
    m.kappa_exp = kappa_exp;
    m.rho = rho;
    m.nu0 = nu0;
    return m;
}

bool feller_check(const ModelSpec& spec) { return 2.0 * spec.kappa * spec.theta > spec.xi * spec.xi; }

void ModelSpec::validate() const {
    if (!(s0 > 0.0)) throw std::invalid_argument("model: s0 must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("model: horizon must be positive");
    rate.validate();
    if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("model: correlation outside (-1,1)");
    switch (kind) {
        case ModelKind::Heston:
            if (!(kappa > 0.0 && theta > 0.0 && xi >= 0.0 && v0 > 0.0))
                throw std::invalid_argument("heston: kappa, theta, v0 must be positive, xi >= 0");
            if (!feller_check(*this))
                throw std::invalid_argument("heston: 2 kappa theta > xi^2 violated");
            break;
        case ModelKind::HullWhite:
            if (!(u0 > 0.0)) throw std::invalid_argument("hull-white: u0 must be positive");
            break;
        case ModelKind::Scott:
            if (!(lambda > 0.0 && kappa > 0.0 && theta > 0.0))
                throw std::invalid_argument("scott: lambda, kappa, theta must be positive");
            break;
        case ModelKind::RoughFOU:
            if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("rough: need 0 < H < 1");
            if (!(lambda > 0.0 && kappa_exp > 0.0 && nu0 > 0.0))
                throw std::invalid_argument("rough: lambda, kappa_exp, nu0 must be positive");
            break;
    }
}

double ModelSpec::nu_start() const {
    switch (kind) {
        case ModelKind::Heston: return std::sqrt(v0);
        case ModelKind::HullWhite: return std::sqrt(u0);
        case ModelKind::Scott: return lambda * std::exp(u0);
        case ModelKind::RoughFOU: return nu0;
    }
    throw std::logic_error("model: unknown kind");
}

namespace {

void fill_bank(const ModelSpec& spec, const ArrayXd& times, ArrayXd& bank) {
    bank.resize(times.size());
    bank[0] = 1.0;
    for (Eigen::Index k = 0; k + 1 < times.size(); ++k) {
        double dt = times[k + 1] - times[k];
        bank[k + 1] = bank[k] * std::exp(spec.rate.at(times[k]) * dt);
    }
}

// One diffusion path with left-frozen volatility in the stock update, so
// the discounted stock stays an exact discrete-time martingale.
template <class VolStep>
void diffusion_path(const ModelSpec& spec, const ArrayXd& times, Eigen::Index p, PathBatch& out,
                    std::uint64_t seed, VolStep vol_step) {
    Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(p));
    const Eigen::Index m = times.size() - 1;
    double rho = spec.rho, rho_c = std::sqrt(1.0 - rho * rho);
    double s = spec.s0, w = 0.0;
    out.S(p, 0) = s;
    out.W(p, 0) = 0.0;
    double nu = spec.nu_start();
    out.nu(p, 0) = nu;
    for (Eigen::Index k = 0; k < m; ++k) {
        double dt = times[k + 1] - times[k];
        double sdt = std::sqrt(dt);
        double zw = rng.next_normal();
        double zu = rho * zw + rho_c * rng.next_normal();
        double r = spec.rate.at(times[k]);
        s *= std::exp((r - 0.5 * nu * nu) * dt + nu * sdt * zw);
        w += sdt * zw;
        nu = vol_step(nu, dt, zu, static_cast<double>(times[k]));
        out.S(p, k + 1) = s;
        out.W(p, k + 1) = w;
        out.nu(p, k + 1) = nu;
    }
}

} // namespace

PathBatch simulate(const ModelSpec& spec, int n_steps, int n_paths, std::uint64_t seed,
                   int threads) {
    spec.validate();
    if (n_steps < 1 || n_paths < 1)
        throw std::invalid_argument("simulate: need positive step and path counts");

    PathBatch out;
    out.seed = seed;
    out.times = ArrayXd::LinSpaced(n_steps + 1, 0.0, spec.T);
    fill_bank(spec, out.times, out.bank);
    out.S.resize(n_paths, n_steps + 1);
    out.nu.resize(n_paths, n_steps + 1);
    out.W.resize(n_paths, n_steps + 1);

    switch (spec.kind) {
        case ModelKind::Heston: {
            out.scheme = "heston/full-truncation+log-euler";
            // state is the variance U; nu = sqrt(U+) with the negative part
            // truncated in both drift and diffusion
            double kappa = spec.kappa, theta = spec.theta, xi = spec.xi;
            parallel_for(n_paths, threads, [&](std::int64_t lo, std::int64_t hi) {
                for (std::int64_t p = lo; p < hi; ++p) {
                    double u = spec.v0;
                    diffusion_path(spec, out.times, p, out, seed,
                                   [&u, kappa, theta, xi](double, double dt, double z, double) {
                                       double up = std::max(u, 0.0);
                                       u += kappa * (theta - up) * dt +
                                            xi * std::sqrt(up) * std::sqrt(dt) * z;
                                       return std::sqrt(std::max(u, 0.0));
                                   });
                }
            });
            break;
        }
        case ModelKind::HullWhite: {
            out.scheme = "hull-white/exact-lognormal+log-euler";
            double kappa = spec.kappa, theta = spec.theta;
            parallel_for(n_paths, threads, [&](std::int64_t lo, std::int64_t hi) {
                for (std::int64_t p = lo; p < hi; ++p) {
                    double u = spec.u0;
                    diffusion_path(spec, out.times, p, out, seed,
                                   [&u, kappa, theta](double, double dt, double z, double) {
                                       u *= std::exp((kappa - 0.5 * theta * theta) * dt +
                                                     theta * std::sqrt(dt) * z);
                                       return std::sqrt(u);
                                   });
                }
            });
            break;
        }
        case ModelKind::Scott: {
            out.scheme = "scott/exact-ou+log-euler";
            double kappa = spec.kappa, theta = spec.theta, lambda = spec.lambda;
            parallel_for(n_paths, threads, [&](std::int64_t lo, std::int64_t hi) {
                for (std::int64_t p = lo; p < hi; ++p) {
                    double u = spec.u0;
                    diffusion_path(spec, out.times, p, out, seed,
                                   [&u, kappa, theta, lambda](double, double dt, double z, double) {
                                       double decay = std::exp(-kappa * dt);
                                       double sd = theta *
                                                   std::sqrt((1.0 - decay * decay) / (2.0 * kappa));
                                       u = u * decay + sd * z;
                                       return lambda * std::exp(u);
                                   });
                }
            });
            break;
        }
        case ModelKind::RoughFOU: {
            out.scheme = "rough-fou/cholesky+ibp-trapezoid+log-euler";
            // B^H = rho B1 + rho_c B2, with B1 sharing its normals with the
            // stock driver W so the volatility leg is adapted to W at H=1/2.
            RowMat z1;
            RowMat b1 = fbm_sample_with_normals(spec.hurst, out.times, n_paths, seed, &z1);
            RowMat b2 = fbm_sample(spec.hurst, out.times, n_paths,
                                   Rng::mix(seed ^ 0xF0E1D2C3B4A59687ULL), FbmMethod::Cholesky);
            double rho = spec.rho, rho_c = std::sqrt(1.0 - rho * rho);
            double lambda = spec.lambda, kex = spec.kappa_exp, nu0 = spec.nu0;
            const ArrayXd& times = out.times;
            parallel_for(n_paths, threads, [&](std::int64_t lo, std::int64_t hi) {
                for (std::int64_t p = lo; p < hi; ++p) {
                    const Eigen::Index m = times.size() - 1;
                    double s = spec.s0, w = 0.0, integral = 0.0;
                    out.S(p, 0) = s;
                    out.W(p, 0) = 0.0;
                    out.nu(p, 0) = nu0;
                    double nu = nu0;
                    double bh_prev = rho * b1(p, 0) + rho_c * b2(p, 0);
                    for (Eigen::Index k = 0; k < m; ++k) {
                        double dt = times[k + 1] - times[k];
                        double sdt = std::sqrt(dt);
                        double r = spec.rate.at(times[k]);
                        double zw = z1(p, k);
                        s *= std::exp((r - 0.5 * nu * nu) * dt + nu * sdt * zw);
                        w += sdt * zw;
                        double bh = rho * b1(p, k + 1) + rho_c * b2(p, k + 1);
                        integral += 0.5 * dt * (bh_prev * std::exp(lambda * times[k]) +
                                                bh * std::exp(lambda * times[k + 1]));
                        double ufou = bh - lambda * std::exp(-lambda * times[k + 1]) * integral;
                        nu = nu0 * std::exp(kex * ufou);
                        bh_prev = bh;
                        out.S(p, k + 1) = s;
                        out.W(p, k + 1) = w;
                        out.nu(p, k + 1) = nu;
                    }
                }
            });
            break;
        }
    }
    return out;
}

} // namespace fim
