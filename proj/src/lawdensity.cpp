#include "fim/lawdensity.hpp"
#include "fim/rng.hpp"
#include "fim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fim {

void DiscreteMartingaleLaw::validate() const {
    if (!(s0 > 0.0 && T > 0.0 && n >= 1)) throw std::invalid_argument("law: bad shape parameters");
    if (static_cast<int>(steps.size()) != n) throw std::invalid_argument("law: steps size mismatch");
    for (const auto& step : steps) {
        if (step.empty()) throw std::invalid_argument("law: empty step");
        for (const auto& c : step) {
            if (c.support.empty() || c.support.size() != c.prob.size() ||
                c.cdf.size() != c.prob.size())
                throw std::invalid_argument("law: malformed conditional");
            double sum = 0.0, mean = 0.0, prev = -kInf;
            for (std::size_t i = 0; i < c.support.size(); ++i) {
                if (!(c.support[i] > 0.0)) throw std::invalid_argument("law: support must be positive");
                if (c.support[i] <= prev) throw std::invalid_argument("law: support must increase");
                prev = c.support[i];
                if (!(c.prob[i] >= 0.0)) throw std::invalid_argument("law: negative probability");
                sum += c.prob[i];
                mean += c.prob[i] * c.support[i];
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("law: conditional pmf does not sum to 1");
            if (std::abs(mean - c.given) > 1e-12 * (1.0 + std::abs(c.given)))
                throw std::invalid_argument("law: conditional mean differs from parent value");
        }
    }
}

double DiscreteMartingaleLaw::bound_C() const {
    double vmax = s0, vmin = s0;
    for (const auto& step : steps)
        for (const auto& c : step)
            for (double y : c.support) {
                vmax = std::max(vmax, y);
                vmin = std::min(vmin, y);
            }
    return std::max(vmax, 1.0 / vmin);
}

const DiscreteMartingaleLaw::Conditional& DiscreteMartingaleLaw::conditional(int step,
                                                                             double parent) const {
    for (const auto& c : steps[static_cast<std::size_t>(step)])
        if (std::abs(c.given - parent) <= 1e-9 * (1.0 + std::abs(parent))) return c;
    throw std::invalid_argument("law: no conditional for the given parent value");
}

DiscreteMartingaleLaw DiscreteMartingaleLaw::binomial_gbm(double s0, double sigma, double T,
                                                          int n) {
    if (!(s0 > 0.0 && sigma >= 0.0 && T > 0.0 && n >= 1))
        throw std::invalid_argument("binomial_gbm: bad parameters");
    DiscreteMartingaleLaw law;
    law.s0 = s0;
    law.T = T;
    law.n = n;
    law.steps.resize(static_cast<std::size_t>(n));
    double u = std::exp(sigma * std::sqrt(T / n));
    for (int k = 0; k < n; ++k) {
        std::vector<double> parents;
        for (int j = 0; j <= k; ++j) parents.push_back(s0 * std::pow(u, 2 * j - k));
        for (double pv : parents) {
            Conditional c;
            c.given = pv;
            if (sigma == 0.0) {
                c.support = {pv};
                c.prob = {1.0};
                c.cdf = {1.0};
            } else {
                double up = pv * u, dn = pv / u;
                double p = (pv - dn) / (up - dn); // martingale weight
                c.support = {dn, up};
                c.prob = {1.0 - p, p};
                c.cdf = {1.0 - p, 1.0};
            }
            law.steps[static_cast<std::size_t>(k)].push_back(std::move(c));
        }
    }
    law.validate();
    return law;
}

namespace {

std::size_t invert_cdf(const DiscreteMartingaleLaw::Conditional& c, double u) {
    // sup{y : F(y) < u} for the right-continuous step CDF: the first
    // support point whose cumulative weight reaches u.
    for (std::size_t j = 0; j < c.cdf.size(); ++j)
        if (c.cdf[j] >= u) return j;
    return c.cdf.size() - 1;
}

} // namespace

std::vector<CouplingSample> quantile_coupling_sample(const DiscreteMartingaleLaw& law,
                                                     int n_samples, std::uint64_t seed,
                                                     int threads) {
    law.validate();
    std::vector<CouplingSample> out(static_cast<std::size_t>(n_samples));
    const double sd = std::sqrt(law.T / law.n);
    parallel_for(n_samples, threads, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t s = lo; s < hi; ++s) {
            Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(s));
            CouplingSample cs;
            cs.z.resize(static_cast<std::size_t>(law.n));
            cs.m.resize(static_cast<std::size_t>(law.n) + 1);
            cs.m[0] = law.s0;
            for (int k = 0; k < law.n; ++k) {
                double zu = rng.next_normal();
                cs.z[static_cast<std::size_t>(k)] = sd * zu;
                const auto& c = law.conditional(k, cs.m[static_cast<std::size_t>(k)]);
                cs.m[static_cast<std::size_t>(k + 1)] = c.support[invert_cdf(c, stats::normal_cdf(zu))];
            }
            out[static_cast<std::size_t>(s)] = std::move(cs);
        }
    });
    return out;
}

namespace {

struct PathTable {
    std::vector<std::vector<double>> values; // per cell: full chain values
    std::vector<double> prob;

    int find_cell(const std::vector<double>& m) const {
        for (std::size_t c = 0; c < values.size(); ++c) {
            bool match = true;
            for (std::size_t k = 0; k < m.size(); ++k) {
                if (std::abs(values[c][k] - m[k]) > 1e-9 * (1.0 + std::abs(m[k]))) {
                    match = false;
                    break;
                }
            }
            if (match) return static_cast<int>(c);
        }
        return -1;
    }
};

void enumerate_paths(const DiscreteMartingaleLaw& law, int step, std::vector<double>& chain,
                     double p, PathTable& table) {
    if (step == law.n) {
        table.values.push_back(chain);
        table.prob.push_back(p);
        return;
    }
    const auto& c = law.conditional(step, chain.back());
    for (std::size_t j = 0; j < c.support.size(); ++j) {
        if (c.prob[j] == 0.0) continue;
        chain.push_back(c.support[j]);
        enumerate_paths(law, step + 1, chain, p * c.prob[j], table);
        chain.pop_back();
    }
}

} // namespace

LawMatchResult law_match_test(const std::vector<CouplingSample>& samples,
                              const DiscreteMartingaleLaw& law) {
    PathTable table;
    std::vector<double> chain{law.s0};
    enumerate_paths(law, 0, chain, 1.0, table);

    std::vector<long> counts(table.prob.size(), 0);
    for (const auto& s : samples) {
        int cell = table.find_cell(s.m);
        if (cell < 0)
            throw std::runtime_error("law_match_test: sampled chain leaves the law's support");
        ++counts[static_cast<std::size_t>(cell)];
    }
    const double N = static_cast<double>(samples.size());
    LawMatchResult res;
    res.cells = static_cast<int>(table.prob.size());
    for (std::size_t c = 0; c < table.prob.size(); ++c) {
        double emp = counts[c] / N;
        res.tv_distance += 0.5 * std::abs(emp - table.prob[c]);
        double expect = N * table.prob[c];
        if (expect > 0.0) {
            double d = counts[c] - expect;
            res.chi2_stat += d * d / expect;
        }
    }
    res.chi2_crit = res.cells > 1 ? stats::chi2_quantile(res.cells - 1, 0.99) : 0.0;
    res.pass = res.cells > 1 ? res.chi2_stat <= res.chi2_crit : true;
    return res;
}

namespace {

// Values and z-space thresholds of the step function z -> M_{k+1}.
struct StepFn {
    const std::vector<double>* values;
    std::vector<double> z_cut; // ascending, size values-1
};

StepFn step_fn(const DiscreteMartingaleLaw& law, int k, double parent) {
    const auto& c = law.conditional(k, parent);
    StepFn f;
    f.values = &c.support;
    double sd = std::sqrt(law.T / law.n);
    for (std::size_t j = 0; j + 1 < c.cdf.size(); ++j) {
        double u = std::min(std::max(c.cdf[j], 1e-300), 1.0 - 1e-16);
        f.z_cut.push_back(sd * stats::normal_quantile(u));
    }
    return f;
}

} // namespace

double brownian_interpolation(const DiscreteMartingaleLaw& law, const CouplingSample& sample,
                              double t, double w, int quadrature_order) {
    if (!(t >= 0.0 && t <= law.T)) throw std::domain_error("interpolation: t outside [0, T]");
    const double step_len = law.T / law.n;
    int k = std::min(static_cast<int>(t / step_len), law.n - 1);
    double t_next = (k + 1) * step_len;
    if (t >= law.T) return sample.m.back();

    StepFn f = step_fn(law, k, sample.m[static_cast<std::size_t>(k)]);
    const std::vector<double>& vals = *f.values;
    double var = t_next - t;
    if (var <= 0.0) var = 0.0;
    double sd = std::sqrt(var);

    if (vals.size() == 1) return vals[0];
    if (sd == 0.0) {
        std::size_t j = 0;
        while (j < f.z_cut.size() && w > f.z_cut[j]) ++j;
        return vals[j];
    }

    if (quadrature_order > 0) {
        stats::GaussHermite gh = stats::gauss_hermite(quadrature_order);
        double acc = 0.0;
        const double scale = std::sqrt(2.0) * sd;
        for (Eigen::Index i = 0; i < gh.nodes.size(); ++i) {
            double z = w + scale * gh.nodes[i];
            std::size_t j = 0;
            while (j < f.z_cut.size() && z > f.z_cut[j]) ++j;
            acc += gh.weights[i] * vals[j];
        }
        return acc / std::sqrt(M_PI);
    }

    // Exact Gaussian integral of the step function via CDF differences.
    double acc = 0.0, prev = 0.0;
    for (std::size_t j = 0; j < vals.size(); ++j) {
        double upper = j < f.z_cut.size() ? stats::normal_cdf((f.z_cut[j] - w) / sd) : 1.0;
        acc += vals[j] * (upper - prev);
        prev = upper;
    }
    return acc;
}

std::vector<WeakDistanceRow> weak_distance_diag(double s0, double sigma, double T,
                                                const std::vector<int>& n_list, int n_samples,
                                                std::uint64_t seed, int threads) {
    const int fine = 64;
    for (int n : n_list)
        if (n < 1 || fine % n != 0)
            throw std::invalid_argument("weak_distance: each n must divide the 64-step grid");

    const double dt = T / fine;
    const double sdt = std::sqrt(dt);
    const int n_funcs = 6;

    // Bounded test functionals of a path on the fine grid, in units of s0.
    auto functionals = [&](const double* path, double* phi) {
        double mid = path[fine / 2], end = path[fine];
        double mx = path[0];
        for (int f = 1; f <= fine; ++f) mx = std::max(mx, path[f]);
        phi[0] = std::min(mid / s0, 2.0);
        phi[1] = std::min(end / s0, 2.0);
        phi[2] = std::min(std::max(mid - s0, 0.0) / s0, 1.0);
        phi[3] = std::min(std::max(end - s0, 0.0) / s0, 1.0);
        phi[4] = std::min(mx / s0, 2.0);
        phi[5] = std::min(std::max(mx - s0, 0.0) / s0, 1.0);
    };

    // Reference means under exact GBM sampled on the same grid, with a
    // larger fixed budget and its own stream space.
    const int n_ref = 16 * n_samples;
    std::uint64_t ref_seed = Rng::mix(seed ^ 0xA5C9D3B1E7F01234ULL);
    std::vector<double> ref_mean(n_funcs, 0.0), ref_m2(n_funcs, 0.0);
    {
        std::vector<std::vector<double>> acc(static_cast<std::size_t>(threads > 0 ? threads : 1));
        // accumulate in path order for determinism: single pass
        std::vector<double> path(fine + 1), phi(n_funcs);
        for (int s = 0; s < n_ref; ++s) {
            Rng rng = Rng::for_stream(ref_seed, static_cast<std::uint64_t>(s));
            path[0] = s0;
            for (int f = 0; f < fine; ++f) {
                double z = rng.next_normal();
                path[f + 1] = path[f] * std::exp(-0.5 * sigma * sigma * dt + sigma * sdt * z);
            }
            functionals(path.data(), phi.data());
            for (int i = 0; i < n_funcs; ++i) {
                ref_mean[static_cast<std::size_t>(i)] += phi[static_cast<std::size_t>(i)];
                ref_m2[static_cast<std::size_t>(i)] +=
                    phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i)];
            }
        }
        for (int i = 0; i < n_funcs; ++i) {
            ref_mean[static_cast<std::size_t>(i)] /= n_ref;
            ref_m2[static_cast<std::size_t>(i)] =
                ref_m2[static_cast<std::size_t>(i)] / n_ref -
                ref_mean[static_cast<std::size_t>(i)] * ref_mean[static_cast<std::size_t>(i)];
        }
    }

    std::vector<WeakDistanceRow> rows;
    for (int n : n_list) {
        DiscreteMartingaleLaw law = DiscreteMartingaleLaw::binomial_gbm(s0, sigma, T, n);
        const int per_block = fine / n;
        const double block_len = T / n;

        std::vector<double> mean(n_funcs, 0.0), m2(n_funcs, 0.0);
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(n_samples),
                                              std::vector<double>(n_funcs));
        parallel_for(n_samples, threads, [&](std::int64_t lo, std::int64_t hi) {
            std::vector<double> w(fine + 1), path(fine + 1), phi(n_funcs), chain(n + 1);
            for (std::int64_t s = lo; s < hi; ++s) {
                Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(s));
                w[0] = 0.0;
                for (int f = 0; f < fine; ++f) w[f + 1] = w[f] + sdt * rng.next_normal();
                // Chain from block increments of the same Brownian path.
                chain[0] = s0;
                CouplingSample cs;
                cs.z.resize(static_cast<std::size_t>(n));
                cs.m.resize(static_cast<std::size_t>(n) + 1);
                cs.m[0] = s0;
                for (int k = 0; k < n; ++k) {
                    double zb = w[(k + 1) * per_block] - w[k * per_block];
                    cs.z[static_cast<std::size_t>(k)] = zb;
                    const auto& c = law.conditional(k, cs.m[static_cast<std::size_t>(k)]);
                    double u = stats::normal_cdf(zb / std::sqrt(block_len));
                    cs.m[static_cast<std::size_t>(k + 1)] = c.support[invert_cdf(c, u)];
                }
                for (int f = 0; f <= fine; ++f) {
                    double t = f * dt;
                    if (f % per_block == 0) {
                        path[f] = cs.m[static_cast<std::size_t>(f / per_block)];
                    } else {
                        int k = f / per_block;
                        double winc = w[f] - w[k * per_block];
                        path[f] = brownian_interpolation(law, cs, t, winc, 0);
                    }
                }
                functionals(path.data(), phi.data());
                sums[static_cast<std::size_t>(s)].assign(phi.begin(), phi.end());
            }
        });
        for (int s = 0; s < n_samples; ++s) {
            for (int i = 0; i < n_funcs; ++i) {
                double v = sums[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
                mean[static_cast<std::size_t>(i)] += v;
                m2[static_cast<std::size_t>(i)] += v * v;
            }
        }
        WeakDistanceRow row;
        row.n = n;
        for (int i = 0; i < n_funcs; ++i) {
            double mu = mean[static_cast<std::size_t>(i)] / n_samples;
            double var = m2[static_cast<std::size_t>(i)] / n_samples - mu * mu;
            double diff = std::abs(mu - ref_mean[static_cast<std::size_t>(i)]);
            double se = std::sqrt(std::max(var, 0.0) / n_samples +
                                  std::max(ref_m2[static_cast<std::size_t>(i)], 0.0) / n_ref);
            if (diff > row.proxy) {
                row.proxy = diff;
                row.mc_stderr = se;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace fim
