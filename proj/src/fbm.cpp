#include "fim/fbm.hpp"
#include "fim/rng.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace fim {

double fbm_covariance(double hurst, double s, double t) {
    double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

namespace {

void check_uniform(const ArrayXd& times) {
    if (times.size() < 2 || times[0] != 0.0)
        throw std::invalid_argument("fbm: grid must start at 0 with at least two points");
    double dt = times[1] - times[0];
    for (Eigen::Index i = 1; i < times.size(); ++i) {
        double step = times[i] - times[i - 1];
        if (!(step > 0.0) || std::abs(step - dt) > 1e-9 * dt)
            throw std::invalid_argument("fbm: grid must be uniform");
    }
}

RowMat cholesky_paths(double hurst, const ArrayXd& times, int n_paths, std::uint64_t seed,
                      RowMat* normals_out) {
    const Eigen::Index m = times.size() - 1; // positive grid times
    MatrixXd cov(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            cov(i, j) = cov(j, i) = fbm_covariance(hurst, times[i + 1], times[j + 1]);
    Eigen::LLT<MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("fbm: covariance factorization failed");
    MatrixXd Lt = llt.matrixL().transpose();

    RowMat z(n_paths, m);
    for (int p = 0; p < n_paths; ++p) {
        Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(p));
        for (Eigen::Index k = 0; k < m; ++k) z(p, k) = rng.next_normal();
    }
    RowMat paths(n_paths, m + 1);
    paths.col(0).setZero();
    paths.rightCols(m).noalias() = z * Lt;
    if (normals_out) *normals_out = std::move(z);
    return paths;
}

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? -1.0 : 1.0);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                auto u = a[i + j], v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

// Davies-Harte: embed the fGn autocovariance into a circulant of length
// 2 * next_pow2(m) and synthesize increments spectrally. Generating a
// power-of-two superset of increments and truncating preserves the law.
RowMat circulant_paths(double hurst, const ArrayXd& times, int n_paths, std::uint64_t seed) {
    const Eigen::Index m = times.size() - 1;
    double dt = times[1] - times[0];
    std::size_t m2 = 1;
    while (m2 < static_cast<std::size_t>(m)) m2 <<= 1;
    const std::size_t n = 2 * m2;

    double scale = std::pow(dt, 2.0 * hurst);
    auto gamma = [&](std::size_t j) {
        double dj = static_cast<double>(j);
        return 0.5 * scale *
               (std::pow(dj + 1.0, 2.0 * hurst) - 2.0 * std::pow(dj, 2.0 * hurst) +
                std::pow(std::abs(dj - 1.0), 2.0 * hurst));
    };
    std::vector<std::complex<double>> c(n);
    for (std::size_t j = 0; j <= m2; ++j) c[j] = gamma(j);
    for (std::size_t j = m2 + 1; j < n; ++j) c[j] = gamma(n - j);
    fft_inplace(c, false);
    std::vector<double> lam(n);
    for (std::size_t j = 0; j < n; ++j) {
        double v = c[j].real();
        if (v < -1e-8 * scale)
            throw std::runtime_error("fbm: circulant embedding produced a negative eigenvalue");
        lam[j] = std::max(v, 0.0);
    }

    RowMat paths(n_paths, m + 1);
    std::vector<std::complex<double>> w(n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (int p = 0; p < n_paths; ++p) {
        Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(p));
        w[0] = std::sqrt(lam[0]) * rng.next_normal();
        for (std::size_t j = 1; j < m2; ++j) {
            double re = rng.next_normal(), im = rng.next_normal();
            w[j] = std::sqrt(0.5 * lam[j]) * std::complex<double>(re, im);
            w[n - j] = std::conj(w[j]);
        }
        w[m2] = std::sqrt(lam[m2]) * rng.next_normal();
        fft_inplace(w, false);
        paths(p, 0) = 0.0;
        double acc = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            acc += w[static_cast<std::size_t>(k)].real() * inv_sqrt_n;
            paths(p, k + 1) = acc;
        }
    }
    return paths;
}

} // namespace

RowMat fbm_sample(double hurst, const ArrayXd& times, int n_paths, std::uint64_t seed,
                  FbmMethod method) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("fbm: need 0 < H < 1");
    if (n_paths < 1) throw std::invalid_argument("fbm: need at least one path");
    check_uniform(times);
    if (method == FbmMethod::Auto)
        method = times.size() - 1 <= 2048 ? FbmMethod::Cholesky : FbmMethod::Circulant;
    if (method == FbmMethod::Cholesky) return cholesky_paths(hurst, times, n_paths, seed, nullptr);
    return circulant_paths(hurst, times, n_paths, seed);
}

RowMat fbm_sample_with_normals(double hurst, const ArrayXd& times, int n_paths,
                               std::uint64_t seed, RowMat* normals_out) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("fbm: need 0 < H < 1");
    check_uniform(times);
    return cholesky_paths(hurst, times, n_paths, seed, normals_out);
}

} // namespace fim
