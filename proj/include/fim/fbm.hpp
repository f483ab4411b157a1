#pragma once

#include "fim/common.hpp"

#include <cstdint>

namespace fim {

enum class FbmMethod { Auto, Cholesky, Circulant };

// Cov(B^H_s, B^H_t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(double hurst, double s, double t);

// Exact-law fractional Brownian motion on a uniform grid (times[0] = 0),
// one path per row. Cholesky factors the path covariance directly; the
// circulant route embeds the increment covariance (Davies-Harte) and falls
// back on generating a power-of-two superset of increments.
RowMat fbm_sample(double hurst, const ArrayXd& times, int n_paths, std::uint64_t seed,
                  FbmMethod method = FbmMethod::Auto);

// Cholesky route that also returns the underlying standard normals per
// path, so callers can correlate other drivers with the fBM stream.
RowMat fbm_sample_with_normals(double hurst, const ArrayXd& times, int n_paths,
                               std::uint64_t seed, RowMat* normals_out);

} // namespace fim
