#pragma once

#include "fim/common.hpp"

namespace fim::stats {

double normal_cdf(double x);
double normal_pdf(double x);

// Inverse standard normal CDF (Acklam's rational approximation plus one
// Halley refinement; relative error near machine precision).
double normal_quantile(double p);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

double chi2_cdf(double dof, double x);
double chi2_quantile(double dof, double p);

// Nodes/weights for \int f(x) e^{-x^2} dx  (physicists' convention),
// computed from the Jacobi matrix with Eigen's symmetric eigensolver.
struct GaussHermite {
    ArrayXd nodes;
    ArrayXd weights;
};
GaussHermite gauss_hermite(int order);

} // namespace fim::stats
