#pragma once

#include <Eigen/Dense>
#include <vector>

#include "copulimp/rng.hpp"

namespace copulimp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Symmetric positive-definite check: symmetry to 1e-12 relative
// tolerance and a successful Cholesky factorization.
bool is_spd(const Matrix& m, double sym_rtol = 1e-12);

// Standard normal CDF, accurate over the full double range.
double norm_cdf(double x);

// Inverse of norm_cdf on (0,1); throws ConfigError outside the open
// interval. Absolute error below 1e-12 on [1e-12, 1-1e-12].
double norm_quantile(double u);

// One draw from N(mean, sd^2) restricted to (lower, upper); bounds may
// be +-infinity. Inverse-CDF for moderate truncation, switching to a
// tail-exponential rejection scheme when the interval sits beyond 5
// standard deviations, where the inverse CDF loses precision.
double sample_truncnorm(double mean, double sd, double lower, double upper,
                        Rng& rng);

// Wishart(df, scale) via Bartlett decomposition; df > p - 1.
Matrix sample_wishart(double df, const Matrix& scale, Rng& rng);

// InverseWishart(df, scale): inverts a Wishart draw on the inverted
// scale. Mean of draws is scale / (df - p - 1) for df > p + 1.
Matrix sample_inverse_wishart(double df, const Matrix& scale, Rng& rng);

// mean + L z with L the lower Cholesky factor of cov.
Vector sample_mvn(const Vector& mean, const Matrix& cov, Rng& rng);

// Empirical marginal of one column: tie-deduplicated support with
// cumulative proportions scaled by n/(n+1) so they stay inside (0,1).
struct EmpiricalMarginal {
  std::vector<double> support;     // sorted distinct observed values
  std::vector<double> cum_props;   // strictly increasing, all in (0,1)
  std::size_t n = 0;
};

EmpiricalMarginal ecdf_build(const std::vector<double>& observed);

// Smallest support value whose scaled cumulative proportion is >= u,
// clamped to the maximum support value. Output always lies in the
// observed support.
double ecdf_quantile(const EmpiricalMarginal& marginal, double u);

Matrix kronecker(const Matrix& a, const Matrix& b);

// AR(1) Toeplitz correlation: entry (i,j) = rho^|i-j|. |rho| < 1.
Matrix ar1_toeplitz(int t, double rho);

// Q diag(lambda) Q^T with Q from the sign-corrected QR of a standard
// Gaussian matrix and lambda i.i.d. uniform over [lo, hi].
Matrix random_covariance(int p, double eigen_lo, double eigen_hi, Rng& rng);

}  // namespace copulimp
