#include "copulimp/stat_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "copulimp/errors.hpp"

namespace copulimp {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

bool is_spd(const Matrix& m, double sym_rtol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_rtol * scale) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

double norm_cdf(double x) {
  return 0.5 * std::erfc(-x / kSqrt2);
}

// Acklam's rational approximation, polished with one Halley step
// against erfc. Keeps absolute error well below 1e-12 across
// [1e-12, 1-1e-12].
double norm_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw ConfigError("norm_quantile: argument must lie in (0,1)");
  }
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = norm_cdf(x) - u;
  const double pdf = std::exp(-0.5 * x * x) / 2.5066282746310002;
  const double w = e / pdf;
  x -= w / (1.0 + 0.5 * x * w);
  return x;
}

namespace {

// One-sided exponential rejection sampler for the standard normal
// restricted to [lo, hi] with lo >= 0 (Robert 1995).
double tail_rejection(double lo, double hi, Rng& rng) {
  const double alpha = 0.5 * (lo + std::sqrt(lo * lo + 4.0));
  for (;;) {
    const double z = lo - std::log(rng.uniform()) / alpha;
    if (z > hi) continue;
    const double d = z - alpha;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) return z;
  }
}

}  // namespace

double sample_truncnorm(double mean, double sd, double lower, double upper,
                        Rng& rng) {
  if (!(sd > 0.0)) throw ConfigError("sample_truncnorm: sd must be positive");
  if (!(lower < upper)) {
    throw ConfigError("sample_truncnorm: lower bound must be below upper");
  }
  double a = (lower - mean) / sd;
  double b = (upper - mean) / sd;

  double z;
  const double kTail = 5.0;
  if (a >= kTail || b <= -kTail) {
    // Interval entirely in one far tail.
    z = (a >= kTail) ? tail_rejection(a, b, rng) : -tail_rejection(-b, -a, rng);
  } else {
    const double fa = std::isinf(a) ? 0.0 : norm_cdf(a);
    const double fb = std::isinf(b) ? 1.0 : norm_cdf(b);
    const double u = fa + rng.uniform() * (fb - fa);
    z = norm_quantile(std::min(std::max(u, 1e-300), 1.0 - 1e-16));
  }
  double value = mean + sd * z;
  // Open-interval contract; nudge off a bound when rounding lands on it.
  if (value <= lower) value = std::nextafter(lower, upper);
  if (value >= upper) value = std::nextafter(upper, lower);
  return value;
}

Matrix sample_wishart(double df, const Matrix& scale, Rng& rng) {
  const auto p = scale.rows();
  if (df <= static_cast<double>(p) - 1.0) {
    throw ConfigError("sample_wishart: df must exceed p - 1");
  }
  if (!is_spd(scale)) throw NumericalError("sample_wishart: scale is not SPD");
  Eigen::LLT<Matrix> llt(scale);
  Matrix bartlett = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    bartlett(i, i) = std::sqrt(rng.chi_squared(df - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }
  Matrix lb = llt.matrixL() * bartlett;
  Matrix w = lb * lb.transpose();
  return 0.5 * (w + w.transpose());
}

Matrix sample_inverse_wishart(double df, const Matrix& scale, Rng& rng) {
  if (!is_spd(scale)) {
    throw NumericalError("sample_inverse_wishart: scale is not SPD");
  }
  const auto p = scale.rows();
  Matrix scale_inv = Eigen::LLT<Matrix>(scale).solve(Matrix::Identity(p, p));
  scale_inv = 0.5 * (scale_inv + scale_inv.transpose());
  Matrix w = sample_wishart(df, scale_inv, rng);
  Matrix draw = Eigen::LLT<Matrix>(w).solve(Matrix::Identity(p, p));
  return 0.5 * (draw + draw.transpose());
}

Vector sample_mvn(const Vector& mean, const Matrix& cov, Rng& rng) {
  if (mean.size() != cov.rows()) {
    throw ConfigError("sample_mvn: dimension mismatch");
  }
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("sample_mvn: covariance is not SPD");
  }
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + llt.matrixL() * z;
}

EmpiricalMarginal ecdf_build(const std::vector<double>& observed) {
  std::vector<double> sorted = observed;
  std::sort(sorted.begin(), sorted.end());
  EmpiricalMarginal m;
  m.n = sorted.size();
  std::size_t i = 0;
  std::size_t cum = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    cum += j - i;
    m.support.push_back(sorted[i]);
    m.cum_props.push_back(static_cast<double>(cum) /
                          (static_cast<double>(m.n) + 1.0));
    i = j;
  }
  if (m.support.size() < 2) {
    throw DataError("ecdf_build: need at least 2 distinct observed values");
  }
  return m;
}

double ecdf_quantile(const EmpiricalMarginal& marginal, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw ConfigError("ecdf_quantile: u must lie in (0,1)");
  }
  auto it = std::lower_bound(marginal.cum_props.begin(),
                             marginal.cum_props.end(), u);
  if (it == marginal.cum_props.end()) return marginal.support.back();
  return marginal.support[static_cast<std::size_t>(
      it - marginal.cum_props.begin())];
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix ar1_toeplitz(int t, double rho) {
  if (t < 1) throw ConfigError("ar1_toeplitz: T must be >= 1");
  if (!(std::abs(rho) < 1.0)) {
    throw ConfigError("ar1_toeplitz: |rho| must be below 1");
  }
  Matrix m(t, t);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < t; ++j) m(i, j) = std::pow(rho, std::abs(i - j));
  }
  return m;
}

Matrix random_covariance(int p, double eigen_lo, double eigen_hi, Rng& rng) {
  if (p < 1) throw ConfigError("random_covariance: p must be >= 1");
  if (!(eigen_lo > 0.0 && eigen_hi >= eigen_lo)) {
    throw ConfigError("random_covariance: eigenvalue range must be positive");
  }
  Matrix g(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Sign-correct so R has positive diagonal; makes Q unique given g.
  for (Eigen::Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  Vector lambda(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    lambda(i) = eigen_lo + rng.uniform() * (eigen_hi - eigen_lo);
  }
  Matrix out = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace copulimp
