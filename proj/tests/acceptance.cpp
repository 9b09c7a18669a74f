// Acceptance gate: one printed line per criterion, non-zero exit when
// any criterion fails.
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "copulimp/copula.hpp"
#include "copulimp/embedded_bayes.hpp"
#include "copulimp/evaluation.hpp"
#include "copulimp/simulation.hpp"
#include "copulimp/stat_kernels.hpp"

using namespace copulimp;

namespace {

int failures = 0;

void report(int idx, const char* name, bool ok) {
  std::printf("criterion %2d %-28s %s\n", idx, name, ok ? "PASS" : "FAIL");
  if (!ok) ++failures;
}

DataTable random_table(std::size_t n, std::size_t p, double missing_fraction,
                       Rng& rng) {
  std::vector<Column> cols;
  for (std::size_t j = 0; j < p; ++j) {
    Column c{"c" + std::to_string(j), ColumnKind::Continuous, {}, {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
      c.values.push_back(rng.normal());
      c.missing.push_back(rng.bernoulli(missing_fraction));
    }
    c.missing[j % n] = 0;  // keep at least two observed values
    c.missing[(j + 1) % n] = 0;
    cols.push_back(std::move(c));
  }
  return DataTable(cols);
}

double column_mean_rmse(const DataTable& masked, const TruthRecord& truth,
                        std::size_t col) {
  const Column& c = masked.column(col);
  double mean = 0.0;
  std::size_t n_obs = 0;
  for (std::size_t i = 0; i < masked.n_rows(); ++i) {
    if (!c.missing[i]) {
      mean += c.values[i];
      ++n_obs;
    }
  }
  mean /= static_cast<double>(n_obs);
  double sq = 0.0;
  std::size_t n = 0;
  for (const auto& cell : truth.cells) {
    if (cell.col != col) continue;
    sq += (mean - cell.value) * (mean - cell.value);
    ++n;
  }
  return std::sqrt(sq / static_cast<double>(n));
}

// Holds the binary-imputation results collected from criteria 4 and 5.
struct BinaryCheck {
  double percent_correct;
  double mode_baseline;
};
std::vector<BinaryCheck> binary_checks;

bool criterion_frame_counts() {
  ChainConfig paper;
  paper.total_iterations = 3000;
  paper.thin = 3;
  paper.burn_in = 500;
  ChainConfig replication;
  replication.total_iterations = 2000;
  replication.thin = 2;
  replication.burn_in = 250;
  bool ok = paper.saved_frames() == 500 && replication.saved_frames() == 750;

  // Scaled run on a 50-row fixture: 300/3/50 saves exactly 50 frames.
  Rng rng(101);
  const DataTable table = random_table(50, 3, 0.2, rng);
  ChainConfig scaled;
  scaled.total_iterations = 300;
  scaled.thin = 3;
  scaled.burn_in = 50;
  scaled.seed = 7;
  const ChainResult chain = run_chain(table, scaled);
  ok = ok && chain.saved_frame_count() == 50;
  return ok;
}

bool criterion_monotone_equivariance() {
  Rng rng(102);
  const DataTable table = random_table(200, 5, 0.15, rng);
  ChainConfig config;
  config.total_iterations = 600;
  config.thin = 3;
  config.burn_in = 50;
  config.seed = 11;
  const ChainResult base = run_chain(table, config);

  std::vector<Column> cols = table.columns();
  for (std::size_t i = 0; i < cols[0].values.size(); ++i) {
    if (!cols[0].missing[i]) cols[0].values[i] = std::exp(cols[0].values[i]);
  }
  const ChainResult transformed = run_chain(DataTable(cols), config);

  const auto& cells = base.model().missing_cells();
  if (transformed.model().missing_cells() != cells) return false;
  for (std::size_t m = 0; m < cells.size(); ++m) {
    const bool is_col0 = cells[m].second == 0;
    for (Eigen::Index f = 0; f < base.draws().rows(); ++f) {
      const double a = base.draws()(f, static_cast<Eigen::Index>(m));
      const double b = transformed.draws()(f, static_cast<Eigen::Index>(m));
      if (is_col0 ? (b != std::exp(a)) : (b != a)) return false;
    }
  }
  return true;
}

bool criterion_correlation_recovery() {
  Rng rng(103);
  const double rho = 0.8;
  Column a{"a", ColumnKind::Continuous, {}, {}, {}};
  Column b{"b", ColumnKind::Continuous, {}, {}, {}};
  for (int i = 0; i < 500; ++i) {
    const double z = rng.normal();
    a.values.push_back(z);
    a.missing.push_back(0);
    b.values.push_back(rho * z + std::sqrt(1.0 - rho * rho) * rng.normal());
    b.missing.push_back(0);
  }
  ChainConfig config;
  config.total_iterations = 2000;
  config.thin = 2;
  config.burn_in = 100;
  config.seed = 13;
  const ChainResult chain = run_chain(DataTable({a, b}), config);
  double mean = 0.0;
  for (const Matrix& c : chain.correlation_draws()) mean += c(0, 1);
  mean /= static_cast<double>(chain.correlation_draws().size());
  std::fprintf(stderr, "  correlation recovery: posterior mean %.4f\n", mean);
  return std::abs(mean - rho) < 0.1;
}

bool criterion_beats_baseline() {
  int replicate_wins = 0;
  for (int rep = 0; rep < 5; ++rep) {
    SimulationConfig sim;  // 120 units, T=20, rho=0.85
    Rng rng(200 + static_cast<std::uint64_t>(rep));
    const DataTable panel = generate_panel(sim, rng);
    MissingnessConfig miss;
    const auto [masked, truth] = inject_mar(panel, miss, rng);
    const DataTable lagged = add_lags(masked, 4);

    ChainConfig config;
    config.total_iterations = 1500;
    config.thin = 3;
    config.burn_in = 100;
    config.seed = 300 + static_cast<std::uint64_t>(rep);
    const ChainResult chain = run_chain(lagged, config);
    const MetricsReport r = error_metrics(truth, chain, ErrorMode::SummaryPoint);

    int variable_wins = 0;
    for (const char* name : {"V1", "V2", "V3", "V4"}) {
      const double copula_rmse = r.per_variable.at(name).rmse;
      const double baseline =
          column_mean_rmse(masked, truth, masked.column_index(name));
      if (copula_rmse < baseline) ++variable_wins;
      std::fprintf(stderr, "  rep %d %s: copula %.4f vs mean %.4f\n", rep,
                   name, copula_rmse, baseline);
    }
    if (variable_wins >= 3) ++replicate_wins;
    binary_checks.push_back(
        {percent_correct(truth, chain), mode_baseline(truth, chain)});
  }
  std::fprintf(stderr, "  replicates won: %d of 5\n", replicate_wins);
  return replicate_wins >= 4;
}

bool criterion_ci_calibration() {
  SimulationConfig sim;
  sim.time_points = 60;  // 7200 rows
  Rng rng(400);
  const DataTable panel = generate_panel(sim, rng);
  MissingnessConfig miss;
  const auto [masked, truth] = inject_mar(panel, miss, rng);
  ChainConfig config;
  config.total_iterations = 1200;
  config.thin = 3;
  config.burn_in = 100;
  config.seed = 401;
  const ChainResult chain = run_chain(masked, config);
  const double coverage = ci_coverage(truth, chain, 0.95);
  std::fprintf(stderr, "  coverage at T=60: %.4f\n", coverage);
  binary_checks.push_back(
      {percent_correct(truth, chain), mode_baseline(truth, chain)});
  return coverage >= 0.90 && coverage <= 0.99;
}

bool criterion_binary_imputation() {
  if (binary_checks.empty()) return false;
  for (const auto& check : binary_checks) {
    std::fprintf(stderr, "  binary: copula %.4f vs mode %.4f\n",
                 check.percent_correct, check.mode_baseline);
    if (check.percent_correct <= 0.5) return false;
    if (check.percent_correct <= check.mode_baseline - 0.02) return false;
  }
  return true;
}

bool criterion_timing() {
  SimulationConfig sim;  // T=20: 2400 rows
  Rng rng(500);
  const DataTable panel = generate_panel(sim, rng);
  MissingnessConfig miss;
  const auto [masked, truth] = inject_mar(panel, miss, rng);
  const DataTable lagged = add_lags(masked, 4);  // 25 copula columns

  ChainConfig config;  // the paper's schedule
  config.total_iterations = 3000;
  config.thin = 3;
  config.burn_in = 500;
  config.seed = 501;
  const ChainResult chain = run_chain(lagged, config);
  std::fprintf(stderr, "  3000 iterations on 2400x25: %.1f s\n",
               chain.seconds());
  return chain.saved_frame_count() == 500 && chain.seconds() < 300.0;
}

bool criterion_correlation_validity() {
  int checked = 0;
  for (int t = 0; t < 10; ++t) {
    Rng rng(600 + static_cast<std::uint64_t>(t));
    const DataTable table = random_table(60, 4, 0.1, rng);
    const CopulaModel model(table);
    ChainConfig config;
    config.seed = 700 + static_cast<std::uint64_t>(t);
    LatentState state = init_state(model);
    Rng chain_rng(config.seed);
    for (int iter = 0; iter < 100; ++iter) {
      sweep_latent(state, model, chain_rng);
      update_correlation(state, model, config, chain_rng);
      const Matrix& c = state.c;
      if (!is_spd(c)) return false;
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        if (std::abs(c(j, j) - 1.0) > 1e-12) return false;
      }
      ++checked;
    }
  }
  return checked == 1000;
}

bool criterion_rubin_oracle() {
  Rng rng(800);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 9.0);
    std::vector<double> q(m), w(m);
    for (std::size_t i = 0; i < m; ++i) {
      q[i] = rng.normal() * 4.0;
      w[i] = rng.uniform() * 2.0 + 0.01;
    }
    const PooledEstimate p = rubin_pool(q, w);
    double qbar = 0.0, wbar = 0.0, b = 0.0;
    for (double v : q) qbar += v;
    qbar /= static_cast<double>(m);
    for (double v : w) wbar += v;
    wbar /= static_cast<double>(m);
    for (double v : q) b += (v - qbar) * (v - qbar);
    b /= static_cast<double>(m) - 1.0;
    const double t = wbar + (1.0 + 1.0 / static_cast<double>(m)) * b;
    auto close = [](double x, double y) {
      return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
    };
    if (!close(p.point, qbar) || !close(p.within_variance, wbar) ||
        !close(p.between_variance, b) || !close(p.total_variance, t)) {
      return false;
    }
  }
  const PooledEstimate same = rubin_pool({2.0, 2.0, 2.0, 2.0, 2.0},
                                         {0.3, 0.4, 0.5, 0.6, 0.7});
  return same.between_variance == 0.0 &&
         same.total_variance == same.within_variance;
}

bool criterion_embedded_regression() {
  // One dataset, complete and masked variants: y = 1 + 2x + 0.5e with
  // roughly 20% MAR on x driven by the observed y.
  const std::size_t n = 400;
  Rng gen(900);
  Column x{"x", ColumnKind::Continuous, {}, {}, {}};
  Column y{"y", ColumnKind::Continuous, {}, {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double xv = gen.normal();
    x.values.push_back(xv);
    x.missing.push_back(0);
    y.values.push_back(1.0 + 2.0 * xv + 0.5 * gen.normal());
    y.missing.push_back(0);
  }
  const DataTable complete({x, y});

  double y_mean = 0.0, y_sq = 0.0;
  for (double v : y.values) {
    y_mean += v;
    y_sq += v * v;
  }
  y_mean /= static_cast<double>(n);
  const double y_sd =
      std::sqrt(y_sq / static_cast<double>(n) - y_mean * y_mean);
  Column x_masked = x;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = 0.1 + 0.2 * norm_cdf((y.values[i] - y_mean) / y_sd);
    x_masked.missing[i] = gen.bernoulli(p);
  }
  const DataTable masked({x_masked, y});

  RegressionSpec spec;
  spec.outcome = "y";
  spec.predictors = {"x"};
  ChainConfig config;
  config.total_iterations = 10000;
  config.thin = 10;
  config.burn_in = 100;
  config.seed = 901;
  const PosteriorDraws full = gibbs_regress(complete, spec, config);
  const PosteriorDraws part = gibbs_regress(masked, spec, config);

  // Conjugate oracle at the chain's posterior-mean error variance.
  const double sigma2 = full.error_variance.mean();
  Matrix xd(n, 2);
  Vector yv(n);
  for (std::size_t i = 0; i < n; ++i) {
    xd(static_cast<Eigen::Index>(i), 0) = 1.0;
    xd(static_cast<Eigen::Index>(i), 1) = x.values[i];
    yv(static_cast<Eigen::Index>(i)) = y.values[i];
  }
  const Matrix prec = xd.transpose() * xd / sigma2 +
                      spec.prior_precision * Matrix::Identity(2, 2);
  const Vector oracle = prec.llt().solve(xd.transpose() * yv / sigma2);

  const auto frames = full.coefficients.rows();
  for (Eigen::Index c = 0; c < 2; ++c) {
    const double mean = full.coefficients.col(c).mean();
    double var = 0.0, lag = 0.0;
    for (Eigen::Index f = 0; f < frames; ++f) {
      const double d = full.coefficients(f, c) - mean;
      var += d * d;
      if (f + 1 < frames) {
        lag += d * (full.coefficients(f + 1, c) - mean);
      }
    }
    var /= static_cast<double>(frames);
    const double r1 = std::max(0.0, lag / (var * static_cast<double>(frames)));
    const double se = std::sqrt(var * (1.0 + r1) / (1.0 - r1) /
                                static_cast<double>(frames));
    std::fprintf(stderr, "  coef %lld: chain %.5f oracle %.5f se %.5f\n",
                 static_cast<long long>(c), mean, oracle(c), se);
    if (std::abs(mean - oracle(c)) > 3.0 * se) return false;
  }

  const double slope_mean = part.coefficients.col(1).mean();
  const double slope_sd = std::sqrt(
      (part.coefficients.col(1).array() - slope_mean).square().mean());
  std::fprintf(stderr, "  masked slope %.4f sd %.4f\n", slope_mean, slope_sd);
  if (std::abs(slope_mean - 2.0) > 2.0 * slope_sd) return false;

  const PosteriorSummary s_full = summarize_posterior(full, 0.95);
  const PosteriorSummary s_part = summarize_posterior(part, 0.95);
  for (std::size_t c = 0; c < 2; ++c) {
    const double w_full =
        s_full.coefficients[c].upper - s_full.coefficients[c].lower;
    const double w_part =
        s_part.coefficients[c].upper - s_part.coefficients[c].lower;
    std::fprintf(stderr, "  width %zu: complete %.5f masked %.5f\n", c,
                 w_full, w_part);
    if (w_part < w_full) return false;
  }
  return true;
}

double truncnorm_ks(double mean, double sd, double lower, double upper,
                    std::size_t n, Rng& rng) {
  std::vector<double> draws(n);
  for (double& d : draws) d = sample_truncnorm(mean, sd, lower, upper, rng);
  std::sort(draws.begin(), draws.end());
  const double lo = norm_cdf((lower - mean) / sd);
  const double hi = norm_cdf((upper - mean) / sd);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = (norm_cdf((draws[i] - mean) / sd) - lo) / (hi - lo);
    worst = std::max(worst, std::abs(f - (static_cast<double>(i) + 1.0) /
                                             static_cast<double>(n)));
    worst = std::max(worst, std::abs(f - static_cast<double>(i) /
                                             static_cast<double>(n)));
  }
  return worst;
}

bool criterion_kernel_suite() {
  Rng rng(1000);
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = 4000;
  const double threshold = 1.9495 / std::sqrt(static_cast<double>(n));
  const double configs[5][4] = {{0, 1, -1, 1},
                                {0, 1, 0.5, inf},
                                {2, 3, -inf, 1},
                                {0, 1, 5, 6},
                                {-1, 2, -3, 0.5}};
  for (const auto& c : configs) {
    const double ks = truncnorm_ks(c[0], c[1], c[2], c[3], n, rng);
    std::fprintf(stderr, "  truncnorm KS: %.5f (threshold %.5f)\n", ks,
                 threshold);
    if (ks >= threshold) return false;
  }

  const Matrix scale = random_covariance(3, 0.5, 3.0, rng);
  Matrix iw_mean = Matrix::Zero(3, 3);
  const int n_iw = 4000;
  for (int i = 0; i < n_iw; ++i) {
    iw_mean += sample_inverse_wishart(10.0, scale, rng);
  }
  iw_mean /= static_cast<double>(n_iw);
  const Matrix expected = scale / 6.0;  // scale / (df - p - 1)
  if ((iw_mean - expected).norm() > 0.05 * expected.norm()) return false;

  const Matrix a = Matrix::Random(3, 4);
  const Matrix b = Matrix::Random(2, 5);
  const Vector u = Vector::Random(4);
  const Vector v = Vector::Random(5);
  const Vector lhs = kronecker(a, b) * kronecker(Matrix(u), Matrix(v));
  const Vector rhs = kronecker(Matrix(a * u), Matrix(b * v));
  if ((lhs - rhs).norm() > 1e-10) return false;

  return is_spd(ar1_toeplitz(70, 0.95));
}

}  // namespace

int main() {
  report(1, "frame counts", criterion_frame_counts());
  report(2, "monotone equivariance", criterion_monotone_equivariance());
  report(3, "correlation recovery", criterion_correlation_recovery());
  report(4, "beats mean baseline", criterion_beats_baseline());
  report(5, "CI calibration at T=60", criterion_ci_calibration());
  report(6, "binary imputation", criterion_binary_imputation());
  report(7, "timing at desk scale", criterion_timing());
  report(8, "correlation draw validity", criterion_correlation_validity());
  report(9, "Rubin pooling oracle", criterion_rubin_oracle());
  report(10, "embedded regression", criterion_embedded_regression());
  report(11, "statistical kernels", criterion_kernel_suite());
  if (failures > 0) {
    std::printf("%d criteria FAILED\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
