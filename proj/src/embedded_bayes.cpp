#include "copulimp/embedded_bayes.hpp"

#include <algorithm>
#include <cmath>

#include "copulimp/errors.hpp"

namespace copulimp {

void RegressionSpec::validate(const DataTable& table) const {
  if (!table.has_column(outcome)) {
    throw ConfigError("regression: unknown outcome column \"" + outcome + "\"");
  }
  if (!is_copula_kind(table.column(table.column_index(outcome)).kind)) {
    throw ConfigError("regression: outcome must be a data column");
  }
  if (predictors.empty()) {
    throw ConfigError("regression: need at least one predictor");
  }
  for (const auto& name : predictors) {
    if (!table.has_column(name)) {
      throw ConfigError("regression: unknown predictor column \"" + name + "\"");
    }
    if (!is_copula_kind(table.column(table.column_index(name)).kind)) {
      throw ConfigError("regression: predictor must be a data column");
    }
    if (name == outcome) {
      throw ConfigError("regression: outcome cannot also be a predictor");
    }
  }
  if (!(prior_precision > 0.0 && ig_shape > 0.0 && ig_scale > 0.0)) {
    throw ConfigError("regression: prior hyperparameters must be positive");
  }
}

PosteriorDraws gibbs_regress(const DataTable& table, const RegressionSpec& spec,
                             const ChainConfig& config,
                             const ProgressSink& progress) {
  spec.validate(table);
  CopulaModel model(table);
  config.validate(model.p());

  const auto n = static_cast<Eigen::Index>(model.n());
  const std::size_t q = spec.predictors.size() + (spec.intercept ? 1 : 0);
  const auto qn = static_cast<Eigen::Index>(q);

  // Copula-column index of the outcome and each predictor.
  auto copula_slot = [&](const std::string& name) {
    const std::size_t j = table.column_index(name);
    const auto& cols = model.columns();
    const auto it = std::find(cols.begin(), cols.end(), j);
    return static_cast<std::size_t>(it - cols.begin());
  };
  const std::size_t y_slot = copula_slot(spec.outcome);
  std::vector<std::size_t> x_slots;
  for (const auto& name : spec.predictors) x_slots.push_back(copula_slot(name));

  // Observed values stay fixed; missing entries are refreshed from the
  // copula state every iteration.
  auto column_values = [&](std::size_t slot, const LatentState& state) {
    const std::size_t j = model.columns()[slot];
    const Column& col = table.column(j);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = static_cast<std::size_t>(i);
      if (col.missing[row]) {
        const double u = norm_cdf(state.z(i, static_cast<Eigen::Index>(slot)));
        v(i) = ecdf_quantile(model.marginal(slot), u);
      } else {
        v(i) = col.values[row];
      }
    }
    return v;
  };

  LatentState state = init_state(model);
  Rng rng(config.seed);

  const int n_frames = config.saved_frames();
  PosteriorDraws out;
  if (spec.intercept) out.names.push_back("(intercept)");
  for (const auto& name : spec.predictors) out.names.push_back(name);
  out.coefficients.resize(n_frames, qn);
  out.error_variance.resize(n_frames);
  out.total_iterations = config.total_iterations;
  out.thin = config.thin;
  out.burn_in = config.burn_in;

  const Matrix prior_prec = spec.prior_precision * Matrix::Identity(qn, qn);
  double sigma2 = 1.0;
  int saved = 0;
  for (int iter = 1; iter <= config.total_iterations; ++iter) {
    // Point-of-need imputation: advance the copula state one full scan.
    sweep_latent(state, model, rng);
    update_correlation(state, model, config, rng);

    Matrix x(n, qn);
    Eigen::Index col = 0;
    if (spec.intercept) x.col(col++).setOnes();
    for (std::size_t s : x_slots) x.col(col++) = column_values(s, state);
    const Vector y = column_values(y_slot, state);

    // beta | sigma2: conjugate normal with zero prior mean.
    Matrix post_prec = x.transpose() * x / sigma2 + prior_prec;
    post_prec = 0.5 * (post_prec + post_prec.transpose());
    Eigen::LLT<Matrix> llt(post_prec);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("gibbs_regress: posterior precision is not SPD");
    }
    const Vector post_mean = llt.solve(x.transpose() * y / sigma2);
    Vector zdraw(qn);
    for (Eigen::Index i = 0; i < qn; ++i) zdraw(i) = rng.normal();
    // Solve L^T u = z for a draw with covariance post_prec^{-1}.
    const Vector beta =
        post_mean + llt.matrixU().solve(zdraw);

    // sigma2 | beta: inverse gamma.
    const double ssr = (y - x * beta).squaredNorm();
    const double shape = spec.ig_shape + 0.5 * static_cast<double>(n);
    const double scale = spec.ig_scale + 0.5 * ssr;
    sigma2 = scale / rng.gamma(shape);

    if (iter % config.thin == 0) {
      ++saved;
      if (saved > config.burn_in) {
        const Eigen::Index f = saved - config.burn_in - 1;
        out.coefficients.row(f) = beta.transpose();
        out.error_variance(f) = sigma2;
      }
    }
    if (progress) progress(iter, config.total_iterations);
  }
  return out;
}

namespace {

double draw_quantile(std::vector<double> values, double alpha) {
  std::sort(values.begin(), values.end());
  auto idx = static_cast<std::size_t>(alpha * static_cast<double>(values.size()));
  if (idx >= values.size()) idx = values.size() - 1;
  return values[idx];
}

CoefficientSummary summarize_one(const std::string& name,
                                 const std::vector<double>& values,
                                 double level) {
  CoefficientSummary s;
  s.name = name;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  const double alpha = (1.0 - level) / 2.0;
  s.lower = draw_quantile(values, alpha);
  s.upper = draw_quantile(values, 1.0 - alpha);
  return s;
}

}  // namespace

PosteriorSummary summarize_posterior(const PosteriorDraws& draws, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("summarize_posterior: level must lie in (0,1)");
  }
  if (draws.coefficients.rows() < 2) {
    throw ConfigError("summarize_posterior: need at least 2 draws");
  }
  PosteriorSummary out;
  out.level = level;
  for (Eigen::Index c = 0; c < draws.coefficients.cols(); ++c) {
    std::vector<double> values(static_cast<std::size_t>(draws.coefficients.rows()));
    for (Eigen::Index r = 0; r < draws.coefficients.rows(); ++r) {
      values[static_cast<std::size_t>(r)] = draws.coefficients(r, c);
    }
    out.coefficients.push_back(
        summarize_one(draws.names[static_cast<std::size_t>(c)], values, level));
  }
  std::vector<double> ev(static_cast<std::size_t>(draws.error_variance.size()));
  for (Eigen::Index r = 0; r < draws.error_variance.size(); ++r) {
    ev[static_cast<std::size_t>(r)] = draws.error_variance(r);
  }
  out.error_variance = summarize_one("error_variance", ev, level);
  return out;
}

}  // namespace copulimp
