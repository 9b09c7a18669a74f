#pragma once

#include <string>
#include <vector>

#include "copulimp/copula.hpp"

namespace copulimp {

// Conjugate Bayesian linear regression with copula imputation supplied
// at the point of need: each Gibbs iteration refreshes missing cells
// from the copula chain's current state before the parameter updates.
struct RegressionSpec {
  std::string outcome;
  std::vector<std::string> predictors;
  bool intercept = true;
  // Coefficient prior N(0, prior_precision^-1 I); error variance
  // InverseGamma(shape, scale).
  double prior_precision = 1e-4;
  double ig_shape = 0.01;
  double ig_scale = 0.01;

  void validate(const DataTable& table) const;
};

struct PosteriorDraws {
  std::vector<std::string> names;  // intercept first when present
  Matrix coefficients;             // draws x parameters
  Vector error_variance;           // draws, all > 0
  int total_iterations = 0;
  int thin = 1;
  int burn_in = 0;
};

struct CoefficientSummary {
  std::string name;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct PosteriorSummary {
  double level = 0.95;
  std::vector<CoefficientSummary> coefficients;
  CoefficientSummary error_variance;
};

PosteriorDraws gibbs_regress(const DataTable& table, const RegressionSpec& spec,
                             const ChainConfig& config,
                             const ProgressSink& progress = {});

PosteriorSummary summarize_posterior(const PosteriorDraws& draws, double level);

}  // namespace copulimp
