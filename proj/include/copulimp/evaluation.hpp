#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "copulimp/copula.hpp"
#include "copulimp/simulation.hpp"

namespace copulimp {

struct VariableErrors {
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t n_cells = 0;
};

struct MetricsReport {
  // Continuous variables only.
  std::map<std::string, VariableErrors> per_variable;
  double overall_mae = 0.0;   // unweighted mean of per-variable values
  double overall_rmse = 0.0;
  // Binary/ordinal cells; negative when no such cells exist.
  double percent_correct = -1.0;
  double mode_baseline_percent_correct = -1.0;
  double coverage = -1.0;
  double coverage_level = 0.95;
  double chain_seconds = 0.0;
  int units = 0;
  int time_points = 0;
  double rho = 0.0;
};

// Which imputed value enters the error: every saved draw, or the
// summary point per cell.
enum class ErrorMode { AllDraws, SummaryPoint };

// MAE/RMSE of imputations against recorded truth, continuous columns
// only. Throws DataError when a truth coordinate has no draws.
MetricsReport error_metrics(const TruthRecord& truth, const ChainResult& chain,
                            ErrorMode mode);

// Fraction of binary/ordinal missing cells whose posterior mode equals
// the truth exactly. Throws DataError when no such cells exist.
double percent_correct(const TruthRecord& truth, const ChainResult& chain);

// Marginal-mode baseline on the same cells: impute every cell with the
// column's most frequent observed value.
double mode_baseline(const TruthRecord& truth, const ChainResult& chain);

// Fraction of missing cells whose truth lies inside the equal-tailed
// credible interval of that cell's draws.
double ci_coverage(const TruthRecord& truth, const ChainResult& chain,
                   double level);

// Full report for one imputed-vs-truth comparison.
MetricsReport evaluate(const TruthRecord& truth, const ChainResult& chain,
                       double level, ErrorMode mode = ErrorMode::SummaryPoint);

struct PooledEstimate {
  double point = 0.0;           // mean of the m estimates
  double within_variance = 0.0;
  double between_variance = 0.0;
  double total_variance = 0.0;  // W + (1 + 1/m) B
  std::size_t m = 0;
};

// Rubin's rules. Throws ConfigError for m < 2 or mismatched lengths.
PooledEstimate rubin_pool(const std::vector<double>& estimates,
                          const std::vector<double>& variances);

// Monotone-clock duration of the wrapped runner, in seconds.
double time_chain(const std::function<void()>& runner);

std::string metrics_to_json(const MetricsReport& report);
// Tidy rows (dataset, variable, metric, value), one line per metric.
std::string metrics_to_tidy_csv(const MetricsReport& report,
                                const std::string& dataset_id);

}  // namespace copulimp
