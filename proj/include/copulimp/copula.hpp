#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "copulimp/data_table.hpp"
#include "copulimp/stat_kernels.hpp"

namespace copulimp {

// Rank constraints and empirical marginals for every copula column of
// one table, precomputed once per chain.
class CopulaModel {
 public:
  explicit CopulaModel(const DataTable& table);

  const DataTable& table() const { return table_; }
  const std::vector<std::size_t>& columns() const { return columns_; }
  std::size_t n() const { return table_.n_rows(); }
  std::size_t p() const { return columns_.size(); }

  const ColumnRanks& ranks(std::size_t k) const { return ranks_[k]; }
  const EmpiricalMarginal& marginal(std::size_t k) const { return marginals_[k]; }

  // Missing cells over copula columns, column-major then row order.
  const std::vector<std::pair<std::size_t, std::size_t>>& missing_cells() const {
    return missing_cells_;  // (row, copula-column index k)
  }

 private:
  DataTable table_;
  std::vector<std::size_t> columns_;
  std::vector<ColumnRanks> ranks_;
  std::vector<EmpiricalMarginal> marginals_;
  std::vector<std::pair<std::size_t, std::size_t>> missing_cells_;
};

struct LatentState {
  Matrix z;        // n x p latent Gaussian scores
  Matrix c;        // p x p correlation matrix
  int iteration = 0;
};

struct ChainConfig {
  int total_iterations = 3000;
  int thin = 3;
  int burn_in = 500;  // discarded saved frames
  std::uint64_t seed = 0;
  double prior_df = 0.0;   // 0 -> p + 2
  Matrix prior_scale;      // empty -> prior_df * I

  // Throws ConfigError unless thin >= 1 and total/thin - burn_in >= 1.
  void validate(std::size_t p) const;
  int saved_frames() const { return total_iterations / thin - burn_in; }
  double effective_prior_df(std::size_t p) const {
    return prior_df > 0.0 ? prior_df : static_cast<double>(p) + 2.0;
  }
  Matrix effective_prior_scale(std::size_t p) const;
};

// Saved output of one chain. Full frames are reconstructed on demand
// from the observed table plus the per-cell draw matrix, so observed
// cells are identical to the input by construction.
class ChainResult {
 public:
  ChainResult(CopulaModel model, Matrix draws, std::vector<Matrix> c_draws,
              double seconds)
      : model_(std::move(model)), draws_(std::move(draws)),
        c_draws_(std::move(c_draws)), seconds_(seconds) {}

  const CopulaModel& model() const { return model_; }
  std::size_t saved_frame_count() const { return static_cast<std::size_t>(draws_.rows()); }

  // saved_frame_count x missing_cells matrix of imputed values.
  const Matrix& draws() const { return draws_; }
  const std::vector<Matrix>& correlation_draws() const { return c_draws_; }
  double seconds() const { return seconds_; }

  // Completed table for saved frame f: zero MISSING cells.
  DataTable frame(std::size_t f) const;

 private:
  CopulaModel model_;
  Matrix draws_;
  std::vector<Matrix> c_draws_;
  double seconds_;
};

struct CellSummary {
  std::size_t row = 0;
  std::size_t col = 0;  // table column index
  double point = 0.0;   // posterior mean (continuous) or mode (ordinal/binary)
  double lower = 0.0;
  double upper = 0.0;
};

struct ImputationSummary {
  double level = 0.95;
  std::vector<CellSummary> cells;
};

struct ConditionalParams {
  Vector coef;       // over columns != j, in column order
  double resid_var;  // in (0, 1]
};

// Regression of column j on the rest under correlation C. Adds a 1e-8
// ridge and renormalizes when C's condition number exceeds 1e12.
ConditionalParams conditional_params(const Matrix& c, std::size_t j);

// Z from scaled mid-ranks of the observed cells, zeros for missing,
// C = identity.
LatentState init_state(const CopulaModel& model);

// One Gibbs scan over every cell: column-major, row order ascending.
// Observed cells are truncated to the interval spanned by the latent
// values of strictly lower / strictly higher rank levels; missing cells
// are drawn untruncated.
void sweep_latent(LatentState& state, const CopulaModel& model, Rng& rng);

// Sigma ~ InverseWishart(nu0 + n, S0 + Z^T Z) rescaled to unit diagonal.
void update_correlation(LatentState& state, const CopulaModel& model,
                        const ChainConfig& config, Rng& rng);

// Observed cells verbatim; missing cell (i,j) filled with
// ecdf_quantile(marginal_j, norm_cdf(Z[i,j])).
DataTable impute_frame(const LatentState& state, const CopulaModel& model);

using ProgressSink = std::function<void(int iteration, int total)>;

ChainResult run_chain(const DataTable& table, const ChainConfig& config,
                      const ProgressSink& progress = {});

// Per missing cell point + equal-tailed interval at `level`. Ordinal
// and binary cells report the posterior mode; `round_ordinal` snaps
// continuous means of ordinal columns to the nearest support level
// (off by default).
ImputationSummary summarize(const ChainResult& chain, double level,
                            bool round_ordinal = false);

}  // namespace copulimp
