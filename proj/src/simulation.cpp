#include "copulimp/simulation.hpp"

#include <cmath>
#include <numeric>

#include "copulimp/errors.hpp"
#include "copulimp/stat_kernels.hpp"

namespace copulimp {

namespace {
constexpr int kNumVars = 5;
}

void SimulationConfig::validate() const {
  if (units < 2) throw ConfigError("simulation: need at least 2 units");
  if (time_points < 2) throw ConfigError("simulation: need at least 2 time points");
  if (!(std::abs(rho) < 1.0)) throw ConfigError("simulation: |rho| must be below 1");
  if (!(eigen_lo > 0.0 && eigen_hi >= eigen_lo)) {
    throw ConfigError("simulation: eigenvalue range must be positive");
  }
  for (const auto& [lo, hi] : mean_ranges) {
    if (lo > hi) throw ConfigError("simulation: mean range lower bound above upper");
  }
}

void MissingnessConfig::validate(int n_targets) const {
  if (flat_probability) {
    if (!(*flat_probability >= 0.0 && *flat_probability < 1.0)) {
      throw ConfigError("missingness: flat probability must lie in [0,1)");
    }
    return;
  }
  if (!(offset >= 0.0 && offset < 1.0)) {
    throw ConfigError("missingness: offset must lie in [0,1)");
  }
  if (!donors.empty()) {
    if (static_cast<int>(donors.size()) != n_targets) {
      throw ConfigError("missingness: need one donor pair per target");
    }
    for (int j = 0; j < n_targets; ++j) {
      const auto& [d1, d2] = donors[static_cast<std::size_t>(j)];
      if (d1 == j || d2 == j) {
        throw ConfigError("missingness: donor index equals target index");
      }
      if (d1 < 0 || d1 >= n_targets || d2 < 0 || d2 >= n_targets) {
        throw ConfigError("missingness: donor index out of range");
      }
    }
  }
}

DataTable generate_panel(const SimulationConfig& config, Rng& rng) {
  config.validate();
  const int t = config.time_points;
  const int units = config.units;
  const std::size_t n = static_cast<std::size_t>(units) *
                        static_cast<std::size_t>(t);

  const Matrix sigma_var =
      random_covariance(kNumVars, config.eigen_lo, config.eigen_hi, rng);
  const Matrix sigma_toep = ar1_toeplitz(t, config.rho);
  const Matrix overall = kronecker(sigma_var, sigma_toep);
  Eigen::LLT<Matrix> llt(overall);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("generate_panel: overall covariance is not SPD");
  }
  const Matrix chol = llt.matrixL();

  std::vector<Column> cols(2 + kNumVars);
  cols[0].name = "unit";
  cols[0].kind = ColumnKind::UnitId;
  cols[1].name = "time";
  cols[1].kind = ColumnKind::TimeId;
  for (int v = 0; v < kNumVars; ++v) {
    cols[2 + v].name = "V" + std::to_string(v + 1);
    cols[2 + v].kind = v == kNumVars - 1 ? ColumnKind::Binary
                                         : ColumnKind::Continuous;
    cols[2 + v].values.assign(n, 0.0);
    cols[2 + v].missing.assign(n, 0);
  }

  for (int u = 0; u < units; ++u) {
    // Constant per-unit means, one per variable.
    std::array<double, kNumVars> means;
    for (int v = 0; v < kNumVars; ++v) {
      const auto& [lo, hi] = config.mean_ranges[static_cast<std::size_t>(v)];
      means[static_cast<std::size_t>(v)] = lo + rng.uniform() * (hi - lo);
    }
    Vector z(kNumVars * t);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    const Vector x = chol * z;  // index = variable * T + time
    for (int v = 0; v < kNumVars; ++v) {
      for (int s = 0; s < t; ++s) {
        const std::size_t row =
            static_cast<std::size_t>(u) * static_cast<std::size_t>(t) +
            static_cast<std::size_t>(s);
        cols[static_cast<std::size_t>(2 + v)].values[row] =
            means[static_cast<std::size_t>(v)] + x(v * t + s);
        if (v == 0) {
          cols[0].labels.push_back("u" + std::to_string(u + 1));
          cols[1].labels.push_back(std::to_string(s + 1));
        }
      }
    }
  }

  // V5 becomes a Bernoulli draw driven by standardized V1.
  const auto& v1 = cols[2].values;
  const double m1 =
      std::accumulate(v1.begin(), v1.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : v1) ss += (x - m1) * (x - m1);
  const double sd1 = std::sqrt(ss / static_cast<double>(n - 1));
  auto& v5 = cols[2 + kNumVars - 1].values;
  for (std::size_t i = 0; i < n; ++i) {
    v5[i] = rng.bernoulli(norm_cdf((v1[i] - m1) / sd1)) ? 1.0 : 0.0;
  }

  return DataTable(std::move(cols));
}

std::pair<DataTable, TruthRecord> inject_mar(const DataTable& table,
                                             const MissingnessConfig& config,
                                             Rng& rng) {
  const std::vector<std::size_t> targets = table.copula_columns();
  const int p = static_cast<int>(targets.size());
  config.validate(p);
  const std::size_t n = table.n_rows();

  // Missingness probabilities come from donor columns of the complete
  // table only; the target column's values are never read.
  std::vector<std::vector<double>> probs(
      targets.size(), std::vector<double>(n, 0.0));
  if (config.flat_probability) {
    for (auto& col : probs) col.assign(n, *config.flat_probability);
  } else {
    // Donor indices actually used per target.
    std::vector<std::pair<int, int>> donor_of(targets.size());
    std::vector<bool> used(targets.size(), false);
    for (int j = 0; j < p; ++j) {
      const auto pair = config.donors.empty()
                            ? std::pair<int, int>{(j + 1) % p, (j + 2) % p}
                            : config.donors[static_cast<std::size_t>(j)];
      donor_of[static_cast<std::size_t>(j)] = pair;
      used[static_cast<std::size_t>(pair.first)] = true;
      used[static_cast<std::size_t>(pair.second)] = true;
    }
    // z-scored donor columns through the normal CDF.
    std::vector<std::vector<double>> donor_cdf(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (!used[k]) continue;
      const Column& col = table.column(targets[k]);
      for (std::size_t i = 0; i < n; ++i) {
        if (col.missing[i]) {
          throw DataError("inject_mar: donor column \"" + col.name +
                          "\" has missing cells");
        }
      }
      double mean = 0.0;
      for (double v : col.values) mean += v;
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (double v : col.values) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      donor_cdf[k].resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        donor_cdf[k][i] = norm_cdf((col.values[i] - mean) / (sd > 0 ? sd : 1.0));
      }
    }
    for (int j = 0; j < p; ++j) {
      const auto [d1, d2] = donor_of[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < n; ++i) {
        const double mean_cdf = 0.5 * (donor_cdf[static_cast<std::size_t>(d1)][i] +
                                       donor_cdf[static_cast<std::size_t>(d2)][i]);
        probs[static_cast<std::size_t>(j)][i] =
            std::max(0.0, mean_cdf - config.offset);
      }
    }
  }

  std::vector<Column> cols = table.columns();
  TruthRecord truth;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const std::size_t j = targets[k];
    for (std::size_t i = 0; i < n; ++i) {
      if (cols[j].missing[i]) continue;  // already missing; nothing to delete
      if (rng.bernoulli(probs[k][i])) {
        truth.cells.push_back({i, j, cols[j].values[i]});
        cols[j].missing[i] = 1;
      }
    }
  }
  return {DataTable(std::move(cols)), std::move(truth)};
}

DataTable restore_truth(const DataTable& masked, const TruthRecord& truth) {
  std::vector<Column> cols = masked.columns();
  for (const auto& cell : truth.cells) {
    cols[cell.col].values[cell.row] = cell.value;
    cols[cell.col].missing[cell.row] = 0;
  }
  return DataTable(std::move(cols));
}

}  // namespace copulimp
