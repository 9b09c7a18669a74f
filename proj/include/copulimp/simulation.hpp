#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "copulimp/data_table.hpp"
#include "copulimp/rng.hpp"

namespace copulimp {

// Synthetic panel: five variables (V1..V4 continuous, V5 binary) over
// `units` units and `time_points` periods. Per-unit covariance is the
// Kronecker product of a random 5x5 covariance with an AR(1) Toeplitz
// structure over time.
struct SimulationConfig {
  int units = 120;
  int time_points = 20;
  double rho = 0.85;
  // Uniform bounds for the per-unit constant means of V1..V5.
  std::array<std::pair<double, double>, 5> mean_ranges{{
      {0.0, 1.0}, {0.0, 100.0}, {-20.0, 20.0}, {-500.0, 500.0}, {0.0, 1.0}}};
  double eigen_lo = 0.1;
  double eigen_hi = 10.0;

  void validate() const;  // ConfigError on violation
};

struct MissingnessConfig {
  // MAR mode: target j goes missing with probability
  // max(0, mean(Phi(z donor1), Phi(z donor2)) - offset); donors default
  // to (j+1, j+2) modulo the data columns.
  double offset = 0.3;
  // Per-target donor pairs, indices into the data columns; empty ->
  // the modular default.
  std::vector<std::pair<int, int>> donors;
  // Replication mode: flat Bernoulli probability applied to every cell.
  std::optional<double> flat_probability;

  void validate(int n_targets) const;
};

struct TruthCell {
  std::size_t row;
  std::size_t col;  // table column index
  double value;
};

struct TruthRecord {
  std::vector<TruthCell> cells;
};

DataTable generate_panel(const SimulationConfig& config, Rng& rng);

// Masks cells of the data columns only; identifiers are never touched.
// Returns the masked table and the true value of every masked cell.
std::pair<DataTable, TruthRecord> inject_mar(const DataTable& table,
                                             const MissingnessConfig& config,
                                             Rng& rng);

// Restores recorded truths; inverse of inject_mar.
DataTable restore_truth(const DataTable& masked, const TruthRecord& truth);

}  // namespace copulimp
