#include "copulimp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "copulimp/errors.hpp"

namespace copulimp {

namespace {

// Map from (row, table column) to the chain's missing-cell index.
std::unordered_map<std::uint64_t, std::size_t> cell_index(
    const ChainResult& chain) {
  std::unordered_map<std::uint64_t, std::size_t> idx;
  const auto& cells = chain.model().missing_cells();
  for (std::size_t m = 0; m < cells.size(); ++m) {
    const auto [i, k] = cells[m];
    const std::size_t j = chain.model().columns()[k];
    idx[(static_cast<std::uint64_t>(i) << 32) | j] = m;
  }
  return idx;
}

std::size_t lookup(const std::unordered_map<std::uint64_t, std::size_t>& idx,
                   const TruthCell& cell) {
  auto it = idx.find((static_cast<std::uint64_t>(cell.row) << 32) | cell.col);
  if (it == idx.end()) {
    throw DataError("truth coordinate (" + std::to_string(cell.row) + ", " +
                    std::to_string(cell.col) + ") has no imputation draws");
  }
  return it->second;
}

// Posterior mean / mode of one missing cell's draws.
double cell_point(const ChainResult& chain, std::size_t m, ColumnKind kind) {
  const auto f = chain.draws().rows();
  if (kind == ColumnKind::Continuous) {
    return chain.draws().col(static_cast<Eigen::Index>(m)).mean();
  }
  std::unordered_map<double, int> counts;
  double best = chain.draws()(0, static_cast<Eigen::Index>(m));
  int best_count = 0;
  for (Eigen::Index r = 0; r < f; ++r) {
    const double v = chain.draws()(r, static_cast<Eigen::Index>(m));
    const int c = ++counts[v];
    if (c > best_count || (c == best_count && v < best)) {
      best = v;
      best_count = c;
    }
  }
  return best;
}

}  // namespace

MetricsReport error_metrics(const TruthRecord& truth, const ChainResult& chain,
                            ErrorMode mode) {
  const auto idx = cell_index(chain);
  MetricsReport report;
  report.chain_seconds = chain.seconds();
  struct Acc {
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    std::size_t n = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& cell : truth.cells) {
    const Column& col = chain.model().table().column(cell.col);
    if (col.kind != ColumnKind::Continuous) continue;
    const std::size_t m = lookup(idx, cell);
    Acc& a = acc[col.name];
    if (mode == ErrorMode::AllDraws) {
      for (Eigen::Index f = 0; f < chain.draws().rows(); ++f) {
        const double e =
            chain.draws()(f, static_cast<Eigen::Index>(m)) - cell.value;
        a.abs_sum += std::abs(e);
        a.sq_sum += e * e;
        ++a.n;
      }
    } else {
      const double e = cell_point(chain, m, col.kind) - cell.value;
      a.abs_sum += std::abs(e);
      a.sq_sum += e * e;
      ++a.n;
    }
  }
  double mae_sum = 0.0;
  double rmse_sum = 0.0;
  for (const auto& [name, a] : acc) {
    VariableErrors v;
    v.n_cells = a.n;
    v.mae = a.abs_sum / static_cast<double>(a.n);
    v.rmse = std::sqrt(a.sq_sum / static_cast<double>(a.n));
    report.per_variable[name] = v;
    mae_sum += v.mae;
    rmse_sum += v.rmse;
  }
  if (!acc.empty()) {
    report.overall_mae = mae_sum / static_cast<double>(acc.size());
    report.overall_rmse = rmse_sum / static_cast<double>(acc.size());
  }
  return report;
}

double percent_correct(const TruthRecord& truth, const ChainResult& chain) {
  const auto idx = cell_index(chain);
  std::size_t total = 0;
  std::size_t correct = 0;
  for (const auto& cell : truth.cells) {
    const Column& col = chain.model().table().column(cell.col);
    if (col.kind == ColumnKind::Continuous) continue;
    const std::size_t m = lookup(idx, cell);
    ++total;
    if (cell_point(chain, m, col.kind) == cell.value) ++correct;
  }
  if (total == 0) {
    throw DataError("percent_correct: no binary/ordinal missing cells");
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

double mode_baseline(const TruthRecord& truth, const ChainResult& chain) {
  const DataTable& table = chain.model().table();
  std::size_t total = 0;
  std::size_t correct = 0;
  std::unordered_map<std::size_t, double> col_mode;
  for (const auto& cell : truth.cells) {
    const Column& col = table.column(cell.col);
    if (col.kind == ColumnKind::Continuous) continue;
    auto it = col_mode.find(cell.col);
    if (it == col_mode.end()) {
      std::map<double, std::size_t> counts;
      for (std::size_t i = 0; i < table.n_rows(); ++i) {
        if (!col.missing[i]) ++counts[col.values[i]];
      }
      double best = 0.0;
      std::size_t best_count = 0;
      for (const auto& [v, c] : counts) {
        if (c > best_count) {
          best = v;
          best_count = c;
        }
      }
      it = col_mode.emplace(cell.col, best).first;
    }
    ++total;
    if (it->second == cell.value) ++correct;
  }
  if (total == 0) {
    throw DataError("mode_baseline: no binary/ordinal missing cells");
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

double ci_coverage(const TruthRecord& truth, const ChainResult& chain,
                   double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("ci_coverage: level must lie in (0,1)");
  }
  if (chain.saved_frame_count() < 2) {
    throw ConfigError("ci_coverage: need at least 2 draws per cell");
  }
  const auto idx = cell_index(chain);
  const double alpha = (1.0 - level) / 2.0;
  const auto n_frames = chain.draws().rows();
  std::size_t covered = 0;
  for (const auto& cell : truth.cells) {
    const std::size_t m = lookup(idx, cell);
    std::vector<double> values(static_cast<std::size_t>(n_frames));
    for (Eigen::Index f = 0; f < n_frames; ++f) {
      values[static_cast<std::size_t>(f)] =
          chain.draws()(f, static_cast<Eigen::Index>(m));
    }
    std::sort(values.begin(), values.end());
    auto lo_idx = static_cast<std::size_t>(alpha * static_cast<double>(values.size()));
    auto hi_idx = static_cast<std::size_t>((1.0 - alpha) * static_cast<double>(values.size()));
    if (lo_idx >= values.size()) lo_idx = values.size() - 1;
    if (hi_idx >= values.size()) hi_idx = values.size() - 1;
    if (cell.value >= values[lo_idx] && cell.value <= values[hi_idx]) ++covered;
  }
  if (truth.cells.empty()) throw DataError("ci_coverage: no missing cells");
  return static_cast<double>(covered) / static_cast<double>(truth.cells.size());
}

MetricsReport evaluate(const TruthRecord& truth, const ChainResult& chain,
                       double level, ErrorMode mode) {
  MetricsReport report = error_metrics(truth, chain, mode);
  report.coverage_level = level;
  bool any_discrete = false;
  for (const auto& cell : truth.cells) {
    if (chain.model().table().column(cell.col).kind != ColumnKind::Continuous) {
      any_discrete = true;
      break;
    }
  }
  if (any_discrete) {
    report.percent_correct = percent_correct(truth, chain);
    report.mode_baseline_percent_correct = mode_baseline(truth, chain);
  }
  if (!truth.cells.empty()) {
    report.coverage = ci_coverage(truth, chain, level);
  }
  return report;
}

PooledEstimate rubin_pool(const std::vector<double>& estimates,
                          const std::vector<double>& variances) {
  if (estimates.size() < 2) throw ConfigError("rubin_pool: need m >= 2");
  if (estimates.size() != variances.size()) {
    throw ConfigError("rubin_pool: estimate/variance length mismatch");
  }
  const auto m = static_cast<double>(estimates.size());
  PooledEstimate out;
  out.m = estimates.size();
  for (double q : estimates) out.point += q;
  out.point /= m;
  for (double w : variances) out.within_variance += w;
  out.within_variance /= m;
  for (double q : estimates) {
    out.between_variance += (q - out.point) * (q - out.point);
  }
  out.between_variance /= m - 1.0;
  out.total_variance = out.within_variance + (1.0 + 1.0 / m) * out.between_variance;
  return out;
}

double time_chain(const std::function<void()>& runner) {
  const auto t0 = std::chrono::steady_clock::now();
  runner();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["overall_mae"] = report.overall_mae;
  j["overall_rmse"] = report.overall_rmse;
  if (report.percent_correct >= 0.0) {
    j["percent_correct"] = report.percent_correct;
    j["mode_baseline_percent_correct"] = report.mode_baseline_percent_correct;
  }
  if (report.coverage >= 0.0) j["coverage"] = report.coverage;
  j["coverage_level"] = report.coverage_level;
  j["chain_seconds"] = report.chain_seconds;
  j["units"] = report.units;
  j["time_points"] = report.time_points;
  j["rho"] = report.rho;
  nlohmann::json vars = nlohmann::json::object();
  for (const auto& [name, v] : report.per_variable) {
    vars[name] = {{"mae", v.mae}, {"rmse", v.rmse}, {"n_cells", v.n_cells}};
  }
  j["per_variable"] = vars;
  return j.dump(2);
}

std::string metrics_to_tidy_csv(const MetricsReport& report,
                                const std::string& dataset_id) {
  std::ostringstream out;
  auto row = [&](const std::string& variable, const std::string& metric,
                 double value) {
    out << dataset_id << ',' << variable << ',' << metric << ',' << value
        << '\n';
  };
  for (const auto& [name, v] : report.per_variable) {
    row(name, "mae", v.mae);
    row(name, "rmse", v.rmse);
  }
  row("_all", "mae", report.overall_mae);
  row("_all", "rmse", report.overall_rmse);
  if (report.percent_correct >= 0.0) {
    row("_all", "percent_correct", report.percent_correct);
    row("_all", "mode_baseline_percent_correct",
        report.mode_baseline_percent_correct);
  }
  if (report.coverage >= 0.0) row("_all", "coverage", report.coverage);
  row("_all", "chain_seconds", report.chain_seconds);
  return out.str();
}

}  // namespace copulimp
