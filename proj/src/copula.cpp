#include "copulimp/copula.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <Eigen/Eigenvalues>

#include "copulimp/errors.hpp"

namespace copulimp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCondThreshold = 1e12;
}

CopulaModel::CopulaModel(const DataTable& table) : table_(table) {
  columns_ = table_.copula_columns();
  if (columns_.empty()) throw DataError("table has no copula columns");
  ranks_.reserve(columns_.size());
  marginals_.reserve(columns_.size());
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    const std::size_t j = columns_[k];
    ranks_.push_back(compute_ranks(table_, j));
    std::vector<double> observed;
    const Column& col = table_.column(j);
    for (std::size_t i = 0; i < table_.n_rows(); ++i) {
      if (!col.missing[i]) observed.push_back(col.values[i]);
    }
    marginals_.push_back(ecdf_build(observed));
    for (std::size_t i = 0; i < table_.n_rows(); ++i) {
      if (col.missing[i]) missing_cells_.emplace_back(i, k);
    }
  }
}

void ChainConfig::validate(std::size_t p) const {
  if (thin < 1) throw ConfigError("chain config: thin must be >= 1");
  if (burn_in < 0) throw ConfigError("chain config: burn-in must be >= 0");
  if (total_iterations / thin - burn_in < 1) {
    throw ConfigError("chain config: total/thin - burn_in must be >= 1");
  }
  const double nu0 = effective_prior_df(p);
  if (!(nu0 > static_cast<double>(p) + 1.0)) {
    throw ConfigError("chain config: prior df must exceed p + 1");
  }
  if (prior_scale.size() != 0 &&
      (prior_scale.rows() != static_cast<Eigen::Index>(p) ||
       !is_spd(prior_scale))) {
    throw ConfigError("chain config: prior scale must be SPD p x p");
  }
}

Matrix ChainConfig::effective_prior_scale(std::size_t p) const {
  if (prior_scale.size() != 0) return prior_scale;
  const auto n = static_cast<Eigen::Index>(p);
  return effective_prior_df(p) * Matrix::Identity(n, n);
}

DataTable ChainResult::frame(std::size_t f) const {
  DataTable out = model_.table();
  const auto& cells = model_.missing_cells();
  std::vector<Column> cols = out.columns();
  for (std::size_t m = 0; m < cells.size(); ++m) {
    const auto [i, k] = cells[m];
    const std::size_t j = model_.columns()[k];
    cols[j].values[i] = draws_(static_cast<Eigen::Index>(f),
                               static_cast<Eigen::Index>(m));
    cols[j].missing[i] = 0;
  }
  return DataTable(std::move(cols));
}

ConditionalParams conditional_params(const Matrix& c, std::size_t j) {
  const auto p = c.rows();
  if (p < 2) {
    // Single column: nothing to condition on.
    return ConditionalParams{Vector(0), 1.0};
  }
  Matrix sub(p - 1, p - 1);
  Vector cj(p - 1);
  for (Eigen::Index r = 0, rr = 0; r < p; ++r) {
    if (r == static_cast<Eigen::Index>(j)) continue;
    cj(rr) = c(r, static_cast<Eigen::Index>(j));
    for (Eigen::Index s = 0, ss = 0; s < p; ++s) {
      if (s == static_cast<Eigen::Index>(j)) continue;
      sub(rr, ss) = c(r, s);
      ++ss;
    }
    ++rr;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sub, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > kCondThreshold) {
    throw NumericalError("conditional_params: near-singular correlation block");
  }
  Eigen::LLT<Matrix> llt(sub);
  Vector coef = llt.solve(cj);
  double var = 1.0 - cj.dot(coef);
  if (!(var > 0.0)) {
    throw NumericalError("conditional_params: nonpositive residual variance");
  }
  if (var > 1.0) var = 1.0;
  return ConditionalParams{std::move(coef), var};
}

LatentState init_state(const CopulaModel& model) {
  const auto n = static_cast<Eigen::Index>(model.n());
  const auto p = static_cast<Eigen::Index>(model.p());
  LatentState state;
  state.z = Matrix::Zero(n, p);
  state.c = Matrix::Identity(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const ColumnRanks& ranks = model.ranks(static_cast<std::size_t>(k));
    const std::size_t n_obs = ranks.n_observed;
    // Count per level, then mid-rank of each tie group.
    std::vector<std::size_t> count(ranks.distinct.size(), 0);
    for (int lvl : ranks.level) {
      if (lvl >= 0) ++count[static_cast<std::size_t>(lvl)];
    }
    std::vector<double> midrank(count.size());
    std::size_t before = 0;
    for (std::size_t l = 0; l < count.size(); ++l) {
      midrank[l] = static_cast<double>(before) +
                   (static_cast<double>(count[l]) + 1.0) / 2.0;
      before += count[l];
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const int lvl = ranks.level[static_cast<std::size_t>(i)];
      if (lvl < 0) continue;
      const double u = midrank[static_cast<std::size_t>(lvl)] /
                       (static_cast<double>(n_obs) + 1.0);
      state.z(i, k) = norm_quantile(u);
    }
  }
  return state;
}

namespace {

// Applies the ridge guard when C is near-singular, renormalizing back
// to unit diagonal.
void guard_conditioning(Matrix& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (lmin > 0.0 && lmax / lmin <= kCondThreshold) return;
  c.diagonal().array() += 1e-8;
  Vector d = c.diagonal().array().rsqrt();
  c = d.asDiagonal() * c * d.asDiagonal();
}

// Current latent values of one column's observed cells, grouped by
// rank level. Supports O(log n) bound queries and updates under the
// rank-consistency invariant, where the truncation interval of a cell
// at level l is (max of level l-1, min of level l+1).
class LevelSets {
 public:
  LevelSets(const ColumnRanks& ranks, const Matrix& z, Eigen::Index k)
      : sets_(ranks.distinct.size()) {
    for (std::size_t i = 0; i < ranks.level.size(); ++i) {
      const int lvl = ranks.level[i];
      if (lvl >= 0) {
        sets_[static_cast<std::size_t>(lvl)].insert(
            z(static_cast<Eigen::Index>(i), k));
      }
    }
  }

  double lower_bound(int lvl) const {
    return lvl == 0 ? -kInf : *sets_[static_cast<std::size_t>(lvl) - 1].rbegin();
  }
  double upper_bound(int lvl) const {
    return static_cast<std::size_t>(lvl) + 1 == sets_.size()
               ? kInf
               : *sets_[static_cast<std::size_t>(lvl) + 1].begin();
  }
  void replace(int lvl, double old_value, double new_value) {
    auto& s = sets_[static_cast<std::size_t>(lvl)];
    s.erase(s.find(old_value));
    s.insert(new_value);
  }

 private:
  std::vector<std::multiset<double>> sets_;
};

}  // namespace

void sweep_latent(LatentState& state, const CopulaModel& model, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(model.n());
  const auto p = static_cast<Eigen::Index>(model.p());
  guard_conditioning(state.c);
  for (Eigen::Index k = 0; k < p; ++k) {
    const ConditionalParams params =
        conditional_params(state.c, static_cast<std::size_t>(k));
    const double sd = std::sqrt(params.resid_var);
    // Conditional means for the whole column at once; cell (i,k) never
    // enters its own conditional, so updates within the column do not
    // invalidate them.
    Vector w = Vector::Zero(p);
    for (Eigen::Index l = 0, ll = 0; l < p; ++l) {
      if (l == k) continue;
      w(l) = params.coef(ll++);
    }
    const Vector mean = state.z * w;

    const ColumnRanks& ranks = model.ranks(static_cast<std::size_t>(k));
    LevelSets levels(ranks, state.z, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int lvl = ranks.level[static_cast<std::size_t>(i)];
      if (lvl < 0) {
        state.z(i, k) = mean(i) + sd * rng.normal();
      } else {
        const double lo = levels.lower_bound(lvl);
        const double hi = levels.upper_bound(lvl);
        const double z = sample_truncnorm(mean(i), sd, lo, hi, rng);
        levels.replace(lvl, state.z(i, k), z);
        state.z(i, k) = z;
      }
    }
  }
  ++state.iteration;
}

void update_correlation(LatentState& state, const CopulaModel& model,
                        const ChainConfig& config, Rng& rng) {
  const std::size_t p = model.p();
  const double df = config.effective_prior_df(p) + static_cast<double>(model.n());
  Matrix s = config.effective_prior_scale(p) + state.z.transpose() * state.z;
  s = 0.5 * (s + s.transpose());
  Matrix sigma = sample_inverse_wishart(df, s, rng);
  Vector d = sigma.diagonal().array().rsqrt();
  Matrix c = d.asDiagonal() * sigma * d.asDiagonal();
  c.diagonal().setOnes();
  state.c = 0.5 * (c + c.transpose());
}

DataTable impute_frame(const LatentState& state, const CopulaModel& model) {
  DataTable out = model.table();
  std::vector<Column> cols = out.columns();
  for (const auto& [i, k] : model.missing_cells()) {
    const std::size_t j = model.columns()[k];
    const double u = norm_cdf(state.z(static_cast<Eigen::Index>(i),
                                      static_cast<Eigen::Index>(k)));
    cols[j].values[i] = ecdf_quantile(model.marginal(k), u);
    cols[j].missing[i] = 0;
  }
  return DataTable(std::move(cols));
}

ChainResult run_chain(const DataTable& table, const ChainConfig& config,
                      const ProgressSink& progress) {
  CopulaModel model(table);
  config.validate(model.p());

  const auto t0 = std::chrono::steady_clock::now();
  LatentState state = init_state(model);
  Rng rng(config.seed);

  const std::size_t n_miss = model.missing_cells().size();
  const int n_frames = config.saved_frames();
  Matrix draws(n_frames, static_cast<Eigen::Index>(n_miss));
  std::vector<Matrix> c_draws;
  c_draws.reserve(static_cast<std::size_t>(n_frames));

  int saved = 0;
  for (int iter = 1; iter <= config.total_iterations; ++iter) {
    try {
      sweep_latent(state, model, rng);
      update_correlation(state, model, config, rng);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (iteration " +
                           std::to_string(iter) + ")");
    }
    if (iter % config.thin == 0) {
      ++saved;
      if (saved > config.burn_in) {
        const Eigen::Index f = saved - config.burn_in - 1;
        for (std::size_t m = 0; m < n_miss; ++m) {
          const auto [i, k] = model.missing_cells()[m];
          const double u = norm_cdf(state.z(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(k)));
          draws(f, static_cast<Eigen::Index>(m)) =
              ecdf_quantile(model.marginal(k), u);
        }
        c_draws.push_back(state.c);
      }
    }
    if (progress) progress(iter, config.total_iterations);
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(t1 - t0).count();
  return ChainResult(std::move(model), std::move(draws), std::move(c_draws),
                     seconds);
}

namespace {

double sorted_quantile(std::vector<double>& values, double alpha) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto idx = static_cast<std::size_t>(alpha * static_cast<double>(n));
  if (idx >= n) idx = n - 1;
  return values[idx];
}

double mode_of(const std::vector<double>& values) {
  std::map<double, std::size_t> counts;
  for (double v : values) ++counts[v];
  double best = values.front();
  std::size_t best_count = 0;
  for (const auto& [v, c] : counts) {
    if (c > best_count) {
      best = v;
      best_count = c;
    }
  }
  return best;
}

}  // namespace

ImputationSummary summarize(const ChainResult& chain, double level,
                            bool round_ordinal) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("summarize: level must lie in (0,1)");
  }
  if (chain.saved_frame_count() < 2) {
    throw ConfigError("summarize: need at least 2 saved frames");
  }
  const CopulaModel& model = chain.model();
  ImputationSummary out;
  out.level = level;
  const double alpha = (1.0 - level) / 2.0;
  const auto& cells = model.missing_cells();
  for (std::size_t m = 0; m < cells.size(); ++m) {
    const auto [i, k] = cells[m];
    const std::size_t j = model.columns()[k];
    const ColumnKind kind = model.table().column(j).kind;
    std::vector<double> values(chain.saved_frame_count());
    for (std::size_t f = 0; f < values.size(); ++f) {
      values[f] = chain.draws()(static_cast<Eigen::Index>(f),
                                static_cast<Eigen::Index>(m));
    }
    CellSummary cell;
    cell.row = i;
    cell.col = j;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (kind == ColumnKind::Continuous) {
      cell.point = mean;
    } else if (round_ordinal) {
      // Draw-averaged value snapped to the nearest support level.
      const auto& support = model.marginal(k).support;
      auto it = std::lower_bound(support.begin(), support.end(), mean);
      double best = it == support.end() ? support.back() : *it;
      if (it != support.begin() &&
          std::abs(*(it - 1) - mean) < std::abs(best - mean)) {
        best = *(it - 1);
      }
      cell.point = best;
    } else {
      cell.point = mode_of(values);
    }
    std::vector<double> tmp = values;
    cell.lower = sorted_quantile(tmp, alpha);
    cell.upper = sorted_quantile(tmp, 1.0 - alpha);
    out.cells.push_back(cell);
  }
  return out;
}

}  // namespace copulimp
