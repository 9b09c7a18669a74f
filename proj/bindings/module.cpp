// Python bindings over the main library operations: impute, simulate,
// evaluate, pool, regress, and the core statistical kernels. Tables
// cross the boundary as a value matrix plus a boolean missing mask.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "copulimp/copula.hpp"
#include "copulimp/errors.hpp"
#include "copulimp/embedded_bayes.hpp"
#include "copulimp/evaluation.hpp"
#include "copulimp/simulation.hpp"
#include "copulimp/stat_kernels.hpp"

namespace py = pybind11;
using namespace copulimp;

namespace {

DataTable table_from_arrays(const Matrix& values,
                            const Eigen::Matrix<bool, Eigen::Dynamic,
                                                Eigen::Dynamic>& missing,
                            const std::vector<std::string>& names,
                            const std::vector<std::string>& kinds) {
  if (values.rows() != missing.rows() || values.cols() != missing.cols()) {
    throw DataError("values and missing mask must share a shape");
  }
  const auto p = static_cast<std::size_t>(values.cols());
  if (names.size() != p || kinds.size() != p) {
    throw DataError("need one name and one kind per column");
  }
  std::vector<Column> cols(p);
  for (std::size_t j = 0; j < p; ++j) {
    cols[j].name = names[j];
    cols[j].kind = column_kind_from_string(kinds[j]);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const bool miss = missing(i, static_cast<Eigen::Index>(j));
      cols[j].values.push_back(miss ? 0.0
                                    : values(i, static_cast<Eigen::Index>(j)));
      cols[j].missing.push_back(miss);
      if (!is_copula_kind(cols[j].kind)) {
        cols[j].labels.push_back(
            std::to_string(values(i, static_cast<Eigen::Index>(j))));
      }
    }
  }
  return DataTable(std::move(cols));
}

ChainConfig chain_config(int iters, int thin, int burnin, std::uint64_t seed) {
  ChainConfig config;
  config.total_iterations = iters;
  config.thin = thin;
  config.burn_in = burnin;
  config.seed = seed;
  return config;
}

py::dict chain_to_dict(const ChainResult& chain, double level) {
  py::dict out;
  out["draws"] = chain.draws();
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (const auto& [i, k] : chain.model().missing_cells()) {
    cells.emplace_back(i, chain.model().columns()[k]);
  }
  out["cells"] = cells;
  out["correlation"] = chain.correlation_draws();
  out["seconds"] = chain.seconds();
  const ImputationSummary summary = summarize(chain, level);
  std::vector<py::tuple> rows;
  for (const auto& cell : summary.cells) {
    rows.push_back(
        py::make_tuple(cell.row, cell.col, cell.point, cell.lower, cell.upper));
  }
  out["summary"] = rows;
  return out;
}

}  // namespace

PYBIND11_MODULE(copulimp_py, m) {
  m.doc() = "Semiparametric Gaussian-copula multiple imputation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);

  m.def("norm_cdf", &norm_cdf, py::arg("x"));
  m.def("norm_quantile", &norm_quantile, py::arg("u"));

  m.def(
      "impute",
      [](const Matrix& values,
         const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& missing,
         const std::vector<std::string>& names,
         const std::vector<std::string>& kinds, int iters, int thin,
         int burnin, std::uint64_t seed, double level) {
        const DataTable table = table_from_arrays(values, missing, names, kinds);
        const ChainResult chain =
            run_chain(table, chain_config(iters, thin, burnin, seed));
        return chain_to_dict(chain, level);
      },
      py::arg("values"), py::arg("missing"), py::arg("names"),
      py::arg("kinds"), py::arg("iters") = 3000, py::arg("thin") = 3,
      py::arg("burnin") = 500, py::arg("seed") = 0, py::arg("level") = 0.95,
      "Run the Gibbs imputation chain; returns draws, cell coordinates, "
      "correlation draws and per-cell summaries.");

  m.def(
      "simulate",
      [](int units, int time_points, double rho, std::uint64_t seed,
         double offset, std::optional<double> flat_probability) {
        SimulationConfig sim;
        sim.units = units;
        sim.time_points = time_points;
        sim.rho = rho;
        MissingnessConfig miss;
        miss.offset = offset;
        miss.flat_probability = flat_probability;
        Rng rng(seed);
        const DataTable complete = generate_panel(sim, rng);
        const auto [masked, truth] = inject_mar(complete, miss, rng);

        const auto data_cols = complete.copula_columns();
        const auto n = static_cast<Eigen::Index>(complete.n_rows());
        const auto p = static_cast<Eigen::Index>(data_cols.size());
        Matrix full(n, p);
        Matrix holes(n, p);
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(n, p);
        std::vector<std::string> names;
        for (Eigen::Index c = 0; c < p; ++c) {
          const std::size_t j = data_cols[static_cast<std::size_t>(c)];
          names.push_back(complete.column(j).name);
          for (Eigen::Index i = 0; i < n; ++i) {
            full(i, c) = complete.value(static_cast<std::size_t>(i), j);
            const bool miss_cell = masked.is_missing(static_cast<std::size_t>(i), j);
            mask(i, c) = miss_cell;
            holes(i, c) = miss_cell
                              ? std::numeric_limits<double>::quiet_NaN()
                              : full(i, c);
          }
        }
        std::vector<py::tuple> truth_cells;
        for (const auto& cell : truth.cells) {
          // Report data-column coordinates, matching the arrays above.
          const auto it =
              std::find(data_cols.begin(), data_cols.end(), cell.col);
          truth_cells.push_back(py::make_tuple(
              cell.row, it - data_cols.begin(), cell.value));
        }
        py::dict out;
        out["names"] = names;
        out["complete"] = full;
        out["masked"] = holes;
        out["missing"] = mask;
        out["truth"] = truth_cells;
        return out;
      },
      py::arg("units") = 120, py::arg("time_points") = 20,
      py::arg("rho") = 0.85, py::arg("seed") = 0, py::arg("offset") = 0.3,
      py::arg("flat_probability") = std::nullopt,
      "Generate a synthetic panel and inject MAR missingness.");

  m.def(
      "rubin_pool",
      [](const std::vector<double>& estimates,
         const std::vector<double>& variances) {
        const PooledEstimate p = rubin_pool(estimates, variances);
        py::dict out;
        out["point"] = p.point;
        out["within_variance"] = p.within_variance;
        out["between_variance"] = p.between_variance;
        out["total_variance"] = p.total_variance;
        out["m"] = p.m;
        return out;
      },
      py::arg("estimates"), py::arg("variances"));

  m.def(
      "regress",
      [](const Matrix& values,
         const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& missing,
         const std::vector<std::string>& names,
         const std::vector<std::string>& kinds, const std::string& outcome,
         const std::vector<std::string>& predictors, int iters, int thin,
         int burnin, std::uint64_t seed, double level) {
        const DataTable table = table_from_arrays(values, missing, names, kinds);
        RegressionSpec spec;
        spec.outcome = outcome;
        spec.predictors = predictors;
        const PosteriorDraws draws = gibbs_regress(
            table, spec, chain_config(iters, thin, burnin, seed));
        const PosteriorSummary summary = summarize_posterior(draws, level);
        py::dict out;
        out["names"] = draws.names;
        out["coefficients"] = draws.coefficients;
        out["error_variance"] = draws.error_variance;
        std::vector<py::tuple> rows;
        for (const auto& c : summary.coefficients) {
          rows.push_back(py::make_tuple(c.name, c.mean, c.lower, c.upper));
        }
        out["summary"] = rows;
        return out;
      },
      py::arg("values"), py::arg("missing"), py::arg("names"),
      py::arg("kinds"), py::arg("outcome"), py::arg("predictors"),
      py::arg("iters") = 10000, py::arg("thin") = 10, py::arg("burnin") = 100,
      py::arg("seed") = 0, py::arg("level") = 0.95,
      "Conjugate Bayesian regression with point-of-need imputation.");
}
