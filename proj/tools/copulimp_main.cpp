// Command-line front-end: impute, simulate, evaluate, benchmark, regress.
// Every run is seed-deterministic and records a manifest sufficient to
// reproduce it.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "copulimp/copula.hpp"
#include "copulimp/csv.hpp"
#include "copulimp/embedded_bayes.hpp"
#include "copulimp/errors.hpp"
#include "copulimp/evaluation.hpp"
#include "copulimp/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace copulimp;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

// Layered output root: flag > COPULIMP_OUT_ROOT > current directory.
fs::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("COPULIMP_OUT_ROOT")) return env;
  return ".";
}

struct ChainFlags {
  int iters = 3000;
  int thin = 3;
  int burnin = 500;
  std::uint64_t seed = 0;

  ChainConfig to_config() const {
    ChainConfig cfg;
    cfg.total_iterations = iters;
    cfg.thin = thin;
    cfg.burn_in = burnin;
    cfg.seed = seed;
    return cfg;
  }
};

void add_chain_flags(CLI::App* cmd, ChainFlags& flags) {
  cmd->add_option("--iters", flags.iters, "Total Gibbs iterations");
  cmd->add_option("--thin", flags.thin, "Save every thin-th iteration");
  cmd->add_option("--burnin", flags.burnin, "Saved frames to discard");
  cmd->add_option("--seed", flags.seed, "Root RNG seed");
}

ProgressSink make_progress(bool quiet, const std::string& label) {
  if (quiet) return {};
  return [label](int iter, int total) {
    if (iter % 100 == 0 || iter == total) {
      std::cerr << label << ": iteration " << iter << "/" << total << "\n";
    }
  };
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const json& config, std::uint64_t seed,
                    const std::string& started,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json m;
  m["subcommand"] = subcommand;
  m["config"] = config;
  m["seed"] = seed;
  m["started"] = started;
  m["finished"] = iso_now();
  m["version"] = kVersion;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << "\n";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_draws_long(const ChainResult& chain, const fs::path& path) {
  std::ofstream out(path);
  out << "frame,row,column,value\n";
  const auto& model = chain.model();
  for (std::size_t f = 0; f < chain.saved_frame_count(); ++f) {
    for (std::size_t m = 0; m < model.missing_cells().size(); ++m) {
      const auto [i, k] = model.missing_cells()[m];
      out << f << ',' << i << ',' << model.table().column(model.columns()[k]).name
          << ',' << fmt(chain.draws()(static_cast<Eigen::Index>(f),
                                      static_cast<Eigen::Index>(m)))
          << '\n';
    }
  }
}

void write_correlation_draws(const ChainResult& chain, const fs::path& path) {
  std::ofstream out(path);
  out << "frame,i,j,value\n";
  for (std::size_t f = 0; f < chain.correlation_draws().size(); ++f) {
    const Matrix& c = chain.correlation_draws()[f];
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        out << f << ',' << i << ',' << j << ',' << fmt(c(i, j)) << '\n';
      }
    }
  }
}

void write_summary_csv(const ImputationSummary& summary, const DataTable& table,
                       const fs::path& path) {
  std::ofstream out(path);
  out << "row,column,point,lower,upper\n";
  for (const auto& cell : summary.cells) {
    out << cell.row << ',' << table.column(cell.col).name << ','
        << fmt(cell.point) << ',' << fmt(cell.lower) << ',' << fmt(cell.upper)
        << '\n';
  }
}

void write_truth_csv(const TruthRecord& truth, const DataTable& table,
                     const fs::path& path) {
  std::ofstream out(path);
  out << "row,column,value\n";
  for (const auto& cell : truth.cells) {
    out << cell.row << ',' << table.column(cell.col).name << ','
        << fmt(cell.value) << '\n';
  }
}

TruthRecord read_truth_csv(const fs::path& path, const DataTable& table) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open truth file: " + path.string());
  std::string line;
  std::getline(in, line);  // header
  TruthRecord truth;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string r, col, val;
    if (!std::getline(row, r, ',') || !std::getline(row, col, ',') ||
        !std::getline(row, val, ',')) {
      throw DataError("truth file " + path.string() + ": malformed line");
    }
    truth.cells.push_back({static_cast<std::size_t>(std::stoull(r)),
                           table.column_index(col), std::stod(val)});
  }
  return truth;
}

// Rebuilds a ChainResult from a masked table plus a long-format draw
// file, so file-based evaluation goes through the same metric code as
// the direct API.
ChainResult read_chain(const DataTable& masked, const fs::path& draws_path,
                       double seconds) {
  CopulaModel model(masked);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  for (std::size_t m = 0; m < model.missing_cells().size(); ++m) {
    const auto [i, k] = model.missing_cells()[m];
    index[{i, model.columns()[k]}] = m;
  }
  std::ifstream in(draws_path);
  if (!in) throw DataError("cannot open draws file: " + draws_path.string());
  std::string line;
  std::getline(in, line);
  std::size_t n_frames = 0;
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f, r, col, val;
    if (!std::getline(row, f, ',') || !std::getline(row, r, ',') ||
        !std::getline(row, col, ',') || !std::getline(row, val, ',')) {
      throw DataError("draws file: malformed line");
    }
    const auto frame = static_cast<std::size_t>(std::stoull(f));
    n_frames = std::max(n_frames, frame + 1);
    const auto it = index.find({static_cast<std::size_t>(std::stoull(r)),
                                masked.column_index(col)});
    if (it == index.end()) {
      throw DataError("draws file: coordinate not missing in input table");
    }
    entries.emplace_back(frame, it->second, std::stod(val));
  }
  Matrix draws(static_cast<Eigen::Index>(n_frames),
               static_cast<Eigen::Index>(model.missing_cells().size()));
  draws.setConstant(std::numeric_limits<double>::quiet_NaN());
  for (const auto& [f, m, v] : entries) {
    draws(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(m)) = v;
  }
  if (draws.hasNaN()) {
    throw DataError("draws file: missing cell without draws in some frame");
  }
  return ChainResult(std::move(model), std::move(draws), {}, seconds);
}

int cmd_impute(const std::string& input, const std::string& schema_path,
               const ChainFlags& flags, int lags, double level,
               bool write_frames, bool quiet, const std::string& out_flag) {
  const std::string started = iso_now();
  const Schema schema = load_schema(schema_path);
  DataTable table = read_csv(input, schema);
  if (lags > 0) table = add_lags(table, lags);

  const fs::path dir = resolve_out_dir(out_flag);
  fs::create_directories(dir / "draws");

  const ChainConfig cfg = flags.to_config();
  const ChainResult chain = run_chain(table, cfg, make_progress(quiet, "impute"));
  const ImputationSummary summary = summarize(chain, level);

  std::vector<std::string> outputs;
  write_draws_long(chain, dir / "draws" / "draws_long.csv");
  outputs.push_back("draws/draws_long.csv");
  write_correlation_draws(chain, dir / "draws" / "correlation.csv");
  outputs.push_back("draws/correlation.csv");
  write_summary_csv(summary, table, dir / "summary.csv");
  outputs.push_back("summary.csv");
  if (write_frames) {
    fs::create_directories(dir / "frames");
    for (std::size_t f = 0; f < chain.saved_frame_count(); ++f) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%05zu.csv", f);
      write_csv(chain.frame(f), (dir / "frames" / name).string());
      outputs.push_back(std::string("frames/") + name);
    }
  }
  json config{{"iters", flags.iters}, {"thin", flags.thin},
              {"burnin", flags.burnin}, {"lags", lags}, {"level", level},
              {"schema", schema_path}};
  config["chain_seconds"] = chain.seconds();
  config["saved_frames"] = chain.saved_frame_count();
  write_manifest(dir, "impute", config, flags.seed, started, {input}, outputs);
  std::cout << fs::absolute(dir).string() << "\n";
  return 0;
}

json sim_config_json(const SimulationConfig& sim, const MissingnessConfig& miss) {
  json j;
  j["units"] = sim.units;
  j["time_points"] = sim.time_points;
  j["rho"] = sim.rho;
  j["eigen_range"] = {sim.eigen_lo, sim.eigen_hi};
  json ranges = json::array();
  for (const auto& [lo, hi] : sim.mean_ranges) ranges.push_back({lo, hi});
  j["mean_ranges"] = ranges;
  if (miss.flat_probability) j["flat_probability"] = *miss.flat_probability;
  else j["offset"] = miss.offset;
  return j;
}

void load_sim_config(const std::string& path, SimulationConfig& sim,
                     MissingnessConfig& miss) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  if (j.contains("units")) sim.units = j["units"].get<int>();
  if (j.contains("time_points")) sim.time_points = j["time_points"].get<int>();
  if (j.contains("rho")) sim.rho = j["rho"].get<double>();
  if (j.contains("eigen_range")) {
    sim.eigen_lo = j["eigen_range"][0].get<double>();
    sim.eigen_hi = j["eigen_range"][1].get<double>();
  }
  if (j.contains("mean_ranges")) {
    const auto& ranges = j["mean_ranges"];
    if (ranges.size() != sim.mean_ranges.size()) {
      throw ConfigError("config: mean_ranges must list 5 pairs");
    }
    for (std::size_t v = 0; v < sim.mean_ranges.size(); ++v) {
      sim.mean_ranges[v] = {ranges[v][0].get<double>(),
                            ranges[v][1].get<double>()};
    }
  }
  if (j.contains("offset")) miss.offset = j["offset"].get<double>();
  if (j.contains("flat_probability")) {
    miss.flat_probability = j["flat_probability"].get<double>();
  }
  if (j.contains("donors")) {
    for (const auto& pair : j["donors"]) {
      miss.donors.emplace_back(pair[0].get<int>(), pair[1].get<int>());
    }
  }
}

int cmd_simulate(const std::string& config_path, int replicates,
                 std::uint64_t seed, const std::string& out_flag) {
  const std::string started = iso_now();
  SimulationConfig sim;
  MissingnessConfig miss;
  if (!config_path.empty()) load_sim_config(config_path, sim, miss);
  if (replicates < 1) throw ConfigError("simulate: replicates must be >= 1");

  const fs::path dir = resolve_out_dir(out_flag);
  fs::create_directories(dir);
  Rng root(seed);
  std::vector<std::string> outputs;
  for (int r = 0; r < replicates; ++r) {
    Rng rng = root.substream(static_cast<std::uint64_t>(r));
    const DataTable complete = generate_panel(sim, rng);
    const auto [masked, truth] = inject_mar(complete, miss, rng);
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "_%03d.csv", r);
    write_csv(complete, (dir / ("complete" + std::string(suffix))).string());
    write_csv(masked, (dir / ("masked" + std::string(suffix))).string());
    write_truth_csv(truth, complete, dir / ("truth" + std::string(suffix)));
    outputs.push_back("complete" + std::string(suffix));
    outputs.push_back("masked" + std::string(suffix));
    outputs.push_back("truth" + std::string(suffix));
  }
  json config = sim_config_json(sim, miss);
  config["replicates"] = replicates;
  write_manifest(dir, "simulate", config, seed, started,
                 config_path.empty() ? std::vector<std::string>{}
                                     : std::vector<std::string>{config_path},
                 outputs);
  std::cout << fs::absolute(dir).string() << "\n";
  return 0;
}

int cmd_evaluate(const std::string& masked_path, const std::string& schema_path,
                 const std::string& truth_path, const std::string& chain_dir,
                 double level, const std::string& out_flag) {
  const std::string started = iso_now();
  const Schema schema = load_schema(schema_path);
  const DataTable masked = read_csv(masked_path, schema);
  const TruthRecord truth = read_truth_csv(truth_path, masked);

  double seconds = 0.0;
  const fs::path manifest_path = fs::path(chain_dir) / "manifest.json";
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    json m;
    in >> m;
    if (m.contains("config") && m["config"].contains("chain_seconds")) {
      seconds = m["config"]["chain_seconds"].get<double>();
    }
  }
  const ChainResult chain =
      read_chain(masked, fs::path(chain_dir) / "draws" / "draws_long.csv",
                 seconds);
  const MetricsReport report = evaluate(truth, chain, level);

  const fs::path dir = resolve_out_dir(out_flag);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "metrics.json");
    out << metrics_to_json(report) << "\n";
  }
  {
    std::ofstream out(dir / "metrics.csv");
    out << "dataset,variable,metric,value\n";
    out << metrics_to_tidy_csv(report, masked_path);
  }
  json config{{"level", level}, {"truth", truth_path}, {"chain", chain_dir}};
  write_manifest(dir, "evaluate", config, 0, started,
                 {masked_path, truth_path}, {"metrics.json", "metrics.csv"});
  std::cout << fs::absolute(dir / "metrics.json").string() << "\n";
  return 0;
}

int cmd_benchmark(const std::vector<int>& sizes, const std::vector<double>& rhos,
                  int replicates, const ChainFlags& flags, int lags,
                  double level, int jobs, bool quiet,
                  const std::string& out_flag) {
  const std::string started = iso_now();
  if (sizes.empty() || rhos.empty()) {
    throw ConfigError("benchmark: need at least one size and one rho");
  }
  if (replicates < 1) throw ConfigError("benchmark: replicates must be >= 1");

  struct Cell {
    int t;
    double rho;
    int replicate;
  };
  std::vector<Cell> grid;
  for (int t : sizes) {
    for (double rho : rhos) {
      for (int r = 0; r < replicates; ++r) grid.push_back({t, rho, r});
    }
  }

  std::vector<std::string> rows(grid.size());
  std::vector<std::string> failures(grid.size());
  std::atomic<std::size_t> next{0};
  Rng root(flags.seed);

  auto worker = [&]() {
    for (;;) {
      const std::size_t g = next.fetch_add(1);
      if (g >= grid.size()) return;
      const Cell& cell = grid[g];
      try {
        Rng rng = root.substream(g);
        SimulationConfig sim;
        sim.time_points = cell.t;
        sim.rho = cell.rho;
        MissingnessConfig miss;
        const DataTable complete = generate_panel(sim, rng);
        const auto [masked_raw, truth_raw] = inject_mar(complete, miss, rng);
        DataTable masked = masked_raw;
        TruthRecord truth = truth_raw;
        if (lags > 0) masked = add_lags(masked, lags);
        ChainConfig cfg = flags.to_config();
        cfg.seed = rng.substream(1).root_seed();
        const ChainResult chain = run_chain(masked, cfg, {});
        MetricsReport report = evaluate(truth, chain, level);
        report.units = sim.units;
        report.time_points = cell.t;
        report.rho = cell.rho;
        std::ostringstream id;
        id << "T" << cell.t << "_rho" << cell.rho << "_rep" << cell.replicate;
        rows[g] = metrics_to_tidy_csv(report, id.str());
      } catch (const std::exception& e) {
        std::ostringstream id;
        id << "T" << cell.t << "_rho" << cell.rho << "_rep" << cell.replicate;
        failures[g] = id.str() + ": " + e.what();
      }
    }
  };

  const int n_workers = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  const fs::path dir = resolve_out_dir(out_flag);
  fs::create_directories(dir);
  bool any_failed = false;
  {
    std::ofstream out(dir / "benchmark.csv");
    out << "dataset,variable,metric,value\n";
    for (const auto& row : rows) out << row;
  }
  for (const auto& f : failures) {
    if (!f.empty()) {
      any_failed = true;
      std::cerr << "benchmark cell failed: " << f << "\n";
    }
  }
  json config{{"sizes", sizes}, {"rhos", rhos}, {"replicates", replicates},
              {"iters", flags.iters}, {"thin", flags.thin},
              {"burnin", flags.burnin}, {"lags", lags}, {"jobs", jobs},
              {"level", level}};
  write_manifest(dir, "benchmark", config, flags.seed, started, {},
                 {"benchmark.csv"});
  if (!quiet) std::cerr << "benchmark: " << grid.size() << " cells\n";
  std::cout << fs::absolute(dir / "benchmark.csv").string() << "\n";
  return any_failed ? 1 : 0;
}

int cmd_regress(const std::string& input, const std::string& schema_path,
                const std::string& outcome,
                const std::vector<std::string>& predictors,
                const ChainFlags& flags, double level, bool quiet,
                const std::string& out_flag) {
  const std::string started = iso_now();
  const Schema schema = load_schema(schema_path);
  const DataTable table = read_csv(input, schema);
  RegressionSpec spec;
  spec.outcome = outcome;
  spec.predictors = predictors;

  const ChainConfig cfg = flags.to_config();
  const PosteriorDraws draws =
      gibbs_regress(table, spec, cfg, make_progress(quiet, "regress"));
  const PosteriorSummary summary = summarize_posterior(draws, level);

  const fs::path dir = resolve_out_dir(out_flag);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "posterior_draws.csv");
    out << "iteration,parameter,value\n";
    for (Eigen::Index r = 0; r < draws.coefficients.rows(); ++r) {
      for (Eigen::Index c = 0; c < draws.coefficients.cols(); ++c) {
        out << r << ',' << draws.names[static_cast<std::size_t>(c)] << ','
            << fmt(draws.coefficients(r, c)) << '\n';
      }
      out << r << ",error_variance," << fmt(draws.error_variance(r)) << '\n';
    }
  }
  {
    std::ofstream out(dir / "posterior_summary.csv");
    out << "parameter,mean,lower,upper\n";
    for (const auto& c : summary.coefficients) {
      out << c.name << ',' << fmt(c.mean) << ',' << fmt(c.lower) << ','
          << fmt(c.upper) << '\n';
    }
    out << summary.error_variance.name << ',' << fmt(summary.error_variance.mean)
        << ',' << fmt(summary.error_variance.lower) << ','
        << fmt(summary.error_variance.upper) << '\n';
  }
  json config{{"iters", flags.iters}, {"thin", flags.thin},
              {"burnin", flags.burnin}, {"outcome", outcome},
              {"predictors", predictors}, {"level", level}};
  write_manifest(dir, "regress", config, flags.seed, started, {input},
                 {"posterior_draws.csv", "posterior_summary.csv"});
  std::cout << fs::absolute(dir).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-copula multiple imputation for mixed panel data"};
  app.require_subcommand(1);

  // impute
  auto* impute = app.add_subcommand("impute", "Impute a CSV dataset");
  std::string in_csv, schema_path, out_dir;
  ChainFlags chain_flags;
  int lags = 0;
  double level = 0.95;
  bool quiet = false;
  bool write_frames = false;
  impute->add_option("input", in_csv, "Input CSV")->required();
  impute->add_option("--schema", schema_path, "Schema JSON")->required();
  add_chain_flags(impute, chain_flags);
  impute->add_option("--lags", lags, "Lag columns to append per variable");
  impute->add_option("--level", level, "Credible-interval level");
  impute->add_flag("--frames", write_frames, "Write one CSV per saved frame");
  impute->add_flag("--quiet", quiet, "Suppress progress output");
  impute->add_option("--out", out_dir, "Output directory");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic panels");
  std::string sim_config;
  int replicates = 1;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  simulate->add_option("--config", sim_config, "Simulation config JSON");
  simulate->add_option("--replicates", replicates, "Number of replicate datasets");
  simulate->add_option("--seed", sim_seed, "Root RNG seed");
  simulate->add_option("--out", sim_out, "Output directory");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score imputations against truth");
  std::string ev_masked, ev_schema, ev_truth, ev_chain, ev_out;
  double ev_level = 0.95;
  evaluate_cmd->add_option("masked", ev_masked, "Masked input CSV")->required();
  evaluate_cmd->add_option("--schema", ev_schema, "Schema JSON")->required();
  evaluate_cmd->add_option("--truth", ev_truth, "Truth CSV")->required();
  evaluate_cmd->add_option("--chain", ev_chain, "Imputation output directory")->required();
  evaluate_cmd->add_option("--level", ev_level, "Coverage level");
  evaluate_cmd->add_option("--out", ev_out, "Output directory");

  // benchmark
  auto* benchmark = app.add_subcommand("benchmark", "Simulate/impute/evaluate over a grid");
  std::vector<int> bm_sizes{20};
  std::vector<double> bm_rhos{0.85};
  int bm_replicates = 1;
  ChainFlags bm_flags;
  int bm_lags = 0;
  int jobs = 1;
  double bm_level = 0.95;
  bool bm_quiet = false;
  std::string bm_out;
  benchmark->add_option("--sizes", bm_sizes, "Time-point grid")->delimiter(',');
  benchmark->add_option("--rhos", bm_rhos, "Autocorrelation grid")->delimiter(',');
  benchmark->add_option("--replicates", bm_replicates, "Replicates per cell");
  add_chain_flags(benchmark, bm_flags);
  benchmark->add_option("--lags", bm_lags, "Lag columns per variable");
  benchmark->add_option("--jobs", jobs, "Worker threads");
  benchmark->add_option("--level", bm_level, "Coverage level");
  benchmark->add_flag("--quiet", bm_quiet, "Suppress progress output");
  benchmark->add_option("--out", bm_out, "Output directory");

  // regress
  auto* regress = app.add_subcommand("regress", "Bayesian regression with point-of-need imputation");
  std::string rg_csv, rg_schema, rg_outcome, rg_out;
  std::vector<std::string> rg_predictors;
  ChainFlags rg_flags;
  double rg_level = 0.95;
  bool rg_quiet = false;
  regress->add_option("input", rg_csv, "Input CSV")->required();
  regress->add_option("--schema", rg_schema, "Schema JSON")->required();
  regress->add_option("--outcome", rg_outcome, "Outcome column")->required();
  regress->add_option("--predictors", rg_predictors, "Predictor columns")
      ->required()->delimiter(',');
  add_chain_flags(regress, rg_flags);
  regress->add_option("--level", rg_level, "Credible-interval level");
  regress->add_flag("--quiet", rg_quiet, "Suppress progress output");
  regress->add_option("--out", rg_out, "Output directory");

  try {
    app.parse(argc, argv);
    if (impute->parsed()) {
      return cmd_impute(in_csv, schema_path, chain_flags, lags, level,
                        write_frames, quiet, out_dir);
    }
    if (simulate->parsed()) {
      return cmd_simulate(sim_config, replicates, sim_seed, sim_out);
    }
    if (evaluate_cmd->parsed()) {
      return cmd_evaluate(ev_masked, ev_schema, ev_truth, ev_chain, ev_level,
                          ev_out);
    }
    if (benchmark->parsed()) {
      return cmd_benchmark(bm_sizes, bm_rhos, bm_replicates, bm_flags, bm_lags,
                           bm_level, jobs, bm_quiet, bm_out);
    }
    if (regress->parsed()) {
      return cmd_regress(rg_csv, rg_schema, rg_outcome, rg_predictors, rg_flags,
                         rg_level, rg_quiet, rg_out);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
