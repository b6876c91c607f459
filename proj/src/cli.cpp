#include "rsvm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsvm/bench.hpp"
#include "rsvm/data.hpp"
#include "rsvm/errors.hpp"
#include "rsvm/screening.hpp"
#include "rsvm/solver.hpp"

namespace rsvm::cli {

namespace {

using nlohmann::json;

/// Flags shared by the subcommands that read a dataset.
struct InputConfig {
  std::string path;
  std::string format = "auto";
  long label_col = 0;
  bool header = false;
  double rho = 0.0;
  std::string rho_file;
  bool bias = false;
  bool standardize = false;
};

struct RunConfig {
  InputConfig input;
  double C = 1.0;
  double eps = 1e-6;
  int max_epochs = 1000000;
  long f_min = 0;
  int screen_every = 10;
  std::string model_path;
  std::string trace_path = "trace.csv";
  std::string partition_path = "partition.json";

  // bench
  std::vector<double> C_grid = bench::kDefaultCGrid;
  std::vector<double> rho_grid = bench::kDefaultRhoGrid;
  int repeats = 10;
  bool parallel = false;
  std::string dataset_id;
  std::string reference;
  std::string records_path = "records.csv";
  std::string summary_path = "summary.csv";

  // gen-data
  long n = 2000;
  long dim = 20;
  double separation = 3.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
  std::string output_path;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << content;
  if (!out) throw UsageError("failed writing '" + path + "'");
}

struct LoadedData {
  Dataset dataset;
  std::optional<Standardized> standardization;
};

LoadedData load(const InputConfig& cfg) {
  if (!cfg.rho_file.empty() && cfg.rho != 0.0) throw UsageError("--rho and --rho-file are exclusive");
  const std::string text = read_file(cfg.path);
  std::string format = cfg.format;
  if (format == "auto") {
    format = std::filesystem::path(cfg.path).extension() == ".csv" ? "csv" : "libsvm";
  }
  Dataset ds = [&] {
    if (format == "csv") {
      CsvOptions opts;
      opts.label_column = cfg.label_col;
      opts.has_header = cfg.header;
      return parse_csv(text, opts);
    }
    return parse_libsvm(text);
  }();

  std::optional<Standardized> standardization;
  if (cfg.standardize) {
    standardization = standardize(ds);
    ds = standardization->dataset;
  }
  if (cfg.bias) ds = augment_bias(ds);
  if (!cfg.rho_file.empty()) {
    const Vector radii = parse_radii(read_file(cfg.rho_file));
    ds = set_radii(ds, std::span<const double>(radii.data(), static_cast<std::size_t>(radii.size())));
  } else {
    ds = set_radii(ds, cfg.rho);
  }
  return {std::move(ds), std::move(standardization)};
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

json model_json(const RunConfig& cfg, const LoadedData& data, const DualIterate& it, bool converged,
                int epochs) {
  json j;
  j["schema"] = 1;
  j["model"] = "robust_svm_l2";
  j["C"] = cfg.C;
  if (cfg.input.rho_file.empty()) {
    j["rho"] = cfg.input.rho;
  } else {
    j["rho"] = nullptr;
    j["rho_file"] = cfg.input.rho_file;
  }
  j["n"] = data.dataset.size();
  j["d"] = data.dataset.dim();
  j["bias_augmented"] = cfg.input.bias;
  if (data.standardization) {
    j["standardization"] = {{"mean", to_std(data.standardization->mean)},
                            {"scale", to_std(data.standardization->scale)}};
  } else {
    j["standardization"] = nullptr;
  }
  j["w"] = to_std(it.w);
  j["primal"] = it.primal_value;
  j["dual"] = it.dual_value;
  j["gap"] = it.gap;
  j["eps"] = cfg.eps;
  j["converged"] = converged;
  j["epochs"] = epochs;
  return j;
}

Hyperparams hyperparams(const RunConfig& cfg) {
  Hyperparams hp;
  hp.C = cfg.C;
  hp.gap_tol = cfg.eps;
  hp.max_epochs = cfg.max_epochs;
  hp.validate();
  return hp;
}

void print_objectives(std::ostream& out, const DualIterate& it) {
  out.precision(12);
  out << "primal " << it.primal_value << '\n' << "dual   " << it.dual_value << '\n' << "gap    " << it.gap
      << '\n';
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LoadedData data = load(cfg.input);
  const Hyperparams hp = hyperparams(cfg);
  SolveOptions opts;
  opts.tol = cfg.eps;
  opts.max_epochs = cfg.max_epochs;
  const SolveReport rep = solve(data.dataset, hp, {}, Vector::Zero(data.dataset.size()), opts);
  const std::string path = cfg.model_path.empty() ? "model.json" : cfg.model_path;
  write_file(path, model_json(cfg, data, rep.iterate, rep.converged, rep.epochs).dump(2) + "\n");
  print_objectives(out, rep.iterate);
  out << "epochs " << rep.epochs << '\n';
  if (!rep.converged) {
    err << "error: gap " << rep.iterate.gap << " above eps " << cfg.eps << " after " << rep.epochs
        << " epochs\n";
    return kSolveFailure;
  }
  return kSuccess;
}

int cmd_screen(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LoadedData data = load(cfg.input);
  const Hyperparams hp = hyperparams(cfg);
  ScreenOptions opts;
  opts.eps = cfg.eps;
  opts.f_min = cfg.f_min;
  opts.screen_every = cfg.screen_every;
  opts.max_epochs = cfg.max_epochs;
  const ScreenResult res = dynamic_screen(data.dataset, hp, opts);

  write_file(cfg.trace_path, res.trace.to_csv());
  json part;
  part["schema"] = 1;
  part["n"] = data.dataset.size();
  part["R"] = res.partition.zero_set();
  part["S"] = res.partition.C_set();
  part["F"] = res.partition.free_set();
  std::vector<int> at(static_cast<std::size_t>(data.dataset.size()));
  for (Index i = 0; i < data.dataset.size(); ++i) at[static_cast<std::size_t>(i)] = res.partition.screened_at(i);
  part["screened_at"] = at;
  write_file(cfg.partition_path, part.dump(2) + "\n");
  if (!cfg.model_path.empty()) {
    write_file(cfg.model_path, model_json(cfg, data, res.iterate, res.converged, res.epochs).dump(2) + "\n");
  }

  print_objectives(out, res.iterate);
  out << "outer iterations " << res.trace.rows.size() << '\n';
  out << "screened fraction " << res.partition.screened_fraction() << " (R " << res.partition.num_zero()
      << ", S " << res.partition.num_C() << ", F " << res.partition.num_free() << ")\n";
  if (!res.converged) {
    err << "error: gap " << res.iterate.gap << " above eps " << cfg.eps << '\n';
    return kSolveFailure;
  }
  return kSuccess;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LoadedData data = load(cfg.input);
  bench::GridOptions opts;
  opts.dataset_id = cfg.dataset_id.empty() ? std::filesystem::path(cfg.input.path).stem().string()
                                           : cfg.dataset_id;
  opts.C_grid = cfg.C_grid;
  opts.rho_grid = cfg.rho_grid;
  opts.repeats = cfg.repeats;
  opts.eps = cfg.eps;
  opts.max_epochs = cfg.max_epochs;
  opts.f_min = cfg.f_min;
  opts.screen_every = cfg.screen_every;
  opts.seed = cfg.seed;
  opts.parallel = cfg.parallel;

  const auto records = bench::run_grid(data.dataset, opts);
  const bench::Summary summary = bench::summarize(records, cfg.parallel);
  write_file(cfg.records_path, bench::records_csv(records));
  write_file(cfg.summary_path, bench::summary_csv(summary));
  out << bench::summary_markdown(summary);

  if (!cfg.reference.empty()) {
    const auto ref = bench::published_ranges(cfg.reference);
    if (!ref) throw UsageError("unknown reference dataset '" + cfg.reference + "'");
    double lo_s = 1e300, hi_s = 0.0, lo_r = 1.0, hi_r = 0.0;
    for (const auto& r : summary.rows) {
      lo_s = std::min(lo_s, r.speedup);
      hi_s = std::max(hi_s, r.speedup);
      lo_r = std::min(lo_r, r.screened_fraction);
      hi_r = std::max(hi_r, r.screened_fraction);
    }
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "\n| %s | published | this run |\n|---|---|---|\n"
                  "| speedup | %.2f - %.2f | %.2f - %.2f |\n"
                  "| screened %% | %.1f - %.1f | %.1f - %.1f |\n",
                  ref->name.c_str(), ref->speedup_low, ref->speedup_high, lo_s, hi_s, 100 * ref->rate_low,
                  100 * ref->rate_high, 100 * lo_r, 100 * hi_r);
    out << buf;
  }
  if (summary.excluded > 0) {
    err << "warning: " << summary.excluded << " run(s) did not certify\n";
    return kSolveFailure;
  }
  return kSuccess;
}

int cmd_gen_data(const RunConfig& cfg, std::ostream& out) {
  GaussianSpec spec;
  spec.n = cfg.n;
  spec.dim = cfg.dim;
  spec.separation = cfg.separation;
  spec.noise_std = cfg.noise;
  spec.seed = cfg.seed;
  const Dataset ds = gen_gaussian(spec);
  write_file(cfg.output_path, write_libsvm(ds));
  out << "wrote " << ds.size() << " samples of dimension " << ds.dim() << " to " << cfg.output_path << '\n';
  return kSuccess;
}

void add_input_flags(CLI::App* sub, InputConfig& in) {
  sub->add_option("--input,-i", in.path, "dataset file (LIBSVM or CSV)")->required();
  sub->add_option("--format", in.format, "input format")
      ->check(CLI::IsMember({"auto", "libsvm", "csv"}))
      ->capture_default_str();
  sub->add_option("--label-col", in.label_col, "CSV label column, 0-based")->capture_default_str();
  sub->add_flag("--header", in.header, "CSV input has a header row");
  sub->add_option("--rho", in.rho, "uncertainty radius for every sample")->capture_default_str();
  sub->add_option("--rho-file", in.rho_file, "per-sample radii, one per line");
  sub->add_flag("--bias", in.bias, "append a constant 1 feature (radius also covers it)");
  sub->add_flag("--standardize", in.standardize, "scale features to mean 0, std 1 before training");
}

void add_solver_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--c", cfg.C, "regularization C")->capture_default_str();
  sub->add_option("--eps", cfg.eps, "absolute duality-gap target")->capture_default_str();
  sub->add_option("--max-epochs", cfg.max_epochs, "gradient step budget")->capture_default_str();
}

void add_screen_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--fmin", cfg.f_min, "stop screening once |F| <= fmin")->capture_default_str();
  sub->add_option("--screen-every", cfg.screen_every, "inner epochs between screening passes")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Robust SVM (l2 feature noise) training with dynamic safe sample screening", "rsvm"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "solve to the gap target and write model JSON");
  add_input_flags(train, cfg.input);
  add_solver_flags(train, cfg);
  train->add_option("--output,-o", cfg.model_path, "model JSON path (default model.json)");

  auto* screen = app.add_subcommand("screen", "train with dynamic safe screening");
  add_input_flags(screen, cfg.input);
  add_solver_flags(screen, cfg);
  add_screen_flags(screen, cfg);
  screen->add_option("--trace", cfg.trace_path, "trace CSV path")->capture_default_str();
  screen->add_option("--partition", cfg.partition_path, "partition JSON path")->capture_default_str();
  screen->add_option("--output,-o", cfg.model_path, "optional model JSON path");

  auto* bench_cmd = app.add_subcommand("bench", "timed (C, rho) grid, with and without screening");
  add_input_flags(bench_cmd, cfg.input);
  bench_cmd->add_option("--eps", cfg.eps, "absolute duality-gap target")->capture_default_str();
  bench_cmd->add_option("--max-epochs", cfg.max_epochs, "gradient step budget")->capture_default_str();
  add_screen_flags(bench_cmd, cfg);
  bench_cmd->add_option("--c-grid", cfg.C_grid, "C values (default: 0.01 0.1 1 10, the published grid)")
      ->delimiter(',');
  bench_cmd->add_option("--rho-grid", cfg.rho_grid, "rho values (default: 0 0.01 0.02 0.05, the published grid)")
      ->delimiter(',');
  bench_cmd->add_option("--repeats", cfg.repeats, "repeats per cell (published runs used 100)")
      ->capture_default_str();
  bench_cmd->add_option("--seed", cfg.seed, "seed for the per-repeat mode order")->capture_default_str();
  bench_cmd->add_flag("--parallel", cfg.parallel, "run cells on RSVM_THREADS workers (contended timings)");
  bench_cmd->add_option("--dataset-id", cfg.dataset_id, "name in the CSV output (default: input file stem)");
  bench_cmd->add_option("--reference", cfg.reference, "print published ranges next to this run")
      ->check(CLI::IsMember({"breast_cancer", "spambase"}));
  bench_cmd->add_option("--records", cfg.records_path, "per-run CSV path")->capture_default_str();
  bench_cmd->add_option("--summary", cfg.summary_path, "summary CSV path")->capture_default_str();

  auto* gen = app.add_subcommand("gen-data", "write a two-Gaussian synthetic dataset (LIBSVM)");
  gen->add_option("--n", cfg.n, "sample count, even")->capture_default_str();
  gen->add_option("--d", cfg.dim, "dimension")->capture_default_str();
  gen->add_option("--sep", cfg.separation, "distance between class means along e_1")->capture_default_str();
  gen->add_option("--noise", cfg.noise, "per-coordinate standard deviation")->capture_default_str();
  gen->add_option("--seed", cfg.seed, "mt19937_64 seed")->capture_default_str();
  gen->add_option("--output,-o", cfg.output_path, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*train) return cmd_train(cfg, out, err);
    if (*screen) return cmd_screen(cfg, out, err);
    if (*bench_cmd) return cmd_bench(cfg, out, err);
    if (*gen) return cmd_gen_data(cfg, out);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kSolveFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace rsvm::cli
