#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsvm/data.hpp"
#include "rsvm/screening.hpp"

namespace rsvm::bench {

/// Grid values used by the published experiments.
inline const std::vector<double> kDefaultCGrid = {0.01, 0.1, 1.0, 10.0};
inline const std::vector<double> kDefaultRhoGrid = {0.0, 0.01, 0.02, 0.05};

enum class Mode { Baseline, Screened };
const char* to_string(Mode mode);

struct RunRecord {
  std::string dataset_id;
  double C = 0.0;
  double rho = 0.0;
  Mode mode = Mode::Baseline;
  int repeat = 0;
  double wall_seconds = 0.0;
  double final_gap = 0.0;
  double primal_value = 0.0;
  double screened_fraction = 0.0;  ///< |R u S| / n, 0 for baseline runs
  double zero_fraction = 0.0;      ///< |R| / n
  bool certified = false;          ///< final gap <= eps
  ScreenTrace trace;               ///< screened runs only
};

struct GridOptions {
  std::string dataset_id = "data";
  std::vector<double> C_grid = kDefaultCGrid;
  std::vector<double> rho_grid = kDefaultRhoGrid;
  int repeats = 10;
  double eps = 1e-6;
  int max_epochs = 1000000;
  Index f_min = 0;
  int screen_every = 10;
  /// Seeds the per-repeat order in which the two modes run.
  std::uint64_t seed = 0;
  /// Run (C, rho) cells on worker threads; timings are then contended.
  bool parallel = false;
  /// Worker cap for parallel mode; 0 reads RSVM_THREADS, then hardware concurrency.
  int threads = 0;
};

/// Every (C, rho, repeat) runs once without and once with screening.
/// Records come back ordered by C, rho, repeat, then mode (baseline first).
std::vector<RunRecord> run_grid(const Dataset& ds, const GridOptions& options);

struct SummaryRow {
  std::string dataset_id;
  double C = 0.0;
  double rho = 0.0;
  double baseline_mean = 0.0;
  double baseline_std = 0.0;
  double screened_mean = 0.0;
  double screened_std = 0.0;
  double speedup = 0.0;
  double screened_fraction = 0.0;
  double zero_fraction = 0.0;
  int runs = 0;
  int excluded = 0;  ///< uncertified records left out of the statistics
};

struct Summary {
  std::vector<SummaryRow> rows;
  bool contended = false;
  int excluded = 0;
};

/// Per-cell mean and sample std of wall time per mode; speedup is
/// mean(baseline) / mean(screened).
Summary summarize(const std::vector<RunRecord>& records, bool contended = false);

/// `dataset,C,rho,mode,repeat,seconds,final_gap,screened_frac`
std::string records_csv(const std::vector<RunRecord>& records);
std::string summary_csv(const Summary& summary);
std::string summary_markdown(const Summary& summary);

/// Published ranges for the two real datasets, for side-by-side reporting.
struct PublishedRanges {
  std::string name;
  double speedup_low, speedup_high;
  double rate_low, rate_high;
};
std::optional<PublishedRanges> published_ranges(const std::string& dataset);

int resolve_threads(int requested);

}  // namespace rsvm::bench
