#include "rsvm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "rsvm/errors.hpp"

namespace rsvm::bench {

const char* to_string(Mode mode) { return mode == Mode::Baseline ? "baseline" : "screened"; }

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RSVM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Cell {
  double C;
  double rho;
};

RunRecord run_baseline(const Dataset& ds, const Hyperparams& hp, const GridOptions& o) {
  SolveOptions so;
  so.tol = o.eps;
  so.max_epochs = o.max_epochs;
  const auto t0 = Clock::now();
  const SolveReport rep = solve(ds, hp, {}, Vector::Zero(ds.size()), so);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

  RunRecord r;
  r.mode = Mode::Baseline;
  r.wall_seconds = secs;
  r.final_gap = rep.iterate.gap;
  r.primal_value = rep.iterate.primal_value;
  r.certified = rep.converged;
  return r;
}

RunRecord run_screened(const Dataset& ds, const Hyperparams& hp, const GridOptions& o) {
  ScreenOptions so;
  so.eps = o.eps;
  so.f_min = o.f_min;
  so.screen_every = o.screen_every;
  so.max_epochs = o.max_epochs;
  const auto t0 = Clock::now();
  ScreenResult res = dynamic_screen(ds, hp, so);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

  RunRecord r;
  r.mode = Mode::Screened;
  r.wall_seconds = secs;
  r.final_gap = res.iterate.gap;
  r.primal_value = res.iterate.primal_value;
  r.screened_fraction = res.partition.screened_fraction();
  r.zero_fraction = static_cast<double>(res.partition.num_zero()) / static_cast<double>(ds.size());
  r.certified = res.converged;
  r.trace = std::move(res.trace);
  return r;
}

std::vector<RunRecord> run_cell(const Dataset& base, const Cell& cell, std::size_t cell_index,
                                const GridOptions& o) {
  const Dataset ds = set_radii(base, cell.rho);
  Hyperparams hp;
  hp.C = cell.C;
  hp.gap_tol = o.eps;
  hp.max_epochs = o.max_epochs;

  std::mt19937_64 order(o.seed + 0x9E3779B97F4A7C15ULL * (cell_index + 1));
  std::vector<RunRecord> out;
  for (int rep = 0; rep < o.repeats; ++rep) {
    const bool screened_first = (order() & 1U) != 0;
    RunRecord b, s;
    if (screened_first) {
      s = run_screened(ds, hp, o);
      b = run_baseline(ds, hp, o);
    } else {
      b = run_baseline(ds, hp, o);
      s = run_screened(ds, hp, o);
    }
    for (RunRecord* r : {&b, &s}) {
      r->dataset_id = o.dataset_id;
      r->C = cell.C;
      r->rho = cell.rho;
      r->repeat = rep;
      out.push_back(std::move(*r));
    }
  }
  return out;
}

}  // namespace

std::vector<RunRecord> run_grid(const Dataset& ds, const GridOptions& o) {
  if (o.C_grid.empty() || o.rho_grid.empty()) throw ValidationError("grids must be nonempty");
  if (o.repeats < 1) throw ValidationError("repeats must be >= 1");
  if (!(o.eps > 0.0)) throw ValidationError("eps must be positive");
  for (const double c : o.C_grid) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("C grid values must be positive");
  }
  for (const double r : o.rho_grid) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("rho grid values must be >= 0");
  }

  std::vector<Cell> cells;
  for (const double c : o.C_grid) {
    for (const double r : o.rho_grid) cells.push_back({c, r});
  }
  std::vector<std::vector<RunRecord>> per_cell(cells.size());

  if (!o.parallel) {
    for (std::size_t k = 0; k < cells.size(); ++k) per_cell[k] = run_cell(ds, cells[k], k, o);
  } else {
    const auto workers = static_cast<std::size_t>(
        std::min<int>(resolve_threads(o.threads), static_cast<int>(cells.size())));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
          for (std::size_t k = next++; k < cells.size(); k = next++) {
            try {
              per_cell[k] = run_cell(ds, cells[k], k, o);
            } catch (...) {
              const std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<RunRecord> records;
  for (auto& v : per_cell) {
    for (auto& r : v) records.push_back(std::move(r));
  }
  return records;
}

namespace {

struct Stats {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = 0.0;
};

Stats stats(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double sq = 0.0;
    for (const double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(xs.size() - 1));
  }
  return s;
}

}  // namespace

Summary summarize(const std::vector<RunRecord>& records, bool contended) {
  struct Acc {
    std::string id;
    double C, rho;
    std::vector<double> base, scr, frac, zero;
    int runs = 0, excluded = 0;
    bool saw_base = false, saw_scr = false;
  };
  std::vector<Acc> cells;
  for (const auto& r : records) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const Acc& a) {
      return a.id == r.dataset_id && a.C == r.C && a.rho == r.rho;
    });
    if (it == cells.end()) {
      cells.push_back({r.dataset_id, r.C, r.rho, {}, {}, {}, {}, 0, 0, false, false});
      it = std::prev(cells.end());
    }
    ++it->runs;
    (r.mode == Mode::Baseline ? it->saw_base : it->saw_scr) = true;
    if (!r.certified) {
      ++it->excluded;
      continue;
    }
    if (r.mode == Mode::Baseline) {
      it->base.push_back(r.wall_seconds);
    } else {
      it->scr.push_back(r.wall_seconds);
      it->frac.push_back(r.screened_fraction);
      it->zero.push_back(r.zero_fraction);
    }
  }

  Summary summary;
  summary.contended = contended;
  for (const auto& a : cells) {
    if (!a.saw_base || !a.saw_scr) {
      std::ostringstream msg;
      msg << "cell C=" << a.C << " rho=" << a.rho << " lacks " << (a.saw_base ? "screened" : "baseline")
          << " records";
      throw ValidationError(msg.str());
    }
    const Stats b = stats(a.base), s = stats(a.scr), f = stats(a.frac), z = stats(a.zero);
    SummaryRow row;
    row.dataset_id = a.id;
    row.C = a.C;
    row.rho = a.rho;
    row.baseline_mean = b.mean;
    row.baseline_std = b.std;
    row.screened_mean = s.mean;
    row.screened_std = s.std;
    row.speedup = b.mean / s.mean;
    row.screened_fraction = f.mean;
    row.zero_fraction = z.mean;
    row.runs = a.runs;
    row.excluded = a.excluded;
    summary.excluded += a.excluded;
    summary.rows.push_back(row);
  }
  return summary;
}

std::string records_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out.precision(10);
  out << "dataset,C,rho,mode,repeat,seconds,final_gap,screened_frac\n";
  for (const auto& r : records) {
    out << r.dataset_id << ',' << r.C << ',' << r.rho << ',' << to_string(r.mode) << ',' << r.repeat << ','
        << r.wall_seconds << ',' << r.final_gap << ',' << r.screened_fraction << '\n';
  }
  return out.str();
}

std::string summary_csv(const Summary& summary) {
  std::ostringstream out;
  out.precision(10);
  out << "dataset,C,rho,baseline_mean_s,baseline_std_s,screened_mean_s,screened_std_s,speedup,"
         "screened_frac,zero_frac,runs,excluded\n";
  for (const auto& r : summary.rows) {
    out << r.dataset_id << ',' << r.C << ',' << r.rho << ',' << r.baseline_mean << ',' << r.baseline_std << ','
        << r.screened_mean << ',' << r.screened_std << ',' << r.speedup << ',' << r.screened_fraction << ','
        << r.zero_fraction << ',' << r.runs << ',' << r.excluded << '\n';
  }
  return out.str();
}

std::string summary_markdown(const Summary& summary) {
  std::ostringstream out;
  char buf[256];
  out << "| dataset | C | rho | baseline s (mean ± std) | screened s (mean ± std) | speedup | screened % |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& r : summary.rows) {
    std::snprintf(buf, sizeof(buf), "| %s | %g | %g | %.4g ± %.2g | %.4g ± %.2g | %.2fx | %.1f |\n",
                  r.dataset_id.c_str(), r.C, r.rho, r.baseline_mean, r.baseline_std, r.screened_mean,
                  r.screened_std, r.speedup, 100.0 * r.screened_fraction);
    out << buf;
  }
  if (summary.contended) out << "\n_timings contended: cells ran in parallel_\n";
  if (summary.excluded > 0) {
    out << "\n_" << summary.excluded << " uncertified run(s) excluded from the statistics_\n";
  }
  return out.str();
}

std::optional<PublishedRanges> published_ranges(const std::string& dataset) {
  if (dataset == "breast_cancer") return PublishedRanges{"Breast Cancer Wisconsin", 1.07, 18.96, 0.965, 0.989};
  if (dataset == "spambase") return PublishedRanges{"Spambase", 1.54, 9.85, 0.893, 0.998};
  return std::nullopt;
}

}  // namespace rsvm::bench
