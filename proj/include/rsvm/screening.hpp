#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rsvm/data.hpp"
#include "rsvm/model.hpp"
#include "rsvm/solver.hpp"

namespace rsvm {

/// Euclidean ball guaranteed to contain the primal optimum: center is the
/// primal point of a dual iterate, radius sqrt(2 * gap).
struct SafeBall {
  Vector center;
  double radius = 0.0;
  double gap = 0.0;  ///< the gap the radius was built from
};

SafeBall gap_ball(const DualIterate& iterate);

struct MarginBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Worst-case range of the robust margin psi_i(w) over every w in the ball.
MarginBounds margin_bounds(const SafeBall& ball, const SampleView& sample);

enum class ScreenDecision : std::uint8_t { Keep, ScreenZero, ScreenC };

/// lower > 1 certifies alpha_i* = 0, upper < 1 certifies alpha_i* = C.
/// Ties at exactly 1 are kept.
ScreenDecision classify(const MarginBounds& bounds);

enum class SampleStatus : std::uint8_t { Free, Zero, AtC };

/// R (alpha* = 0), S (alpha* = C) and F (undetermined). Samples only ever
/// leave F, so R and S grow monotonically.
class Partition {
 public:
  explicit Partition(Index n);

  Index size() const noexcept { return static_cast<Index>(status_.size()); }
  SampleStatus status(Index i) const { return status_.at(static_cast<std::size_t>(i)); }
  /// Outer iteration at which i left F, -1 while still free.
  int screened_at(Index i) const { return screened_at_.at(static_cast<std::size_t>(i)); }

  void screen_zero(Index i, int iteration);
  void screen_C(Index i, int iteration);

  std::vector<Index> zero_set() const { return collect(SampleStatus::Zero); }
  std::vector<Index> C_set() const { return collect(SampleStatus::AtC); }
  std::vector<Index> free_set() const { return collect(SampleStatus::Free); }

  Index num_zero() const noexcept { return n_zero_; }
  Index num_C() const noexcept { return n_C_; }
  Index num_free() const noexcept { return size() - n_zero_ - n_C_; }

  /// |R u S| / n
  double screened_fraction() const { return static_cast<double>(n_zero_ + n_C_) / size(); }

  /// Recounts from scratch; throws NumericalError if the cached counts disagree.
  void check() const;

 private:
  void move(Index i, SampleStatus to, int iteration);
  std::vector<Index> collect(SampleStatus s) const;

  std::vector<SampleStatus> status_;
  std::vector<int> screened_at_;
  Index n_zero_ = 0;
  Index n_C_ = 0;
};

struct TraceRow {
  int iter = 0;
  double gap = 0.0;
  double radius = 0.0;
  Index n_zero = 0;
  Index n_C = 0;
  Index n_free = 0;
  double seconds = 0.0;
};

struct ScreenTrace {
  std::vector<TraceRow> rows;

  /// Header `iter,gap,radius,n_zero,n_C,n_free,seconds`.
  std::string to_csv() const;
};

/// Partition from exact margins of a certified optimum: psi > 1 + tol goes
/// to R, psi < 1 - tol to S, the rest stays free. Throws ValidationError
/// when iterate.gap exceeds max_gap.
Partition ideal_screen(const DualIterate& certified, const Dataset& ds, double tol = 1e-7,
                       double max_gap = 1e-10);

struct ScreenOptions {
  double eps = 1e-6;  ///< absolute gap target
  Index f_min = 0;    ///< stop screening once |F| <= f_min
  int screen_every = 10;
  /// Inner solve also stops early once the free projected-gradient norm
  /// has dropped to this fraction of its value at the start of the round.
  double inner_decrease = 0.1;
  int max_epochs = 1000000;
  /// Called at every outer iteration with the ball used for screening.
  std::function<void(const SafeBall&)> on_ball;
};

struct ScreenResult {
  DualIterate iterate;  ///< final certified iterate; iterate.w is the model
  Partition partition;
  ScreenTrace trace;
  bool converged = false;
  int epochs = 0;
};

/// Dynamic safe screening driver.
///
/// Alternates a short inner ascent over F (R pinned at 0, S pinned at C)
/// with a gap evaluation of the full problem and a screening pass over F.
/// Once the gap reaches eps or |F| <= f_min, a final ascent runs over
/// A = F u S with R pinned at 0.
ScreenResult dynamic_screen(const Dataset& ds, const Hyperparams& hp, const ScreenOptions& options);

struct AuditReport {
  bool passed = true;
  bool reference_certified = false;
  double reference_gap = 0.0;
  std::vector<Index> bad_zero;  ///< in R but neither alpha* = 0 nor psi* >= 1 - tol
  std::vector<Index> bad_C;     ///< in S but neither alpha* = C nor psi* <= 1 + tol
};

/// Checks a partition against an unscreened reference optimum. A sample
/// passes if its reference alpha sits at the certified bound (within 1e-5 C)
/// or, failing that, the reference margin is on the certified side of 1
/// (within margin_tol); the latter covers non-unique dual optima.
AuditReport verify_no_false_screening(const Partition& partition, const Dataset& ds,
                                      const Hyperparams& hp, const DualIterate& reference,
                                      double margin_tol = 1e-6);

/// Same, computing the reference with an unscreened solve to gap <= 1e-10.
AuditReport verify_no_false_screening(const Partition& partition, const Dataset& ds,
                                      const Hyperparams& hp);

}  // namespace rsvm
