#pragma once

#include <functional>
#include <vector>

#include "rsvm/data.hpp"
#include "rsvm/model.hpp"

namespace rsvm {

/// Dual coordinates pinned to a bound for the duration of a solve.
struct FrozenAssignment {
  std::vector<Index> fixed_zero;
  std::vector<Index> fixed_C;

  /// Indices in range, no duplicates, the two sets disjoint.
  void validate(Index n) const;
};

struct SolveOptions {
  double tol = 1e-6;
  int max_epochs = 100000;
  /// Full gap evaluation every this many epochs (1 = every epoch).
  int gap_every = 1;
  /// Called with every fully evaluated iterate.
  std::function<void(const DualIterate&)> on_evaluate;
};

struct SolveReport {
  DualIterate iterate;  ///< lowest-gap iterate seen
  int epochs = 0;
  bool converged = false;
  std::vector<double> gap_history;   ///< one entry per evaluation
  std::vector<double> dual_history;  ///< dual value at each evaluation
};

/// Gradient of the dual; all-ones where [||d|| - s]_+ vanishes.
Vector dual_gradient(const Vector& alpha, const Dataset& ds);

/// Clamp to [0, C] and overwrite frozen coordinates with their pinned value.
Vector project_box(Vector v, const Hyperparams& hp, const FrozenAssignment& frozen = {});

/// sum_i (||x_i|| + rho_i)^2, an upper bound on the dual curvature (up to a factor 2).
double curvature_bound(const Dataset& ds);

/// Projected gradient ascent on the dual with Armijo backtracking.
///
/// The engine keeps (d, s, sum alpha) cached and updates them incrementally
/// over the active coordinates; evaluate() recomputes them exactly and
/// returns a certified iterate. Coordinates outside the active set never
/// move except through pin().
class ProjectedAscent {
 public:
  enum class StepStatus { Accepted, Stationary, Stalled };

  static constexpr double kArmijoSigma = 1e-4;

  ProjectedAscent(const Dataset& ds, const Hyperparams& hp, Vector alpha0);

  void set_active(std::vector<Index> active);
  const std::vector<Index>& active() const noexcept { return active_; }

  /// Moves alpha_i to value (in [0, C]) and updates the cached aggregates.
  void pin(Index i, double value);

  /// One epoch: a gradient step over the active coordinates with backtracking.
  StepStatus step();

  /// Norm of the projected gradient restricted to the active set.
  double projected_gradient_norm();

  /// Exact recomputation of aggregates, primal point, objectives and gap.
  DualIterate evaluate();

  const Vector& alpha() const noexcept { return alpha_; }
  double dual_value() const noexcept { return dual_; }

 private:
  void refresh_gradient();
  double active_row_dot(Index i, const Vector& v) const;

  const Dataset& ds_;
  Hyperparams hp_;
  double inv_curvature_;
  Vector alpha_;
  Vector d_;
  double s_ = 0.0;
  double alpha_sum_ = 0.0;
  double dual_ = 0.0;

  std::vector<Index> active_;
  Vector grad_;  // indexed like active_
  bool grad_valid_ = false;

  double step_size_;
  Vector last_step_;
  Vector last_grad_;
  bool has_history_ = false;
};

SolveReport solve(const Dataset& ds, const Hyperparams& hp, const FrozenAssignment& frozen,
                  const Vector& alpha0, const SolveOptions& options);

/// Unconstrained solve from alpha = 0 with hp.gap_tol and hp.max_epochs.
SolveReport solve(const Dataset& ds, const Hyperparams& hp);

struct BruteForceResult {
  Vector alpha;
  double dual_value = 0.0;
};

/// Exhaustive maximization of the dual over the grid {0, C/k, ..., C}^n.
/// Test oracle only; n <= 4.
BruteForceResult brute_force_dual(const Dataset& ds, const Hyperparams& hp, int grid_steps);

}  // namespace rsvm
