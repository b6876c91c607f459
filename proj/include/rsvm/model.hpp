#pragma once

#include <limits>

#include "rsvm/data.hpp"

namespace rsvm {

/// Gaps in [-kGapFloor, 0) are rounding noise and are clamped to 0; anything
/// lower means the primal/dual pair is inconsistent.
inline constexpr double kGapFloor = 1e-9;

struct Hyperparams {
  double C = 1.0;         ///< regularization, > 0
  double gap_tol = 1e-6;  ///< absolute duality-gap target, > 0
  int max_epochs = 100000;

  void validate() const;
};

/// d = sum_i alpha_i y_i x_i and s = sum_i alpha_i rho_i.
struct DualAggregates {
  Vector d;
  double s = 0.0;
};

/// A dual point together with everything derived from it.
struct DualIterate {
  Vector alpha;
  Vector d;
  double s = 0.0;
  Vector w;  ///< primal point recovered from (d, s)
  double dual_value = 0.0;
  double primal_value = 0.0;
  double gap = 0.0;
};

struct GapReport {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

/// [1 - y <w, x> + rho ||w||]_+
double robust_loss(const Vector& w, const SampleView& sample);

/// 1/2 ||w||^2 + C sum_i robust_loss(w, i)
double primal_objective(const Vector& w, const Dataset& ds, const Hyperparams& hp);

DualAggregates dual_aggregates(const Vector& alpha, const Dataset& ds);

/// 1'alpha - 1/2 [||d|| - s]_+^2. Throws ValidationError when alpha leaves [0, C]^n.
double dual_objective(const Vector& alpha, const Dataset& ds, const Hyperparams& hp);

/// Same value from precomputed aggregates and sum(alpha).
double dual_objective(double alpha_sum, const DualAggregates& agg);

/// w = 0 if ||d|| <= s, else (1 - s/||d||) d.
Vector primal_from_dual(const Vector& alpha, const Dataset& ds);
Vector primal_from_aggregates(const DualAggregates& agg);

/// Clamps rounding-level negative gaps to 0; throws NumericalError below -kGapFloor.
double certify_gap(double primal, double dual);

GapReport duality_gap(const Vector& alpha, const Dataset& ds, const Hyperparams& hp);

/// Full evaluation (aggregates, w, P, D, gap) of a feasible dual point.
DualIterate evaluate_iterate(const Vector& alpha, const Dataset& ds, const Hyperparams& hp);

/// Robust functional margin psi = y <w, x> - rho ||w||.
double margin(const Vector& w, const SampleView& sample);
Vector margins(const Vector& w, const Dataset& ds);

struct KktReport {
  Vector violation;  ///< per-sample distance from the complementarity case table
  double max_violation = 0.0;
  Index worst = -1;
  Index num_violations = 0;  ///< samples with violation > tol
};

/// Checks alpha against the optimality case table: alpha_i = 0 needs psi_i >= 1,
/// alpha_i = C needs psi_i <= 1, interior needs psi_i = 1; psi taken at the
/// primal point recovered from alpha.
KktReport kkt_residuals(const Vector& alpha, const Dataset& ds, const Hyperparams& hp,
                        double tol = 1e-4);

void check_box(const Vector& alpha, const Dataset& ds, const Hyperparams& hp);

}  // namespace rsvm
