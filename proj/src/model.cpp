#include "rsvm/model.hpp"

#include <cmath>
#include <string>

#include "rsvm/errors.hpp"
#include "rsvm/numeric.hpp"

namespace rsvm {

void Hyperparams::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw ValidationError("C must be positive and finite");
  if (!(gap_tol > 0.0)) throw ValidationError("gap tolerance must be positive");
  if (max_epochs < 0) throw ValidationError("max_epochs must be >= 0");
}

namespace {

void check_dim(const Vector& w, Index dim) {
  if (w.size() != dim) {
    throw ValidationError("weight dimension " + std::to_string(w.size()) +
                          " does not match data dimension " + std::to_string(dim));
  }
}

void check_length(const Vector& alpha, const Dataset& ds) {
  if (alpha.size() != ds.size()) {
    throw ValidationError("alpha has length " + std::to_string(alpha.size()) + ", expected " +
                          std::to_string(ds.size()));
  }
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

void check_box(const Vector& alpha, const Dataset& ds, const Hyperparams& hp) {
  check_length(alpha, ds);
  for (Index i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] >= 0.0 && alpha[i] <= hp.C)) {
      throw ValidationError("alpha[" + std::to_string(i) + "] = " + std::to_string(alpha[i]) +
                            " outside [0, C]");
    }
  }
}

double robust_loss(const Vector& w, const SampleView& sample) {
  check_dim(w, sample.features.size());
  return positive_part(1.0 - margin(w, sample));
}

double margin(const Vector& w, const SampleView& sample) {
  check_dim(w, sample.features.size());
  return sample.label * sample.features.dot(w.transpose()) - sample.radius * w.norm();
}

Vector margins(const Vector& w, const Dataset& ds) {
  check_dim(w, ds.dim());
  const Vector xw = ds.features() * w;
  return ds.labels().cwiseProduct(xw) - w.norm() * ds.radii();
}

double primal_objective(const Vector& w, const Dataset& ds, const Hyperparams& hp) {
  const Vector psi = margins(w, ds);
  CompensatedSum loss;
  for (Index i = 0; i < psi.size(); ++i) loss += positive_part(1.0 - psi[i]);
  const double p = 0.5 * w.squaredNorm() + hp.C * loss.value();
  if (!std::isfinite(p)) throw NumericalError("primal objective is not finite");
  return p;
}

DualAggregates dual_aggregates(const Vector& alpha, const Dataset& ds) {
  check_length(alpha, ds);
  CompensatedVectorSum d(ds.dim());
  CompensatedSum s;
  for (Index i = 0; i < ds.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    d.add_scaled(alpha[i] * ds.labels()[i], ds.features().row(i));
    s += alpha[i] * ds.radii()[i];
  }
  return {d.value(), s.value()};
}

double dual_objective(double alpha_sum, const DualAggregates& agg) {
  const double m = positive_part(agg.d.norm() - agg.s);
  const double v = alpha_sum - 0.5 * m * m;
  if (!std::isfinite(v)) throw NumericalError("dual objective is not finite");
  return v;
}

double dual_objective(const Vector& alpha, const Dataset& ds, const Hyperparams& hp) {
  check_box(alpha, ds, hp);
  CompensatedSum sum;
  for (Index i = 0; i < alpha.size(); ++i) sum += alpha[i];
  return dual_objective(sum.value(), dual_aggregates(alpha, ds));
}

Vector primal_from_aggregates(const DualAggregates& agg) {
  const double norm_d = agg.d.norm();
  if (norm_d <= agg.s) return Vector::Zero(agg.d.size());
  return (1.0 - agg.s / norm_d) * agg.d;
}

Vector primal_from_dual(const Vector& alpha, const Dataset& ds) {
  return primal_from_aggregates(dual_aggregates(alpha, ds));
}

double certify_gap(double primal, double dual) {
  const double gap = primal - dual;
  if (!std::isfinite(gap)) throw NumericalError("duality gap is not finite");
  if (gap < -kGapFloor) {
    throw NumericalError("negative duality gap " + std::to_string(gap) +
                         " violates weak duality");
  }
  return gap < 0.0 ? 0.0 : gap;
}

DualIterate evaluate_iterate(const Vector& alpha, const Dataset& ds, const Hyperparams& hp) {
  check_box(alpha, ds, hp);
  DualIterate it;
  it.alpha = alpha;
  DualAggregates agg = dual_aggregates(alpha, ds);
  CompensatedSum sum;
  for (Index i = 0; i < alpha.size(); ++i) sum += alpha[i];
  it.dual_value = dual_objective(sum.value(), agg);
  it.w = primal_from_aggregates(agg);
  it.primal_value = primal_objective(it.w, ds, hp);
  it.gap = certify_gap(it.primal_value, it.dual_value);
  it.d = std::move(agg.d);
  it.s = agg.s;
  return it;
}

GapReport duality_gap(const Vector& alpha, const Dataset& ds, const Hyperparams& hp) {
  const DualIterate it = evaluate_iterate(alpha, ds, hp);
  return {it.primal_value, it.dual_value, it.gap};
}

KktReport kkt_residuals(const Vector& alpha, const Dataset& ds, const Hyperparams& hp,
                        double tol) {
  check_box(alpha, ds, hp);
  const Vector psi = margins(primal_from_dual(alpha, ds), ds);
  KktReport report;
  report.violation.resize(ds.size());
  for (Index i = 0; i < ds.size(); ++i) {
    double v = 0.0;
    if (alpha[i] == 0.0) {
      v = positive_part(1.0 - psi[i]);
    } else if (alpha[i] == hp.C) {
      v = positive_part(psi[i] - 1.0);
    } else {
      v = std::abs(psi[i] - 1.0);
    }
    report.violation[i] = v;
    if (report.worst < 0 || v > report.max_violation) {
      report.max_violation = v;
      report.worst = i;
    }
    if (v > tol) ++report.num_violations;
  }
  return report;
}

}  // namespace rsvm
