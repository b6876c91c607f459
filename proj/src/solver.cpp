#include "rsvm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsvm/errors.hpp"
#include "rsvm/numeric.hpp"

namespace rsvm {

void FrozenAssignment::validate(Index n) const {
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  const auto mark = [&](const std::vector<Index>& set, const char* name) {
    for (const Index i : set) {
      if (i < 0 || i >= n) {
        throw ValidationError(std::string(name) + " index " + std::to_string(i) + " out of range");
      }
      if (seen[i]) throw ValidationError("index " + std::to_string(i) + " frozen twice");
      seen[i] = 1;
    }
  };
  mark(fixed_zero, "fixed_zero");
  mark(fixed_C, "fixed_C");
}

Vector dual_gradient(const Vector& alpha, const Dataset& ds) {
  const DualAggregates agg = dual_aggregates(alpha, ds);
  const double norm_d = agg.d.norm();
  const double m = norm_d - agg.s;
  if (!(m > 0.0)) return Vector::Ones(ds.size());
  const Vector a = ds.labels().cwiseProduct(ds.features() * agg.d) / norm_d;
  return Vector::Ones(ds.size()) - m * (a - ds.radii());
}

Vector project_box(Vector v, const Hyperparams& hp, const FrozenAssignment& frozen) {
  v = v.cwiseMax(0.0).cwiseMin(hp.C);
  for (const Index i : frozen.fixed_zero) v[i] = 0.0;
  for (const Index i : frozen.fixed_C) v[i] = hp.C;
  return v;
}

double curvature_bound(const Dataset& ds) {
  CompensatedSum l;
  for (Index i = 0; i < ds.size(); ++i) {
    const double r = ds.row_norms()[i] + ds.radii()[i];
    l += r * r;
  }
  return l.value();
}

// ---------------------------------------------------------------------------

ProjectedAscent::ProjectedAscent(const Dataset& ds, const Hyperparams& hp, Vector alpha0)
    : ds_(ds), hp_(hp), alpha_(std::move(alpha0)) {
  hp_.validate();
  check_box(alpha_, ds_, hp_);
  const double l = curvature_bound(ds_);
  inv_curvature_ = l > 0.0 ? 1.0 / l : 1e12 * hp_.C;
  step_size_ = inv_curvature_;
  active_.resize(static_cast<std::size_t>(ds_.size()));
  for (Index i = 0; i < ds_.size(); ++i) active_[i] = i;
  evaluate();
}

void ProjectedAscent::set_active(std::vector<Index> active) {
  for (const Index i : active) {
    if (i < 0 || i >= ds_.size()) throw ValidationError("active index out of range");
  }
  active_ = std::move(active);
  grad_valid_ = false;
  has_history_ = false;
}

void ProjectedAscent::pin(Index i, double value) {
  if (!(value >= 0.0 && value <= hp_.C)) throw ValidationError("pinned value outside [0, C]");
  const double delta = value - alpha_[i];
  if (delta == 0.0) return;
  alpha_[i] = value;
  const double old_norm = d_.norm();
  const double old_m = std::max(old_norm - s_, 0.0);
  d_.noalias() += (delta * ds_.labels()[i]) * ds_.features().row(i).transpose();
  s_ += delta * ds_.radii()[i];
  alpha_sum_ += delta;
  const double m = std::max(d_.norm() - s_, 0.0);
  dual_ += delta - 0.5 * (m * m - old_m * old_m);
  grad_valid_ = false;
  has_history_ = false;
}

double ProjectedAscent::active_row_dot(Index i, const Vector& v) const {
  return ds_.features().row(i).dot(v.transpose());
}

void ProjectedAscent::refresh_gradient() {
  const auto k = static_cast<Index>(active_.size());
  grad_.resize(k);
  const double norm_d = d_.norm();
  const double m = norm_d - s_;
  if (!(m > 0.0)) {
    grad_.setOnes();
  } else {
    for (Index t = 0; t < k; ++t) {
      const Index i = active_[t];
      const double a = ds_.labels()[i] * active_row_dot(i, d_) / norm_d;
      grad_[t] = 1.0 - m * (a - ds_.radii()[i]);
    }
  }
  grad_valid_ = true;
}

double ProjectedAscent::projected_gradient_norm() {
  if (!grad_valid_) refresh_gradient();
  double sq = 0.0;
  for (std::size_t t = 0; t < active_.size(); ++t) {
    const double a = alpha_[active_[t]];
    const double g = grad_[static_cast<Index>(t)];
    if ((a <= 0.0 && g < 0.0) || (a >= hp_.C && g > 0.0)) continue;
    sq += g * g;
  }
  return std::sqrt(sq);
}

ProjectedAscent::StepStatus ProjectedAscent::step() {
  if (active_.empty()) return StepStatus::Stationary;
  if (!grad_valid_) refresh_gradient();
  const auto k = static_cast<Index>(active_.size());

  // Barzilai-Borwein trial step from the previous accepted move.
  if (has_history_) {
    const double ss = last_step_.squaredNorm();
    const double neg_sy = -last_step_.dot(grad_ - last_grad_);
    if (neg_sy > 0.0 && ss > 0.0) {
      step_size_ = ss / neg_sy;
    } else {
      step_size_ *= 2.0;
    }
  }
  step_size_ = std::clamp(step_size_, 0.5 * inv_curvature_, 1e8 * inv_curvature_);

  if (projected_gradient_norm() == 0.0) return StepStatus::Stationary;

  const double old_norm = d_.norm();
  const double old_m = std::max(old_norm - s_, 0.0);
  Vector delta(k);
  Vector trial(k);
  Vector dd(ds_.dim());
  double eta = step_size_;
  const double min_eta = 1e-14 * inv_curvature_;

  while (true) {
    double directional = 0.0;
    double dsum = 0.0;
    double dss = 0.0;
    dd.setZero();
    for (Index t = 0; t < k; ++t) {
      const Index i = active_[t];
      const double next = std::clamp(alpha_[i] + eta * grad_[t], 0.0, hp_.C);
      const double step = next - alpha_[i];
      trial[t] = next;
      delta[t] = step;
      if (step == 0.0) continue;
      directional += step * grad_[t];
      dsum += step;
      dss += step * ds_.radii()[i];
      dd.noalias() += (step * ds_.labels()[i]) * ds_.features().row(i).transpose();
    }
    if (directional <= 0.0) return StepStatus::Stalled;

    // Dual increase from increments, so tiny steps are not lost to the
    // magnitude of D itself.
    const Vector d_next = d_ + dd;
    const double new_norm = d_next.norm();
    const double new_m = std::max(new_norm - (s_ + dss), 0.0);
    double quad_change;
    if (old_m > 0.0 && new_m > 0.0) {
      const double norm_change =
          (old_norm + new_norm) > 0.0 ? (2.0 * d_.dot(dd) + dd.squaredNorm()) / (old_norm + new_norm) : 0.0;
      const double m_change = norm_change - dss;
      quad_change = 0.5 * m_change * (old_m + new_m);
    } else {
      quad_change = 0.5 * (new_m * new_m - old_m * old_m);
    }
    const double gain = dsum - quad_change;
    if (!std::isfinite(gain)) throw NumericalError("non-finite dual objective during line search");

    if (gain >= kArmijoSigma * directional) {
      // Assign rather than add the increment: a + (next - a) can round past a bound.
      for (Index t = 0; t < k; ++t) alpha_[active_[t]] = trial[t];
      d_ = d_next;
      s_ += dss;
      alpha_sum_ += dsum;
      dual_ += gain;
      last_step_ = delta;
      last_grad_ = grad_;
      has_history_ = true;
      step_size_ = eta;
      grad_valid_ = false;
      return StepStatus::Accepted;
    }
    eta *= 0.5;
    if (eta < min_eta) return StepStatus::Stalled;
  }
}

DualIterate ProjectedAscent::evaluate() {
  DualIterate it = evaluate_iterate(alpha_, ds_, hp_);
  d_ = it.d;
  s_ = it.s;
  CompensatedSum sum;
  for (Index i = 0; i < alpha_.size(); ++i) sum += alpha_[i];
  alpha_sum_ = sum.value();
  dual_ = it.dual_value;
  grad_valid_ = false;
  return it;
}

// ---------------------------------------------------------------------------

SolveReport solve(const Dataset& ds, const Hyperparams& hp, const FrozenAssignment& frozen,
                  const Vector& alpha0, const SolveOptions& options) {
  hp.validate();
  frozen.validate(ds.size());
  if (!(options.tol >= 0.0)) throw ValidationError("solve tolerance must be >= 0");
  if (options.gap_every < 1) throw ValidationError("gap_every must be >= 1");
  check_box(alpha0, ds, hp);

  std::vector<char> pinned(static_cast<std::size_t>(ds.size()), 0);
  for (const Index i : frozen.fixed_zero) {
    if (alpha0[i] != 0.0) throw ValidationError("alpha0 inconsistent with fixed_zero");
    pinned[i] = 1;
  }
  for (const Index i : frozen.fixed_C) {
    if (alpha0[i] != hp.C) throw ValidationError("alpha0 inconsistent with fixed_C");
    pinned[i] = 1;
  }
  std::vector<Index> active;
  for (Index i = 0; i < ds.size(); ++i) {
    if (!pinned[i]) active.push_back(i);
  }

  ProjectedAscent engine(ds, hp, alpha0);
  engine.set_active(std::move(active));

  SolveReport report;
  bool have_best = false;
  const auto evaluate = [&] {
    DualIterate it = engine.evaluate();
    report.gap_history.push_back(it.gap);
    report.dual_history.push_back(it.dual_value);
    if (options.on_evaluate) options.on_evaluate(it);
    const bool done = it.gap <= options.tol;
    if (!have_best || it.gap < report.iterate.gap) {
      report.iterate = std::move(it);
      have_best = true;
    }
    return done;
  };

  bool done = evaluate();
  while (!done && report.epochs < options.max_epochs) {
    const auto status = engine.step();
    if (status == ProjectedAscent::StepStatus::Accepted) ++report.epochs;
    const bool stop = status != ProjectedAscent::StepStatus::Accepted;
    if (stop || report.epochs % options.gap_every == 0 || report.epochs == options.max_epochs) {
      done = evaluate();
    }
    if (stop) break;
  }
  report.converged = report.iterate.gap <= options.tol;
  return report;
}

SolveReport solve(const Dataset& ds, const Hyperparams& hp) {
  SolveOptions options;
  options.tol = hp.gap_tol;
  options.max_epochs = hp.max_epochs;
  return solve(ds, hp, {}, Vector::Zero(ds.size()), options);
}

}  // namespace rsvm
