#include "rsvm/screening.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "rsvm/errors.hpp"

namespace rsvm {

SafeBall gap_ball(const DualIterate& iterate) {
  const double gap = certify_gap(iterate.gap, 0.0);
  return {iterate.w, std::sqrt(2.0 * gap), gap};
}

MarginBounds margin_bounds(const SafeBall& ball, const SampleView& sample) {
  if (ball.center.size() != sample.features.size()) {
    throw ValidationError("ball center and sample dimensions differ");
  }
  const double r = ball.radius;
  const double inner = sample.label * sample.features.dot(ball.center.transpose());
  const double center_norm = ball.center.norm();
  const double reach = r * sample.features.norm();
  const double min_norm = std::max(center_norm - r, 0.0);
  return {inner - sample.radius * (center_norm + r) - reach, inner - sample.radius * min_norm + reach};
}

ScreenDecision classify(const MarginBounds& bounds) {
  if (bounds.lower > 1.0) return ScreenDecision::ScreenZero;
  if (bounds.upper < 1.0) return ScreenDecision::ScreenC;
  return ScreenDecision::Keep;
}

// ---------------------------------------------------------------------------

Partition::Partition(Index n)
    : status_(static_cast<std::size_t>(n), SampleStatus::Free),
      screened_at_(static_cast<std::size_t>(n), -1) {
  if (n < 1) throw ValidationError("partition needs at least one sample");
}

void Partition::move(Index i, SampleStatus to, int iteration) {
  auto& st = status_.at(static_cast<std::size_t>(i));
  if (st != SampleStatus::Free) {
    throw NumericalError("sample " + std::to_string(i) + " screened twice");
  }
  st = to;
  screened_at_[static_cast<std::size_t>(i)] = iteration;
  (to == SampleStatus::Zero ? n_zero_ : n_C_) += 1;
}

void Partition::screen_zero(Index i, int iteration) { move(i, SampleStatus::Zero, iteration); }
void Partition::screen_C(Index i, int iteration) { move(i, SampleStatus::AtC, iteration); }

std::vector<Index> Partition::collect(SampleStatus s) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < status_.size(); ++i) {
    if (status_[i] == s) out.push_back(static_cast<Index>(i));
  }
  return out;
}

void Partition::check() const {
  Index z = 0, c = 0;
  for (const auto s : status_) {
    z += s == SampleStatus::Zero;
    c += s == SampleStatus::AtC;
  }
  if (z != n_zero_ || c != n_C_) throw NumericalError("partition counts out of sync");
}

std::string ScreenTrace::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "iter,gap,radius,n_zero,n_C,n_free,seconds\n";
  for (const auto& r : rows) {
    out << r.iter << ',' << r.gap << ',' << r.radius << ',' << r.n_zero << ',' << r.n_C << ','
        << r.n_free << ',' << r.seconds << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

Partition ideal_screen(const DualIterate& certified, const Dataset& ds, double tol, double max_gap) {
  if (!(certified.gap <= max_gap)) {
    throw ValidationError("ideal screening needs a certified optimum (gap " +
                          std::to_string(certified.gap) + " > " + std::to_string(max_gap) + ")");
  }
  const Vector psi = margins(certified.w, ds);
  Partition p(ds.size());
  for (Index i = 0; i < ds.size(); ++i) {
    if (psi[i] > 1.0 + tol) {
      p.screen_zero(i, 0);
    } else if (psi[i] < 1.0 - tol) {
      p.screen_C(i, 0);
    }
  }
  return p;
}

namespace {

using Clock = std::chrono::steady_clock;

void validate(const ScreenOptions& o) {
  if (!(o.eps > 0.0)) throw ValidationError("eps must be positive");
  if (o.f_min < 0) throw ValidationError("F_min must be >= 0");
  if (o.screen_every < 1) throw ValidationError("screen_every must be >= 1");
  if (!(o.inner_decrease > 0.0 && o.inner_decrease <= 1.0)) {
    throw ValidationError("inner_decrease must lie in (0, 1]");
  }
  if (o.max_epochs < 0) throw ValidationError("max_epochs must be >= 0");
}

}  // namespace

ScreenResult dynamic_screen(const Dataset& ds, const Hyperparams& hp, const ScreenOptions& options) {
  hp.validate();
  validate(options);
  const auto start = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  ProjectedAscent engine(ds, hp, Vector::Zero(ds.size()));
  ScreenResult result{{}, Partition(ds.size()), {}, false, 0};
  Partition& part = result.partition;

  DualIterate it;
  for (int k = 0;; ++k) {
    it = engine.evaluate();
    const SafeBall ball = gap_ball(it);
    if (options.on_ball) options.on_ball(ball);

    const bool stop = it.gap <= options.eps || part.num_free() <= options.f_min ||
                      result.epochs >= options.max_epochs;
    Index moved = 0;
    if (!stop) {
      for (const Index i : part.free_set()) {
        switch (classify(margin_bounds(ball, ds.sample(i)))) {
          case ScreenDecision::ScreenZero:
            part.screen_zero(i, k);
            engine.pin(i, 0.0);
            ++moved;
            break;
          case ScreenDecision::ScreenC:
            part.screen_C(i, k);
            engine.pin(i, hp.C);
            ++moved;
            break;
          case ScreenDecision::Keep:
            break;
        }
      }
    }
    result.trace.rows.push_back(
        {k, it.gap, ball.radius, part.num_zero(), part.num_C(), part.num_free(), elapsed()});
    if (stop) break;

    engine.set_active(part.free_set());
    const double start_norm = engine.projected_gradient_norm();
    int accepted = 0;
    for (int t = 0; t < options.screen_every && result.epochs < options.max_epochs; ++t) {
      if (engine.step() != ProjectedAscent::StepStatus::Accepted) break;
      ++result.epochs;
      ++accepted;
      if (engine.projected_gradient_norm() <= options.inner_decrease * start_norm) break;
    }
    // The free subproblem cannot move and nothing was screened: leave the
    // loop and let the final solve over F u S take over.
    if (accepted == 0 && moved == 0) {
      it = engine.evaluate();
      break;
    }
  }
  part.check();

  // Final solve over A = F u S with R pinned at 0.
  std::vector<Index> active;
  for (Index i = 0; i < ds.size(); ++i) {
    if (part.status(i) != SampleStatus::Zero) active.push_back(i);
  }
  engine.set_active(std::move(active));
  while (it.gap > options.eps && result.epochs < options.max_epochs) {
    bool stalled = false;
    for (int t = 0; t < options.screen_every && result.epochs < options.max_epochs; ++t) {
      if (engine.step() != ProjectedAscent::StepStatus::Accepted) {
        stalled = true;
        break;
      }
      ++result.epochs;
    }
    it = engine.evaluate();
    if (stalled) break;
  }

  result.converged = it.gap <= options.eps;
  result.iterate = std::move(it);
  return result;
}

// ---------------------------------------------------------------------------

AuditReport verify_no_false_screening(const Partition& partition, const Dataset& ds,
                                      const Hyperparams& hp, const DualIterate& reference,
                                      double margin_tol) {
  if (partition.size() != ds.size() || reference.alpha.size() != ds.size()) {
    throw ValidationError("partition, dataset and reference sizes differ");
  }
  AuditReport report;
  report.reference_gap = reference.gap;
  report.reference_certified = reference.gap <= 1e-10;
  const Vector psi = margins(reference.w, ds);
  const double alpha_tol = 1e-5 * hp.C;
  for (Index i = 0; i < ds.size(); ++i) {
    switch (partition.status(i)) {
      case SampleStatus::Zero:
        if (!(reference.alpha[i] <= alpha_tol) && !(psi[i] >= 1.0 - margin_tol)) {
          report.bad_zero.push_back(i);
        }
        break;
      case SampleStatus::AtC:
        if (!(reference.alpha[i] >= hp.C - alpha_tol) && !(psi[i] <= 1.0 + margin_tol)) {
          report.bad_C.push_back(i);
        }
        break;
      case SampleStatus::Free:
        break;
    }
  }
  report.passed = report.bad_zero.empty() && report.bad_C.empty();
  return report;
}

AuditReport verify_no_false_screening(const Partition& partition, const Dataset& ds,
                                      const Hyperparams& hp) {
  SolveOptions options;
  options.tol = 1e-10;
  options.max_epochs = 2000000;
  const SolveReport ref = solve(ds, hp, {}, Vector::Zero(ds.size()), options);
  return verify_no_false_screening(partition, ds, hp, ref.iterate);
}

}  // namespace rsvm
