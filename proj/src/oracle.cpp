#include <algorithm>
#include <cmath>
#include <vector>

#include "rsvm/errors.hpp"
#include "rsvm/solver.hpp"

namespace rsvm {

namespace {

// Depth-first walk over the grid with partial sums of d, s and 1'alpha
// carried down the recursion.
class GridSearch {
 public:
  GridSearch(const Dataset& ds, double C, int steps)
      : ds_(ds), n_(ds.size()), dim_(ds.dim()), C_(C), steps_(steps),
        partial_(static_cast<std::size_t>((n_ + 1) * dim_), 0.0),
        choice_(static_cast<std::size_t>(n_), 0),
        best_choice_(static_cast<std::size_t>(n_), 0) {}

  void run() { visit(0, 0.0, 0.0); }

  BruteForceResult result() const {
    BruteForceResult r;
    r.alpha.resize(n_);
    for (Index i = 0; i < n_; ++i) r.alpha[i] = value_at(best_choice_[i]);
    r.dual_value = best_;
    return r;
  }

 private:
  double value_at(int k) const { return k == steps_ ? C_ : C_ * k / steps_; }

  void visit(Index i, double s, double sum) {
    const double* base = &partial_[static_cast<std::size_t>(i * dim_)];
    const double y = ds_.labels()[i];
    const double rho = ds_.radii()[i];
    if (i + 1 == n_) {
      // Last coordinate: ||b + a y x||^2 is a quadratic in a.
      double bb = 0.0, bx = 0.0, xx = 0.0;
      for (Index j = 0; j < dim_; ++j) {
        const double x = y * ds_.features()(i, j);
        bb += base[j] * base[j];
        bx += base[j] * x;
        xx += x * x;
      }
      for (int k = 0; k <= steps_; ++k) {
        const double a = value_at(k);
        const double sq = std::max(bb + a * (2.0 * bx + a * xx), 0.0);
        const double m = std::max(std::sqrt(sq) - (s + a * rho), 0.0);
        const double value = sum + a - 0.5 * m * m;
        if (value > best_) {
          best_ = value;
          choice_[static_cast<std::size_t>(i)] = k;
          best_choice_ = choice_;
        }
      }
      return;
    }
    double* next = &partial_[static_cast<std::size_t>((i + 1) * dim_)];
    for (int k = 0; k <= steps_; ++k) {
      const double a = value_at(k);
      for (Index j = 0; j < dim_; ++j) next[j] = base[j] + a * y * ds_.features()(i, j);
      choice_[static_cast<std::size_t>(i)] = k;
      visit(i + 1, s + a * rho, sum + a);
    }
  }

  const Dataset& ds_;
  Index n_;
  Index dim_;
  double C_;
  int steps_;
  std::vector<double> partial_;
  std::vector<int> choice_;
  std::vector<int> best_choice_;
  double best_ = -INFINITY;
};

}  // namespace

BruteForceResult brute_force_dual(const Dataset& ds, const Hyperparams& hp, int grid_steps) {
  hp.validate();
  if (ds.size() > 4) throw ValidationError("brute_force_dual supports at most 4 samples");
  if (grid_steps < 1) throw ValidationError("grid_steps must be >= 1");
  GridSearch search(ds, hp.C, grid_steps);
  search.run();
  return search.result();
}

}  // namespace rsvm
