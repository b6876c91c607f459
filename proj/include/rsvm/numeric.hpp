#pragma once

#include <cmath>

#include <Eigen/Core>

namespace rsvm {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double init) : sum_(init) {}

  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Component-wise compensated accumulation of scaled vectors.
class CompensatedVectorSum {
 public:
  explicit CompensatedVectorSum(Eigen::Index dim)
      : sum_(Eigen::VectorXd::Zero(dim)), comp_(Eigen::VectorXd::Zero(dim)) {}

  template <typename Derived>
  void add_scaled(double scale, const Eigen::MatrixBase<Derived>& v) noexcept {
    for (Eigen::Index j = 0; j < sum_.size(); ++j) {
      const double x = scale * v(j);
      const double t = sum_[j] + x;
      if (std::abs(sum_[j]) >= std::abs(x)) {
        comp_[j] += (sum_[j] - t) + x;
      } else {
        comp_[j] += (x - t) + sum_[j];
      }
      sum_[j] = t;
    }
  }

  Eigen::VectorXd value() const { return sum_ + comp_; }

 private:
  Eigen::VectorXd sum_;
  Eigen::VectorXd comp_;
};

}  // namespace rsvm
