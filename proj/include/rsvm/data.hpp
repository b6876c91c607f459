#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace rsvm {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Read-only view of one training sample: nominal input, label and the
/// radius of its l2 uncertainty ball.
struct SampleView {
  Eigen::Ref<const Eigen::RowVectorXd> features;
  int label;
  double radius;
};

/// Owning sample, convenient for hand-built examples.
struct Sample {
  Vector features;
  int label = 1;
  double radius = 0.0;

  SampleView view() const { return {features.transpose(), label, radius}; }
};

/// Dense binary-classification dataset with per-sample uncertainty radii.
///
/// Immutable after construction; every transformation returns a new
/// dataset and keeps row i referring to original sample i.
class Dataset {
 public:
  /// Validates shapes, labels in {-1, +1}, finite features and radii >= 0.
  Dataset(Matrix features, Vector labels, Vector radii);

  Index size() const noexcept { return features_.rows(); }
  Index dim() const noexcept { return features_.cols(); }

  const Matrix& features() const noexcept { return features_; }
  const Vector& labels() const noexcept { return labels_; }
  const Vector& radii() const noexcept { return radii_; }

  SampleView sample(Index i) const {
    return {features_.row(i), labels_[i] > 0 ? 1 : -1, radii_[i]};
  }

  /// ||x_i||_2 for every row, cached at construction.
  const Vector& row_norms() const noexcept { return row_norms_; }

  bool operator==(const Dataset& other) const;

 private:
  Matrix features_;
  Vector labels_;
  Vector radii_;
  Vector row_norms_;
};

Dataset parse_libsvm(std::string_view text);

/// Writes the LIBSVM sparse format with round-trip precision. An explicit
/// zero is emitted for the last column when no row stores a value there,
/// so re-parsing recovers the same dimension.
std::string write_libsvm(const Dataset& ds);

struct CsvOptions {
  Index label_column = 0;
  bool has_header = false;
  char delimiter = ',';
};

Dataset parse_csv(std::string_view text, const CsvOptions& options = {});

/// Appends a constant 1.0 coordinate to every sample. Radii are unchanged,
/// so the uncertainty ball also perturbs the constant coordinate.
Dataset augment_bias(const Dataset& ds);

struct Standardized {
  Dataset dataset;
  Vector mean;
  Vector scale;  // population std; 0 marks a constant feature (centered only)
};

Standardized standardize(const Dataset& ds);

struct GaussianSpec {
  Index n = 200;
  Index dim = 2;
  double separation = 3.0;
  double noise_std = 1.0;
  std::uint64_t seed = 0;
};

/// Two isotropic Gaussian classes centered at +-(separation/2) e_1.
/// Even rows are labelled +1, odd rows -1. Draws come from std::mt19937_64
/// (fully specified by the standard) through a hand-written Box-Muller
/// transform, so output is bit-identical across conforming platforms.
Dataset gen_gaussian(const GaussianSpec& spec);

Dataset set_radii(const Dataset& ds, double rho);
Dataset set_radii(const Dataset& ds, std::span<const double> rho);

/// One nonnegative radius per nonempty line.
Vector parse_radii(std::string_view text);

}  // namespace rsvm
