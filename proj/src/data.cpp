#include "rsvm/data.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rsvm/errors.hpp"
#include "rsvm/numeric.hpp"
#include "text_util.hpp"

namespace rsvm {

Dataset::Dataset(Matrix features, Vector labels, Vector radii)
    : features_(std::move(features)), labels_(std::move(labels)), radii_(std::move(radii)) {
  if (features_.rows() < 1) throw ValidationError("dataset must contain at least one sample");
  if (features_.cols() < 1) throw ValidationError("dataset must have dimension >= 1");
  if (labels_.size() != features_.rows()) {
    throw ValidationError("label count " + std::to_string(labels_.size()) +
                          " does not match sample count " + std::to_string(features_.rows()));
  }
  if (radii_.size() != features_.rows()) {
    throw ValidationError("radius count " + std::to_string(radii_.size()) +
                          " does not match sample count " + std::to_string(features_.rows()));
  }
  for (Index i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1.0 && labels_[i] != -1.0) {
      throw ValidationError("sample " + std::to_string(i) + ": label must be -1 or +1");
    }
    if (!std::isfinite(radii_[i]) || radii_[i] < 0.0) {
      throw ValidationError("sample " + std::to_string(i) + ": radius must be finite and >= 0");
    }
  }
  if (!features_.allFinite()) throw ValidationError("features contain NaN or Inf");
  row_norms_ = features_.rowwise().norm();
}

bool Dataset::operator==(const Dataset& other) const {
  return features_.rows() == other.features_.rows() && features_.cols() == other.features_.cols() &&
         features_ == other.features_ && labels_ == other.labels_ && radii_ == other.radii_;
}

Dataset augment_bias(const Dataset& ds) {
  Matrix x(ds.size(), ds.dim() + 1);
  x.leftCols(ds.dim()) = ds.features();
  x.col(ds.dim()).setOnes();
  return Dataset(std::move(x), ds.labels(), ds.radii());
}

Standardized standardize(const Dataset& ds) {
  const Index n = ds.size();
  if (n < 2) throw ValidationError("standardize needs at least 2 samples");
  const Index d = ds.dim();
  Vector mean(d), scale(d);
  Matrix x = ds.features();
  for (Index j = 0; j < d; ++j) {
    CompensatedSum sum;
    for (Index i = 0; i < n; ++i) sum += x(i, j);
    const double mu = sum.value() / static_cast<double>(n);
    CompensatedSum sq;
    for (Index i = 0; i < n; ++i) {
      const double c = x(i, j) - mu;
      sq += c * c;
    }
    const double sd = std::sqrt(sq.value() / static_cast<double>(n));
    mean[j] = mu;
    scale[j] = sd > 0.0 ? sd : 0.0;
    for (Index i = 0; i < n; ++i) {
      x(i, j) = sd > 0.0 ? (x(i, j) - mu) / sd : x(i, j) - mu;
    }
  }
  return {Dataset(std::move(x), ds.labels(), ds.radii()), std::move(mean), std::move(scale)};
}

namespace {

// Uniform in (0, 1]: top 53 bits, shifted off zero so log() stays finite.
double unit_open(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
}

class BoxMuller {
 public:
  explicit BoxMuller(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = unit_open(gen_);
    const double u2 = unit_open(gen_);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

Dataset gen_gaussian(const GaussianSpec& spec) {
  if (spec.n < 2 || spec.n % 2 != 0) throw ValidationError("n must be even and >= 2");
  if (spec.dim < 1) throw ValidationError("dimension must be >= 1");
  if (!(spec.noise_std > 0.0) || !std::isfinite(spec.noise_std)) {
    throw ValidationError("noise_std must be positive");
  }
  if (!std::isfinite(spec.separation)) throw ValidationError("separation must be finite");

  BoxMuller normal(spec.seed);
  Matrix x(spec.n, spec.dim);
  Vector y(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    y[i] = (i % 2 == 0) ? 1.0 : -1.0;
    for (Index j = 0; j < spec.dim; ++j) x(i, j) = spec.noise_std * normal.next();
    x(i, 0) += y[i] * 0.5 * spec.separation;
  }
  return Dataset(std::move(x), std::move(y), Vector::Zero(spec.n));
}

Dataset set_radii(const Dataset& ds, double rho) {
  if (!std::isfinite(rho) || rho < 0.0) throw ValidationError("rho must be finite and >= 0");
  return Dataset(ds.features(), ds.labels(), Vector::Constant(ds.size(), rho));
}

Dataset set_radii(const Dataset& ds, std::span<const double> rho) {
  if (static_cast<Index>(rho.size()) != ds.size()) {
    throw ValidationError("expected " + std::to_string(ds.size()) + " radii, got " +
                          std::to_string(rho.size()));
  }
  Vector r(ds.size());
  for (Index i = 0; i < ds.size(); ++i) {
    if (!std::isfinite(rho[i]) || rho[i] < 0.0) {
      throw ValidationError("radius " + std::to_string(i) + " must be finite and >= 0");
    }
    r[i] = rho[i];
  }
  return Dataset(ds.features(), ds.labels(), std::move(r));
}

Vector parse_radii(std::string_view text) {
  std::vector<double> values;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    line = detail::trim(line);
    if (line.empty()) return;
    const auto v = detail::parse_double(line);
    if (!v || *v < 0.0) {
      throw ParseError(ParseError::Kind::Malformed, line_no, "expected a nonnegative number");
    }
    values.push_back(*v);
  });
  if (values.empty()) throw ParseError(ParseError::Kind::EmptyInput, 0, "radius file is empty");
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace rsvm
