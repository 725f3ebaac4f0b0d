#include "dstbc/constellation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace dstbc {
namespace {

bool is_power_of_two(int v) { return v > 0 && std::has_single_bit(static_cast<unsigned>(v)); }

// Normalized PAM levels in ascending order, mean energy 1/2.
std::vector<double> pam_levels(int order) {
  if (!is_power_of_two(order) || order < 2)
    throw ParameterError("PAM order must be a power of two >= 2, got " + std::to_string(order));
  const double unnormalized_energy = (static_cast<double>(order) * order - 1.0) / 3.0;
  const double scale = 1.0 / std::sqrt(2.0 * unnormalized_energy);
  std::vector<double> levels(order);
  for (int i = 0; i < order; ++i) levels[i] = (2.0 * i - (order - 1)) * scale;
  return levels;
}

}  // namespace

RotationMatrix RotationMatrix::identity(int dim) {
  if (dim < 1) throw ParameterError("rotation dimension must be >= 1");
  return {RMatrix::Identity(dim, dim)};
}

RotationMatrix RotationMatrix::standard_2d() {
  const double theta = 0.5 * std::atan(2.0);
  RMatrix q(2, 2);
  q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return {q};
}

RotationMatrix RotationMatrix::generic(int dim, std::uint64_t seed) {
  if (dim < 1) throw ParameterError("rotation dimension must be >= 1");
  Rng rng(seed + static_cast<std::uint64_t>(dim));
  RMatrix gaussian(dim, dim);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) gaussian(r, c) = unit(rng);
  Eigen::HouseholderQR<RMatrix> qr(gaussian);
  RMatrix q = qr.householderQ() * RMatrix::Identity(dim, dim);
  return {q};
}

RotationMatrix RotationMatrix::default_for(int dim) {
  if (dim == 1) return identity(1);
  if (dim == 2) return standard_2d();
  return generic(dim);
}

bool RotationMatrix::is_orthogonal(double tol) const {
  if (entries.rows() != entries.cols() || entries.rows() == 0) return false;
  const RMatrix gram = entries.transpose() * entries;
  return (gram - RMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff() <= tol;
}

SignalSet::SignalSet(RMatrix points, std::vector<std::uint32_t> label_to_index)
    : points_(std::move(points)), label_to_index_(std::move(label_to_index)) {
  const auto count = points_.cols();
  if (points_.rows() < 1 || count < 1) throw ParameterError("signal set must be nonempty");
  if (!is_power_of_two(static_cast<int>(count)))
    throw ParameterError("signal set size must be a power of two");
  if (static_cast<Eigen::Index>(label_to_index_.size()) != count)
    throw ParameterError("label table size does not match point count");
  bits_ = std::countr_zero(static_cast<unsigned>(count));
  index_to_label_.assign(count, 0);
  std::vector<bool> seen(count, false);
  for (std::uint32_t label = 0; label < label_to_index_.size(); ++label) {
    const auto index = label_to_index_[label];
    if (index >= count || seen[index]) throw ParameterError("labels are not a bijection");
    seen[index] = true;
    index_to_label_[index] = label;
  }
  for (Eigen::Index i = 0; i < count; ++i)
    for (Eigen::Index j = i + 1; j < count; ++j)
      if ((points_.col(i) - points_.col(j)).norm() == 0.0)
        throw ParameterError("signal set points must be distinct");
}

double SignalSet::mean_energy() const { return points_.colwise().squaredNorm().mean(); }

SignalSet SignalSet::with_lattice(RotationMatrix rotation, std::vector<double> components) && {
  has_lattice_ = true;
  rotation_ = std::move(rotation);
  components_ = std::move(components);
  return std::move(*this);
}

SignalSet make_pam(int order) {
  const auto levels = pam_levels(order);
  RMatrix points(1, order);
  std::vector<std::uint32_t> labels(order);
  for (int i = 0; i < order; ++i) {
    points(0, i) = levels[i];
    labels[gray_encode(static_cast<std::uint32_t>(i))] = static_cast<std::uint32_t>(i);
  }
  return SignalSet(std::move(points), std::move(labels))
      .with_lattice(RotationMatrix::identity(1), levels);
}

SignalSet make_rotated_lattice(int pam_order, const RotationMatrix& rotation) {
  const int dim = rotation.dim();
  if (dim < 1 || rotation.entries.cols() != dim)
    throw ParameterError("rotation must be square with dim >= 1");
  if (!rotation.is_orthogonal()) throw ParameterError("rotation matrix is not orthogonal");
  const auto levels = pam_levels(pam_order);
  const int bits_per_component = std::countr_zero(static_cast<unsigned>(pam_order));
  if (bits_per_component * dim > 24) throw ParameterError("rotated lattice too large");

  const int count = 1 << (bits_per_component * dim);
  RMatrix points(dim, count);
  std::vector<std::uint32_t> labels(count);
  for (int index = 0; index < count; ++index) {
    // Mixed-radix digits, first coordinate most significant.
    RVector raw(dim);
    std::uint32_t label = 0;
    int rest = index;
    for (int d = dim - 1; d >= 0; --d) {
      const int digit = rest % pam_order;
      rest /= pam_order;
      raw[d] = levels[digit];
      label |= gray_encode(static_cast<std::uint32_t>(digit)) << (bits_per_component * (dim - 1 - d));
    }
    points.col(index) = rotation.entries * raw;
    labels[label] = static_cast<std::uint32_t>(index);
  }
  return SignalSet(std::move(points), std::move(labels)).with_lattice(rotation, levels);
}

SignalSet make_rotated_qam(int order, const RotationMatrix& rotation) {
  if (rotation.dim() != 2) throw ParameterError("QAM rotation must be 2x2");
  if (!is_power_of_two(order)) throw ParameterError("QAM order must be a power of two");
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
  if (side * side != order || side < 2)
    throw ParameterError("QAM order must be a perfect square, got " + std::to_string(order));
  return make_rotated_lattice(side, rotation);
}

bool verify_rotation(const RotationMatrix& rotation, std::span<const double> component_set) {
  constexpr double kZeroTol = 1e-9;
  const int dim = rotation.dim();
  std::vector<double> diffs;
  for (double a : component_set)
    for (double b : component_set) diffs.push_back(a - b);
  std::sort(diffs.begin(), diffs.end());
  diffs.erase(std::unique(diffs.begin(), diffs.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              diffs.end());
  if (diffs.empty()) return true;

  // Odometer over diffs^dim.
  std::vector<std::size_t> digit(dim, 0);
  RVector d(dim);
  while (true) {
    bool nonzero = false;
    for (int i = 0; i < dim; ++i) {
      d[i] = diffs[digit[i]];
      nonzero = nonzero || std::abs(d[i]) > 1e-12;
    }
    if (nonzero) {
      const RVector rotated = rotation.entries * d;
      if (rotated.cwiseAbs().minCoeff() <= kZeroTol) return false;
    }
    int pos = dim - 1;
    while (pos >= 0 && ++digit[pos] == diffs.size()) digit[pos--] = 0;
    if (pos < 0) break;
  }
  return true;
}

RMatrix difference_set(const SignalSet& set) {
  const int dim = set.dim();
  std::vector<RVector> diffs;
  diffs.reserve(static_cast<std::size_t>(set.size()) * set.size());
  for (int i = 0; i < set.size(); ++i)
    for (int j = 0; j < set.size(); ++j) diffs.emplace_back(set.point(i) - set.point(j));

  auto less = [dim](const RVector& a, const RVector& b) {
    for (int k = 0; k < dim; ++k) {
      if (std::abs(a[k] - b[k]) > 1e-12) return a[k] < b[k];
    }
    return false;
  };
  auto same = [dim](const RVector& a, const RVector& b) {
    for (int k = 0; k < dim; ++k)
      if (std::abs(a[k] - b[k]) > 1e-12) return false;
    return true;
  };
  std::sort(diffs.begin(), diffs.end(), less);
  diffs.erase(std::unique(diffs.begin(), diffs.end(), same), diffs.end());

  RMatrix out(dim, static_cast<Eigen::Index>(diffs.size()));
  for (std::size_t i = 0; i < diffs.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = diffs[i];
  return out;
}

}  // namespace dstbc
