#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dstbc/types.hpp"

namespace dstbc {

/// Real orthogonal matrix used to rotate an integer lattice before it is used
/// as a per-group signal set.
struct RotationMatrix {
  RMatrix entries;

  int dim() const { return static_cast<int>(entries.rows()); }

  static RotationMatrix identity(int dim);
  /// Planar rotation by theta = atan(2)/2, the built-in full-diversity choice for dim 2.
  static RotationMatrix standard_2d();
  /// Deterministic orthogonal matrix for dim > 2 (QR of a fixed-seed Gaussian draw).
  /// Callers must still validate it with verify_rotation for their component set.
  static RotationMatrix generic(int dim, std::uint64_t seed = 0x5eedf00dULL);
  /// standard_2d() for dim 2, identity for dim 1, generic() otherwise.
  static RotationMatrix default_for(int dim);

  bool is_orthogonal(double tol = 1e-10) const;
};

/// Finite subset of R^dim with a Gray bit labeling.
///
/// Points are stored as columns. `label_to_index[l]` is the point carrying bit
/// label `l` (bits_per_point wide, MSB first); `index_to_label` is the inverse.
/// Sets built from a rotated PAM lattice remember the rotation and the
/// normalized per-coordinate component levels so full-diversity certificates
/// can be re-derived from the set alone.
class SignalSet {
 public:
  SignalSet(RMatrix points, std::vector<std::uint32_t> label_to_index);

  int dim() const { return static_cast<int>(points_.rows()); }
  int size() const { return static_cast<int>(points_.cols()); }
  int bits_per_point() const { return bits_; }

  const RMatrix& points() const { return points_; }
  auto point(int index) const { return points_.col(index); }

  std::uint32_t index_of_label(std::uint32_t label) const { return label_to_index_[label]; }
  std::uint32_t label_of_index(std::uint32_t index) const { return index_to_label_[index]; }

  double mean_energy() const;

  /// Lattice provenance; empty for sets that were not built from a rotated PAM.
  const RotationMatrix* rotation() const { return has_lattice_ ? &rotation_ : nullptr; }
  const std::vector<double>& components() const { return components_; }

  SignalSet with_lattice(RotationMatrix rotation, std::vector<double> components) &&;

 private:
  RMatrix points_;
  int bits_ = 0;
  std::vector<std::uint32_t> label_to_index_;
  std::vector<std::uint32_t> index_to_label_;
  bool has_lattice_ = false;
  RotationMatrix rotation_;
  std::vector<double> components_;
};

/// Binary-reflected Gray code of `index`.
constexpr std::uint32_t gray_encode(std::uint32_t index) { return index ^ (index >> 1); }

/// M-PAM with Gray labels, levels {±1, ±3, ...} scaled to mean energy 1/2.
SignalSet make_pam(int order);

/// Product of `dim` copies of `pam_order`-PAM (each at mean energy 1/2 per
/// coordinate), Gray-labelled per component, then rotated by Q.
SignalSet make_rotated_lattice(int pam_order, const RotationMatrix& rotation);

/// Square M-QAM rotated by a 2x2 matrix; unit mean energy per point.
SignalSet make_rotated_qam(int order, const RotationMatrix& rotation);

/// True iff every coordinate of every nonzero difference of two points of
/// Q * component_set^dim is bounded away from zero (|coord| > 1e-9).
bool verify_rotation(const RotationMatrix& rotation, std::span<const double> component_set);

/// All pairwise differences of the set's points, deduplicated, zero included.
/// Returned as columns in lexicographic order.
RMatrix difference_set(const SignalSet& set);

}  // namespace dstbc
