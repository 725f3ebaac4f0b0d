#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dstbc/constellation.hpp"
#include "dstbc/construct.hpp"
#include "dstbc/types.hpp"

namespace dstbc {

/// Whitened real model y = G x + n together with the grouping and per-group
/// signal sets. The grouping and sets are borrowed and must outlive the problem.
struct DecodeProblem {
  RMatrix G;
  RVector y;
  const GroupingScheme* grouping = nullptr;
  std::span<const SignalSet> group_sets;

  DecodeProblem(RMatrix G, RVector y, const GroupingScheme& grouping, std::span<const SignalSet> sets);

  int group_count() const { return grouping->group_count(); }
};

struct DecodeResult {
  RVector x_hat;
  std::vector<int> point_indices;          // chosen point per group
  std::vector<double> per_group_residuals; // minimized metric per group
};

/// I - Q Q^T with Q an orthonormal basis of col(M); numerical rank counts
/// singular values above tol * sigma_max. An empty M gives the identity.
RMatrix projector_complement(const RMatrix& M, double tol = 1e-10);

/// Columns of G selected by `indices`, in order.
RMatrix select_columns(const RMatrix& G, std::span<const int> indices);

DecodeResult pic_decode(const DecodeProblem& problem);
DecodeResult pic_sic_decode(const DecodeProblem& problem);

/// Singleton refinements of PIC / PIC-SIC. Groups of size > 1 are split only
/// when their signal set is a Cartesian product of its coordinate projections.
DecodeResult zf_decode(const DecodeProblem& problem);
DecodeResult zf_sic_decode(const DecodeProblem& problem);

inline constexpr std::uint64_t kDefaultMlCap = std::uint64_t{1} << 20;

/// Exhaustive minimization of ||y - G x|| over the product of the group sets.
DecodeResult ml_decode(const DecodeProblem& problem, std::uint64_t cap = kDefaultMlCap);

enum class Decoder { ml, pic, pic_sic, zf, zf_sic };

Decoder parse_decoder(const std::string& name);
std::string to_string(Decoder decoder);
DecodeResult decode(Decoder decoder, const DecodeProblem& problem);

/// Euclidean residual ||y - G x_hat||.
double residual_norm(const DecodeProblem& problem, const RVector& x_hat);

}  // namespace dstbc
