#pragma once

#include <span>
#include <vector>

#include "dstbc/types.hpp"

namespace dstbc {

/// Real-linear design X(x) = sum_i x_i A_i over complex T x N weight matrices.
///
/// Conjugated entries such as -w2* are folded into the weights: since every
/// symbol is real, conj(x_p + i x_q) = x_p - i x_q is still R-linear.
class LinearDesign {
 public:
  LinearDesign() = default;
  LinearDesign(int rows, int cols, std::vector<CMatrix> weights);

  int T() const { return rows_; }
  int N() const { return cols_; }
  int K() const { return static_cast<int>(weights_.size()); }

  const std::vector<CMatrix>& weights() const { return weights_; }
  const CMatrix& weight(int i) const { return weights_.at(static_cast<std::size_t>(i)); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<CMatrix> weights_;
};

CMatrix evaluate(const LinearDesign& design, std::span<const double> x);
CMatrix evaluate(const LinearDesign& design, const RVector& x);

/// Realified stacking [vec(Re A_i); vec(Im A_i)] as columns, 2TN x K.
RMatrix realified_weights(const LinearDesign& design);

/// True when the K weights are linearly independent over R.
bool weights_independent(const LinearDesign& design, double tol = 1e-10);

/// A complex orthogonal design: A_i^H A_j + A_j^H A_i = 2 delta_ij I.
struct CodProfile {
  LinearDesign design;

  int rows() const { return design.T(); }
  int cols() const { return design.N(); }
  int symbols() const { return design.K(); }
};

/// The 1x1 design [s1 + i s2].
CodProfile cod_trivial();
/// The Alamouti design [[w1, w2], [-w2*, w1*]] with w1 = x1 + i x2, w2 = x3 + i x4.
CodProfile cod_alamouti();

bool verify_cod(const CodProfile& cod, double tol = 1e-12);

/// Lays the COD over `total_symbols` real symbols: global (0-based) symbol
/// `symbol_indices[i]` gets the COD's i-th weight, every other symbol a zero weight.
LinearDesign reindex(const CodProfile& cod, std::span<const int> symbol_indices, int total_symbols);

}  // namespace dstbc
