#include "dstbc/design.hpp"

#include <algorithm>
#include <string>

namespace dstbc {

LinearDesign::LinearDesign(int rows, int cols, std::vector<CMatrix> weights)
    : rows_(rows), cols_(cols), weights_(std::move(weights)) {
  if (rows_ < 1 || cols_ < 1) throw ParameterError("design must have positive shape");
  if (weights_.empty()) throw ParameterError("design must have at least one symbol");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i].rows() != rows_ || weights_[i].cols() != cols_)
      throw ParameterError("weight matrix " + std::to_string(i + 1) + " has shape " +
                           std::to_string(weights_[i].rows()) + "x" +
                           std::to_string(weights_[i].cols()) + ", expected " +
                           std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

CMatrix evaluate(const LinearDesign& design, std::span<const double> x) {
  if (static_cast<int>(x.size()) != design.K())
    throw ParameterError("evaluate: expected " + std::to_string(design.K()) + " symbols, got " +
                         std::to_string(x.size()));
  CMatrix out = CMatrix::Zero(design.T(), design.N());
  for (int i = 0; i < design.K(); ++i) out += x[static_cast<std::size_t>(i)] * design.weight(i);
  return out;
}

CMatrix evaluate(const LinearDesign& design, const RVector& x) {
  return evaluate(design, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

RMatrix realified_weights(const LinearDesign& design) {
  const Eigen::Index entries = static_cast<Eigen::Index>(design.T()) * design.N();
  RMatrix out(2 * entries, design.K());
  for (int i = 0; i < design.K(); ++i) {
    const CMatrix& a = design.weight(i);
    out.col(i).head(entries) = a.real().reshaped();
    out.col(i).tail(entries) = a.imag().reshaped();
  }
  return out;
}

bool weights_independent(const LinearDesign& design, double tol) {
  Eigen::JacobiSVD<RMatrix> svd(realified_weights(design));
  const RVector& s = svd.singularValues();
  if (s.size() < design.K() || s[0] == 0.0) return false;
  return s[design.K() - 1] > tol * s[0];
}

CodProfile cod_trivial() {
  CMatrix one(1, 1), imag_unit(1, 1);
  one << Complex(1, 0);
  imag_unit << Complex(0, 1);
  return {LinearDesign(1, 1, {one, imag_unit})};
}

CodProfile cod_alamouti() {
  const Complex i(0, 1);
  CMatrix a1(2, 2), a2(2, 2), a3(2, 2), a4(2, 2);
  a1 << 1, 0, 0, 1;
  a2 << i, 0, 0, -i;
  a3 << 0, 1, -1, 0;
  a4 << 0, i, i, 0;
  return {LinearDesign(2, 2, {a1, a2, a3, a4})};
}

bool verify_cod(const CodProfile& cod, double tol) {
  const auto& w = cod.design.weights();
  const CMatrix eye = CMatrix::Identity(cod.cols(), cod.cols());
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i; j < w.size(); ++j) {
      const CMatrix sym = w[i].adjoint() * w[j] + w[j].adjoint() * w[i];
      const CMatrix expected = (i == j ? 2.0 : 0.0) * eye;
      if ((sym - expected).cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

LinearDesign reindex(const CodProfile& cod, std::span<const int> symbol_indices, int total_symbols) {
  if (static_cast<int>(symbol_indices.size()) != cod.symbols())
    throw ParameterError("reindex: need exactly " + std::to_string(cod.symbols()) + " indices");
  std::vector<bool> used(static_cast<std::size_t>(std::max(total_symbols, 0)), false);
  for (int idx : symbol_indices) {
    if (idx < 0 || idx >= total_symbols)
      throw ParameterError("reindex: symbol index " + std::to_string(idx + 1) + " out of range 1.." +
                           std::to_string(total_symbols));
    if (used[static_cast<std::size_t>(idx)])
      throw ParameterError("reindex: duplicate symbol index " + std::to_string(idx + 1));
    used[static_cast<std::size_t>(idx)] = true;
  }
  std::vector<CMatrix> weights(static_cast<std::size_t>(total_symbols),
                               CMatrix::Zero(cod.rows(), cod.cols()));
  for (std::size_t i = 0; i < symbol_indices.size(); ++i)
    weights[static_cast<std::size_t>(symbol_indices[i])] = cod.design.weight(static_cast<int>(i));
  return LinearDesign(cod.rows(), cod.cols(), std::move(weights));
}

}  // namespace dstbc
