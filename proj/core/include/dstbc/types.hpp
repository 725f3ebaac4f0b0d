#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dstbc {

using Complex = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// All randomness flows through an explicit engine so trials can be reseeded
// independently of scheduling.
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments: bad sizes, out-of-range parameters, unknown names.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// The object does not have the structure an operation needs
// (e.g. a design that is not conjugate linear).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown that should not happen for valid inputs.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Circularly symmetric complex Gaussian with unit variance
/// (independent real/imaginary parts, variance 1/2 each).
inline Complex complex_gaussian(Rng& rng) {
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const double re = half(rng);
  const double im = half(rng);
  return {re, im};
}

inline CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMatrix out(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = complex_gaussian(rng);
  return out;
}

inline RVector real_gaussian(Eigen::Index size, Rng& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  RVector out(size);
  for (Eigen::Index i = 0; i < size; ++i) out[i] = unit(rng);
  return out;
}

}  // namespace dstbc
