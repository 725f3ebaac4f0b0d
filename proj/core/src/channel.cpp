#include "dstbc/channel.hpp"

#include <cmath>
#include <sstream>

namespace dstbc {
namespace {

void require_shapes(const DstbcCode& code, const ChannelRealization& channel) {
  if (channel.f.size() != code.N() || channel.g.rows() != code.N() || channel.g.cols() < 1) {
    std::ostringstream msg;
    msg << "channel shape mismatch: code has N = " << code.N() << ", realization has f of size "
        << channel.f.size() << " and G of shape " << channel.g.rows() << "x" << channel.g.cols();
    throw ParameterError(msg.str());
  }
}

const ConjugateLinearForm& require_form(const DstbcCode& code) {
  if (!code.relay_form) throw StructuralError("code has no relay form; channel simulation refused");
  return *code.relay_form;
}

}  // namespace

ChannelRealization ChannelRealization::draw(int relays, int receive_antennas, Rng& rng) {
  ChannelRealization out;
  out.f = complex_gaussian(relays, 1, rng).col(0);
  out.g = complex_gaussian(relays, receive_antennas, rng);
  return out;
}

PowerConfig PowerConfig::standard(const DstbcCode& code, double P) {
  const Rational rate = rate_cspcu(code);
  return {P, 1.0, 1.0 / rate.to_double()};
}

PowerConfig PowerConfig::from_snr_db(const DstbcCode& code, double snr_db) {
  return standard(code, std::pow(10.0, snr_db / 10.0));
}

bool PowerConfig::satisfies_constraint(const DstbcCode& code, double tol) const {
  const double t1 = code.T1();
  const double t2 = code.T2();
  const double rate = rate_cspcu(code).to_double();
  return pi1 > 0 && pi2 > 0 && std::abs(pi1 * t1 + pi2 * rate * t2 - (t1 + t2)) <= tol;
}

RVector vec_tilde(const CMatrix& a) {
  const Eigen::Index n = a.size();
  RVector out(2 * n);
  out.head(n) = a.real().reshaped();
  out.tail(n) = a.imag().reshaped();
  return out;
}

CMatrix effective_channel(const DstbcCode& code, const ChannelRealization& channel) {
  require_shapes(code, channel);
  const auto& form = require_form(code);
  CMatrix H = channel.g;
  for (int j = 0; j < code.N(); ++j) {
    const Complex fj = form.conjugated[static_cast<std::size_t>(j)] ? std::conj(channel.f[j]) : channel.f[j];
    H.row(j) *= fj;
  }
  return H;
}

NoiseModel noise_model_from_complex(CMatrix gamma_complex) {
  const Eigen::Index n = gamma_complex.rows();
  NoiseModel out;
  out.gamma.resize(2 * n, 2 * n);
  const RMatrix re = gamma_complex.real();
  const RMatrix im = gamma_complex.imag();
  out.gamma.topLeftCorner(n, n) = 0.5 * re;
  out.gamma.topRightCorner(n, n) = -0.5 * im;
  out.gamma.bottomLeftCorner(n, n) = 0.5 * im;
  out.gamma.bottomRightCorner(n, n) = 0.5 * re;
  out.gamma_complex = std::move(gamma_complex);

  Eigen::SelfAdjointEigenSolver<RMatrix> eig(out.gamma);
  if (eig.info() != Eigen::Success) throw NumericalError("noise covariance eigen-decomposition failed");
  RVector values = eig.eigenvalues();
  if (values.minCoeff() < -1e-8) {
    std::ostringstream msg;
    msg << "noise covariance is not positive semidefinite (min eigenvalue " << values.minCoeff() << ")";
    throw NumericalError(msg.str());
  }
  values = values.cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
  out.whitening = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  return out;
}

NoiseModel noise_covariance(const DstbcCode& code, const ChannelRealization& channel,
                            const PowerConfig& power) {
  require_shapes(code, channel);
  const auto& form = require_form(code);
  const int T2 = code.T2();
  const int nd = channel.receive_antennas();
  const double gain = power.relay_gain();

  std::vector<CMatrix> relay_outer;
  relay_outer.reserve(static_cast<std::size_t>(code.N()));
  for (int j = 0; j < code.N(); ++j) {
    const CMatrix b = form.effective_relay_matrix(j);
    relay_outer.emplace_back(b * b.adjoint());
  }

  CMatrix gamma = CMatrix::Zero(static_cast<Eigen::Index>(T2) * nd, static_cast<Eigen::Index>(T2) * nd);
  for (int l1 = 0; l1 < nd; ++l1) {
    for (int l2 = 0; l2 < nd; ++l2) {
      auto block = gamma.block(l1 * T2, l2 * T2, T2, T2);
      for (int j = 0; j < code.N(); ++j)
        block += gain * channel.g(j, l1) * std::conj(channel.g(j, l2)) * relay_outer[static_cast<std::size_t>(j)];
      if (l1 == l2) block += CMatrix::Identity(T2, T2);
    }
  }
  return noise_model_from_complex(std::move(gamma));
}

NoiseBound noise_bound(const DstbcCode& code, const ChannelRealization& channel, const PowerConfig& power) {
  const auto& form = require_form(code);
  const NoiseModel noise = noise_covariance(code, channel, power);
  double beta = 0.0;
  for (int j = 0; j < code.N(); ++j) beta = std::max(beta, form.B[static_cast<std::size_t>(j)].squaredNorm());
  NoiseBound out;
  out.alpha = code.T2() * channel.receive_antennas() + beta * power.relay_gain() * channel.g.squaredNorm();
  out.trace = noise.gamma.trace();
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(noise.gamma, Eigen::EigenvaluesOnly);
  out.max_eigenvalue = eig.eigenvalues().maxCoeff();
  return out;
}

CMatrix simulate_transmission(const DstbcCode& code, const RVector& x, const ChannelRealization& channel,
                              const PowerConfig& power, Rng& rng, NoiseInjection noise) {
  require_shapes(code, channel);
  const auto& form = require_form(code);
  if (x.size() != code.K()) throw ParameterError("simulate_transmission: symbol vector has wrong length");

  const CVector z = form.V * x.cast<Complex>();
  const double broadcast_amp = std::sqrt(power.pi1 * power.P);
  const double relay_amp = std::sqrt(power.relay_gain());
  const int nd = channel.receive_antennas();

  CMatrix Y = CMatrix::Zero(code.T2(), nd);
  for (int j = 0; j < code.N(); ++j) {
    CVector r = channel.f[j] * broadcast_amp * z;
    if (noise.relay) r += complex_gaussian(form.T1, 1, rng).col(0);
    const CVector t = form.conjugated[static_cast<std::size_t>(j)]
                          ? CVector(relay_amp * (form.B[static_cast<std::size_t>(j)].conjugate() * r.conjugate()))
                          : CVector(relay_amp * (form.B[static_cast<std::size_t>(j)] * r));
    for (int l = 0; l < nd; ++l) Y.col(l) += channel.g(j, l) * t;
  }
  if (noise.destination) Y += complex_gaussian(code.T2(), nd, rng);
  return Y;
}

RMatrix empirical_noise_covariance(const DstbcCode& code, const ChannelRealization& channel,
                                   const PowerConfig& power, long draws, Rng& rng) {
  if (draws < 1) throw ParameterError("empirical_noise_covariance: draws must be positive");
  const RVector zero = RVector::Zero(code.K());
  const Eigen::Index dim = 2 * static_cast<Eigen::Index>(code.T2()) * channel.receive_antennas();
  RMatrix acc = RMatrix::Zero(dim, dim);
  for (long d = 0; d < draws; ++d) {
    const RVector v = vec_tilde(simulate_transmission(code, zero, channel, power, rng));
    acc.selfadjointView<Eigen::Lower>().rankUpdate(v);
  }
  acc.triangularView<Eigen::StrictlyUpper>() = acc.transpose();
  return acc / static_cast<double>(draws);
}

RMatrix build_G(const DstbcCode& code, const CMatrix& H, double rho) {
  if (H.rows() != code.N()) throw ParameterError("build_G: H must have N rows");
  const double scale = std::sqrt(rho);
  RMatrix out(2 * code.T2() * H.cols(), code.K());
  for (int i = 0; i < code.K(); ++i) out.col(i) = scale * vec_tilde(code.design.weight(i) * H);
  return out;
}

Whitened whiten(const NoiseModel& noise, const RMatrix& G_prime, const RVector& y_prime) {
  if (noise.whitening.cols() != G_prime.rows() || G_prime.rows() != y_prime.size())
    throw ParameterError("whiten: dimension mismatch");
  return {noise.whitening * G_prime, noise.whitening * y_prime};
}

}  // namespace dstbc
