#pragma once

#include "dstbc/construct.hpp"
#include "dstbc/types.hpp"

namespace dstbc {

/// Source-to-relay gains f (N) and relay-to-destination gains G (N x N_D).
struct ChannelRealization {
  CVector f;
  CMatrix g;

  int relays() const { return static_cast<int>(f.size()); }
  int receive_antennas() const { return static_cast<int>(g.cols()); }

  /// i.i.d. unit-variance circular complex Gaussian gains; f drawn first, then G column-major.
  static ChannelRealization draw(int relays, int receive_antennas, Rng& rng);
};

/// Two-phase power split. P is the total network power (linear); the phase
/// fractions must satisfy pi1 T1 + pi2 R T2 = T1 + T2.
struct PowerConfig {
  double P = 1.0;
  double pi1 = 1.0;
  double pi2 = 1.0;

  /// pi1 = 1, pi2 = 1/R.
  static PowerConfig standard(const DstbcCode& code, double P);
  static PowerConfig from_snr_db(const DstbcCode& code, double snr_db);

  /// Overall signal gain pi1 pi2 P^2 / (pi1 P + 1).
  double rho() const { return pi1 * pi2 * P * P / (pi1 * P + 1.0); }
  /// Relay amplification pi2 P / (pi1 P + 1).
  double relay_gain() const { return pi2 * P / (pi1 * P + 1.0); }

  bool satisfies_constraint(const DstbcCode& code, double tol = 1e-9) const;
};

/// Covariance of the total destination noise and its whitening transform.
struct NoiseModel {
  CMatrix gamma_complex;  // covariance of vec(U), T2 N_D square
  RMatrix gamma;          // covariance of the realified noise, 2 T2 N_D square
  RMatrix whitening;      // symmetric inverse square root of gamma
};

/// Realification [vec(Re A); vec(Im A)] with column-major vec.
RVector vec_tilde(const CMatrix& a);

/// H = diag(fbar) G, fbar_j = conj(f_j) for relays in S.
CMatrix effective_channel(const DstbcCode& code, const ChannelRealization& channel);

/// Block covariance of vec(U) from the relay matrices and channel, realified, with whitening.
NoiseModel noise_covariance(const DstbcCode& code, const ChannelRealization& channel,
                            const PowerConfig& power);

/// Builds the realified covariance and whitening from a complex covariance.
NoiseModel noise_model_from_complex(CMatrix gamma_complex);

/// Upper bounds on the noise covariance: trace and largest eigenvalue of Gamma
/// against alpha = T2 N_D + beta relay_gain sum |g|^2, beta = max ||Bbar_j||_F^2.
struct NoiseBound {
  double trace = 0.0;
  double max_eigenvalue = 0.0;
  double alpha = 0.0;

  bool holds(double tol = 1e-9) const { return trace <= alpha + tol && max_eigenvalue <= alpha + tol; }
};
NoiseBound noise_bound(const DstbcCode& code, const ChannelRealization& channel,
                       const PowerConfig& power);

/// Test hook: switch off individual noise sources.
struct NoiseInjection {
  bool relay = true;
  bool destination = true;
};

/// Runs the broadcast and cooperation phases physically and returns Y (T2 x N_D).
/// Relay noise is drawn relay by relay before the destination noise.
CMatrix simulate_transmission(const DstbcCode& code, const RVector& x,
                              const ChannelRealization& channel, const PowerConfig& power, Rng& rng,
                              NoiseInjection noise = {});

/// Sample second moment of vec_tilde(Y) with x = 0, i.e. the empirical
/// counterpart of NoiseModel::gamma, over `draws` independent noise draws.
RMatrix empirical_noise_covariance(const DstbcCode& code, const ChannelRealization& channel,
                                   const PowerConfig& power, long draws, Rng& rng);

/// sqrt(rho) [vec_tilde(A_1 H) ... vec_tilde(A_K H)], 2 N_D T2 x K.
RMatrix build_G(const DstbcCode& code, const CMatrix& H, double rho);

struct Whitened {
  RMatrix G;
  RVector y;
};
Whitened whiten(const NoiseModel& noise, const RMatrix& G_prime, const RVector& y_prime);

}  // namespace dstbc
