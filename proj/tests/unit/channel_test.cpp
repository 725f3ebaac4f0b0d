#include <gtest/gtest.h>

#include <random>

#include "dstbc/channel.hpp"

using namespace dstbc;

namespace {

const Complex I{0.0, 1.0};

RVector random_vector(int n, Rng& rng) {
  std::normal_distribution<double> dist;
  RVector v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

ChannelRealization fixed_channel(Complex f, Complex g) {
  ChannelRealization ch;
  ch.f = CVector::Constant(1, f);
  ch.g = CMatrix::Constant(1, 1, g);
  return ch;
}

// Two relays sending x1 + i x2 and its conjugate, so S = {2}.
DstbcCode conjugated_pair() {
  CMatrix a(1, 2), b(1, 2);
  a << 1.0, 1.0;
  b << I, -I;
  DstbcCode code;
  code.design = LinearDesign(1, 2, {a, b});
  code.grouping = GroupingScheme::singletons(2);
  code.relay_form = extract_relay_form(code.design);
  attach_signal_sets(code, 2);
  return code;
}

}  // namespace

TEST(EffectiveChannel, UnconjugatedScalar) {
  const DstbcCode code = build(1, cod_trivial(), 1, 1);
  const auto ch = fixed_channel(Complex(0.3, -0.2), Complex(1.5, 0.5));
  EXPECT_LT(std::abs(effective_channel(code, ch)(0, 0) - Complex(0.3, -0.2) * Complex(1.5, 0.5)), 1e-15);
}

TEST(EffectiveChannel, ConjugatedRelayUsesConjugateGain) {
  const DstbcCode code = conjugated_pair();
  ASSERT_EQ(code.relay_form->S(), std::vector<int>{1});
  ChannelRealization ch;
  ch.f = CVector::Constant(2, I);
  ch.g = CMatrix::Constant(2, 1, 1.0);
  const CMatrix H = effective_channel(code, ch);
  EXPECT_EQ(H(0, 0), I);
  EXPECT_EQ(H(1, 0), -I);
}

TEST(EffectiveChannel, ElementwiseDefinition) {
  Rng rng(41);
  const DstbcCode code = build(4, cod_alamouti(), 1, 2);
  const auto ch = ChannelRealization::draw(4, 3, rng);
  const CMatrix H = effective_channel(code, ch);
  for (int j = 0; j < 4; ++j)
    for (int l = 0; l < 3; ++l) {
      const Complex fj = j % 2 == 1 ? std::conj(ch.f[j]) : ch.f[j];
      EXPECT_EQ(H(j, l), fj * ch.g(j, l));
    }
}

TEST(EffectiveChannel, ShapeMismatchThrows) {
  Rng rng(1);
  const DstbcCode code = build(4, cod_alamouti(), 1, 2);
  EXPECT_THROW(effective_channel(code, ChannelRealization::draw(3, 1, rng)), ParameterError);
}

TEST(NoiseCovariance, SingleRelayClosedForm) {
  const DstbcCode code = build(1, cod_trivial(), 1, 1);
  const auto ch = fixed_channel(Complex(1, 0), Complex(0.6, 0.8));
  const PowerConfig power{10.0, 1.0, 1.0};
  const NoiseModel model = noise_covariance(code, ch, power);
  const double expected = power.pi2 * power.P / (power.pi1 * power.P + 1) * 1.0 + 1.0;
  EXPECT_NEAR(std::abs(model.gamma_complex(0, 0) - expected), 0.0, 1e-12);
  EXPECT_NEAR(model.gamma(0, 0), expected / 2, 1e-12);
  EXPECT_NEAR(model.gamma(1, 1), expected / 2, 1e-12);
  EXPECT_NEAR(model.gamma(0, 1), 0.0, 1e-12);
}

TEST(NoiseCovariance, VanishingPowerLeavesDestinationNoise) {
  Rng rng(43);
  const DstbcCode code = build(4, cod_trivial(), 2, 2);
  const auto ch = ChannelRealization::draw(4, 2, rng);
  const NoiseModel model = noise_covariance(code, ch, PowerConfig::standard(code, 1e-12));
  const Eigen::Index n = model.gamma_complex.rows();
  EXPECT_LT((model.gamma_complex - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(NoiseCovariance, RealificationLayoutAndWhitening) {
  Rng rng(47);
  for (int t = 0; t < 100; ++t) {
    const DstbcCode code = build(4, cod_alamouti(), 2, 1);
    const auto ch = ChannelRealization::draw(4, 2, rng);
    const NoiseModel model = noise_covariance(code, ch, PowerConfig::standard(code, 50.0));
    const Eigen::Index n = model.gamma_complex.rows();
    EXPECT_LT((model.gamma_complex - model.gamma_complex.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((model.gamma.topLeftCorner(n, n) - 0.5 * model.gamma_complex.real()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((model.gamma.bottomLeftCorner(n, n) - 0.5 * model.gamma_complex.imag()).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(model.gamma);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
    const RMatrix white = model.whitening * model.gamma * model.whitening;
    EXPECT_LT((white - RMatrix::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(NoiseCovariance, TraceAndEigenvalueBound) {
  Rng rng(53);
  for (const DstbcCode& code : {build(2, cod_trivial(), 1, 2), build(4, cod_alamouti(), 1, 2)})
    for (int t = 0; t < 100; ++t) {
      const auto ch = ChannelRealization::draw(code.N(), 2, rng);
      const NoiseBound b = noise_bound(code, ch, PowerConfig::standard(code, 1000.0));
      EXPECT_TRUE(b.holds()) << b.trace << " " << b.max_eigenvalue << " " << b.alpha;
    }
}

TEST(NoiseCovariance, EmpiricalMatchesAnalytic) {
  Rng rng(59);
  const DstbcCode code = build(2, cod_trivial(), 1, 2);
  const auto ch = ChannelRealization::draw(2, 2, rng);
  const PowerConfig power = PowerConfig::from_snr_db(code, 10.0);
  const NoiseModel model = noise_covariance(code, ch, power);
  const RMatrix empirical = empirical_noise_covariance(code, ch, power, 100000, rng);
  EXPECT_LT((empirical - model.gamma).norm() / model.gamma.norm(), 0.03);
  const RMatrix white = model.whitening * empirical * model.whitening;
  const RMatrix eye = RMatrix::Identity(white.rows(), white.cols());
  EXPECT_LT((white - eye).norm() / eye.norm(), 0.03);
}

TEST(Transmission, NoiselessEqualsLinearModel) {
  Rng rng(61);
  for (const DstbcCode& code : {build(4, cod_alamouti(), 1, 2), build(3, cod_trivial(), 2, 2)})
    for (int t = 0; t < 100; ++t) {
      const RVector x = random_vector(code.K(), rng);
      const auto ch = ChannelRealization::draw(code.N(), 2, rng);
      const PowerConfig power = PowerConfig::standard(code, 20.0);
      const CMatrix Y = simulate_transmission(code, x, ch, power, rng, {false, false});
      const CMatrix expected = std::sqrt(power.rho()) * evaluate(code.design, x) * effective_channel(code, ch);
      EXPECT_LT((Y - expected).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Transmission, ZeroSymbolsWithoutRelayNoiseIsDestinationNoise) {
  const DstbcCode code = build(2, cod_alamouti(), 1, 1);
  Rng a(67), b(67);
  const auto ch = ChannelRealization::draw(2, 1, a);
  ChannelRealization::draw(2, 1, b);
  const CMatrix Y = simulate_transmission(code, RVector::Zero(4), ch, PowerConfig::standard(code, 5.0), a,
                                          {false, true});
  EXPECT_LT((Y - complex_gaussian(code.T2(), 1, b)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Transmission, SampleMeanApproachesSignal) {
  Rng rng(71);
  const DstbcCode code = build(2, cod_trivial(), 1, 1);
  const RVector x = random_vector(code.K(), rng);
  const auto ch = ChannelRealization::draw(2, 1, rng);
  const PowerConfig power = PowerConfig::standard(code, 4.0);
  const CMatrix expected = std::sqrt(power.rho()) * evaluate(code.design, x) * effective_channel(code, ch);
  CMatrix mean = CMatrix::Zero(expected.rows(), expected.cols());
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) mean += simulate_transmission(code, x, ch, power, rng);
  mean /= trials;
  // Per-entry noise variance is bounded by the largest covariance eigenvalue.
  const double sd = std::sqrt(2.0 * noise_bound(code, ch, power).max_eigenvalue / trials);
  EXPECT_LT((mean - expected).cwiseAbs().maxCoeff(), 5 * sd);
}

TEST(BuildG, ScalarExample) {
  DstbcCode code;
  code.design = LinearDesign(1, 1, {CMatrix::Identity(1, 1)});
  const RMatrix G = build_G(code, CMatrix::Identity(1, 1), 4.0);
  ASSERT_EQ(G.rows(), 2);
  EXPECT_DOUBLE_EQ(G(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(G(1, 0), 0.0);
}

TEST(BuildG, ZeroChannelGivesZero) {
  const DstbcCode code = build(4, cod_alamouti(), 1, 2);
  EXPECT_EQ(build_G(code, CMatrix::Zero(4, 2), 3.0).norm(), 0.0);
}

TEST(BuildG, MatchesDirectEvaluation) {
  Rng rng(73);
  const DstbcCode code = build(6, cod_alamouti(), 2, 2);
  for (int t = 0; t < 20; ++t) {
    const CMatrix H = complex_gaussian(6, 2, rng);
    const RVector x = random_vector(code.K(), rng);
    const RMatrix G = build_G(code, H, 7.0);
    EXPECT_LT((G * x - std::sqrt(7.0) * vec_tilde(evaluate(code.design, x) * H)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Whiten, IdentityAndScaledCovariance) {
  Rng rng(79);
  const RMatrix G = RMatrix::Random(4, 3);
  const RVector y = RVector::Random(4);
  const NoiseModel unit = noise_model_from_complex(2.0 * CMatrix::Identity(2, 2));
  EXPECT_LT((unit.gamma - RMatrix::Identity(4, 4)).norm(), 1e-15);
  const Whitened w = whiten(unit, G, y);
  EXPECT_LT((w.G - G).norm(), 1e-14);
  EXPECT_LT((w.y - y).norm(), 1e-14);
  const NoiseModel four = noise_model_from_complex(8.0 * CMatrix::Identity(2, 2));
  const Whitened h = whiten(four, G, y);
  EXPECT_LT((h.G - 0.5 * G).norm(), 1e-14);
  EXPECT_LT((h.y - 0.5 * y).norm(), 1e-14);
}

TEST(PowerConfig, StandardSplitSatisfiesConstraint) {
  for (const DstbcCode& code : {build(8, cod_alamouti(), 1, 3), build(6, cod_alamouti(), 2, 2), build(3, cod_trivial(), 3, 2)}) {
    const PowerConfig p = PowerConfig::from_snr_db(code, 20.0);
    EXPECT_DOUBLE_EQ(p.P, 100.0);
    EXPECT_DOUBLE_EQ(p.pi1, 1.0);
    EXPECT_DOUBLE_EQ(p.pi2, 1.0 / rate_cspcu(code).to_double());
    EXPECT_TRUE(p.satisfies_constraint(code));
    EXPECT_NEAR(p.rho(), p.pi1 * p.pi2 * 1e4 / (p.pi1 * 100 + 1), 1e-9);
  }
}

TEST(ComplexGaussian, UnitVariance) {
  Rng rng(83);
  const CMatrix s = complex_gaussian(200000, 1, rng);
  EXPECT_NEAR(s.squaredNorm() / 200000.0, 1.0, 0.02);
  EXPECT_NEAR(s.real().squaredNorm() / 200000.0, 0.5, 0.01);
}
