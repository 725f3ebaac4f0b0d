#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <set>

#include "dstbc/constellation.hpp"

using namespace dstbc;

namespace {

// Plain average of the squared odd integers {+-1, +-3, ..., +-(M-1)}.
double brute_force_pam_energy(int M) {
  double acc = 0.0;
  for (int i = 0; i < M; ++i) {
    const double level = 2.0 * i - (M - 1);
    acc += level * level;
  }
  return acc / M;
}

RotationMatrix planar(double theta) {
  RMatrix q(2, 2);
  q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return {q};
}

}  // namespace

TEST(Pam, TwoPointsAtPlusMinusOneOverRootTwo) {
  const SignalSet s = make_pam(2);
  ASSERT_EQ(s.size(), 2);
  EXPECT_EQ(s.dim(), 1);
  EXPECT_EQ(s.bits_per_point(), 1);
  std::vector<double> pts{s.point(0)[0], s.point(1)[0]};
  std::sort(pts.begin(), pts.end());
  EXPECT_NEAR(pts[0], -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(pts[1], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.mean_energy(), 0.5, 1e-15);
}

TEST(Pam, EightLevelsEquispacedWithHalfEnergy) {
  const SignalSet s = make_pam(8);
  ASSERT_EQ(s.size(), 8);
  const double scale = 1.0 / std::sqrt(2.0 * brute_force_pam_energy(8));
  std::vector<double> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(s.point(i)[0]);
  std::sort(pts.begin(), pts.end());
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(pts[i], (2.0 * i - 7) * scale, 1e-14);
  for (int i = 1; i < 8; ++i) EXPECT_NEAR(pts[i] - pts[i - 1], 2 * scale, 1e-14);
  EXPECT_NEAR(s.mean_energy(), 0.5, 1e-12);
}

TEST(Pam, RejectsNonPowerOfTwo) {
  EXPECT_THROW(make_pam(3), ParameterError);
  EXPECT_THROW(make_pam(0), ParameterError);
  EXPECT_THROW(make_pam(6), ParameterError);
}

TEST(Pam, AdjacentLevelsDifferInOneBit) {
  for (int M : {2, 4, 8, 16, 32}) {
    const SignalSet s = make_pam(M);
    std::vector<int> order(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return s.point(a)[0] < s.point(b)[0]; });
    for (int i = 1; i < M; ++i) {
      const auto a = s.label_of_index(static_cast<std::uint32_t>(order[static_cast<std::size_t>(i - 1)]));
      const auto b = s.label_of_index(static_cast<std::uint32_t>(order[static_cast<std::size_t>(i)]));
      EXPECT_EQ(std::popcount(a ^ b), 1) << "M=" << M << " position " << i;
    }
  }
}

TEST(Pam, EnergyNormalizedForEveryOrder) {
  for (int M = 2; M <= 256; M *= 2) EXPECT_NEAR(make_pam(M).mean_energy(), 0.5, 1e-12) << M;
}

TEST(Qam, IdentityRotationGivesQpsk) {
  const SignalSet s = make_rotated_qam(4, RotationMatrix::identity(2));
  ASSERT_EQ(s.size(), 4);
  const double a = 1.0 / std::sqrt(2.0);
  std::set<std::pair<int, int>> signs;
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(std::abs(s.point(i)[0]), a, 1e-15);
    EXPECT_NEAR(std::abs(s.point(i)[1]), a, 1e-15);
    signs.insert({s.point(i)[0] > 0, s.point(i)[1] > 0});
  }
  EXPECT_EQ(signs.size(), 4u);
}

TEST(Qam, Rotated16QamHasUnitEnergy) {
  const SignalSet s = make_rotated_qam(16, RotationMatrix::standard_2d());
  ASSERT_EQ(s.size(), 16);
  double acc = 0.0;
  for (int i = 0; i < 16; ++i) acc += s.point(i).squaredNorm();
  EXPECT_NEAR(acc / 16.0, 1.0, 1e-12);
  EXPECT_NEAR(s.mean_energy(), 1.0, 1e-12);
}

TEST(Qam, RejectsNonSquareOrderAndWrongRotation) {
  EXPECT_THROW(make_rotated_qam(8, RotationMatrix::standard_2d()), ParameterError);
  EXPECT_THROW(make_rotated_qam(16, RotationMatrix::identity(3)), ParameterError);
}

TEST(Qam, GrayLabelsPerComponentBeforeRotation) {
  const RotationMatrix q = RotationMatrix::standard_2d();
  const SignalSet s = make_rotated_qam(16, q);
  // Undo the rotation; neighbours along either axis must differ in one bit.
  const RMatrix raw = q.entries.transpose() * s.points();
  for (int a = 0; a < 16; ++a)
    for (int b = a + 1; b < 16; ++b) {
      const RVector d = raw.col(a) - raw.col(b);
      const double step = 2.0 / std::sqrt(2.0 * brute_force_pam_energy(4));
      const bool neighbours = (std::abs(std::abs(d[0]) - step) < 1e-12 && std::abs(d[1]) < 1e-12) ||
                              (std::abs(std::abs(d[1]) - step) < 1e-12 && std::abs(d[0]) < 1e-12);
      if (neighbours)
        EXPECT_EQ(std::popcount(s.label_of_index(static_cast<std::uint32_t>(a)) ^
                                s.label_of_index(static_cast<std::uint32_t>(b))),
                  1);
    }
}

TEST(Rotation, StandardPlanarAngle) {
  const RotationMatrix q = RotationMatrix::standard_2d();
  const RotationMatrix expected = planar(0.5 * std::atan(2.0));
  EXPECT_LT((q.entries - expected.entries).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(q.is_orthogonal());
}

TEST(Rotation, GenericIsOrthogonalAndDeterministic) {
  for (int dim : {3, 4, 6}) {
    const RotationMatrix a = RotationMatrix::generic(dim);
    const RotationMatrix b = RotationMatrix::generic(dim);
    EXPECT_TRUE(a.is_orthogonal()) << dim;
    EXPECT_EQ(a.entries, b.entries);
  }
}

TEST(VerifyRotation, IdentityFailsOnBinarySet) {
  const std::vector<double> set{-1.0, 1.0};
  EXPECT_FALSE(verify_rotation(RotationMatrix::identity(2), set));
}

TEST(VerifyRotation, PlanarAngleHalfAtanTwoPassesOnFourLevels) {
  const std::vector<double> set{-3.0, -1.0, 1.0, 3.0};
  EXPECT_TRUE(verify_rotation(planar(0.5 * std::atan(2.0)), set));
}

TEST(VerifyRotation, PlanarOracleAgreesWithExhaustiveDifferences) {
  // Independent oracle: enumerate all 16^2 point pairs of Q {+-1,+-3}^2.
  const RotationMatrix q = planar(0.5 * std::atan(2.0));
  const std::vector<double> comp{-3.0, -1.0, 1.0, 3.0};
  double min_coord = std::numeric_limits<double>::infinity();
  for (double a0 : comp)
    for (double a1 : comp)
      for (double b0 : comp)
        for (double b1 : comp) {
          if (a0 == b0 && a1 == b1) continue;
          const Eigen::Vector2d d = q.entries * Eigen::Vector2d(a0 - b0, a1 - b1);
          min_coord = std::min({min_coord, std::abs(d[0]), std::abs(d[1])});
        }
  EXPECT_GT(min_coord, 1e-9);
  EXPECT_TRUE(verify_rotation(q, comp));
}

TEST(VerifyRotation, ScalarAlwaysPasses) {
  const std::vector<double> set{-7.0, -1.0, 0.5, 4.0};
  EXPECT_TRUE(verify_rotation(RotationMatrix::identity(1), set));
}

TEST(VerifyRotation, RightAngleRotationFails) {
  const std::vector<double> set{-1.0, 1.0};
  EXPECT_FALSE(verify_rotation(planar(std::acos(0.0)), set));
}

TEST(VerifyRotation, InvariantUnderPermutationOfComponents) {
  Rng rng(11);
  std::vector<double> set{-3.0, -1.0, 1.0, 3.0};
  const std::vector<RotationMatrix> rotations{RotationMatrix::standard_2d(), RotationMatrix::identity(2),
                                              planar(0.3), planar(std::acos(0.0))};
  for (const auto& q : rotations) {
    const bool reference = verify_rotation(q, set);
    for (int t = 0; t < 10; ++t) {
      std::shuffle(set.begin(), set.end(), rng);
      EXPECT_EQ(verify_rotation(q, set), reference);
    }
  }
}

TEST(VerifyRotation, AcceptedRotationsHaveNoZeroDifferenceCoordinates) {
  Rng rng(5);
  std::uniform_real_distribution<double> angle(0.0, 3.14159);
  int accepted = 0;
  for (int t = 0; t < 30; ++t) {
    const RotationMatrix q = planar(angle(rng));
    if (!verify_rotation(q, std::vector<double>{-1.0, 1.0})) continue;
    ++accepted;
    const SignalSet s = make_rotated_lattice(2, q);
    const RMatrix diffs = difference_set(s);
    for (Eigen::Index c = 0; c < diffs.cols(); ++c) {
      if (diffs.col(c).norm() < 1e-12) continue;
      EXPECT_GT(diffs.col(c).cwiseAbs().minCoeff(), 1e-9);
    }
  }
  EXPECT_GT(accepted, 0);
}

TEST(DifferenceSet, BinarySet) {
  RMatrix pts(1, 2);
  pts << -1.0, 1.0;
  const SignalSet s(pts, {0, 1});
  const RMatrix d = difference_set(s);
  ASSERT_EQ(d.cols(), 3);
  EXPECT_DOUBLE_EQ(d(0, 0), -2.0);
  EXPECT_DOUBLE_EQ(d(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(d(0, 2), 2.0);
}

TEST(DifferenceSet, SingletonGivesZero) {
  RMatrix pts(2, 1);
  pts << 0.3, -0.4;
  const SignalSet s(pts, {0});
  const RMatrix d = difference_set(s);
  ASSERT_EQ(d.cols(), 1);
  EXPECT_EQ(d.col(0).norm(), 0.0);
}

TEST(DifferenceSet, QpskHasNineDifferences) {
  const SignalSet s = make_rotated_qam(4, RotationMatrix::identity(2));
  // Oracle: brute-force pairwise differences with a tolerance-based dedup.
  std::vector<Eigen::Vector2d> seen;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const Eigen::Vector2d d = s.point(a) - s.point(b);
      if (std::none_of(seen.begin(), seen.end(), [&](const Eigen::Vector2d& e) { return (e - d).norm() < 1e-12; }))
        seen.push_back(d);
    }
  EXPECT_EQ(seen.size(), 9u);
  EXPECT_EQ(difference_set(s).cols(), 9);
}

TEST(SignalSetValidation, RejectsBadInputs) {
  RMatrix three(1, 3);
  three << 0, 1, 2;
  EXPECT_THROW(SignalSet(three, {0, 1, 2}), ParameterError);
  RMatrix dup(1, 2);
  dup << 1, 1;
  EXPECT_THROW(SignalSet(dup, {0, 1}), ParameterError);
  RMatrix two(1, 2);
  two << 0, 1;
  EXPECT_THROW(SignalSet(two, {0, 0}), ParameterError);
}

TEST(RotatedLattice, RemembersProvenance) {
  const SignalSet s = make_rotated_lattice(4, RotationMatrix::standard_2d());
  ASSERT_NE(s.rotation(), nullptr);
  EXPECT_EQ(s.components().size(), 4u);
  ASSERT_NE(make_pam(2).rotation(), nullptr);
  EXPECT_EQ(make_pam(2).rotation()->dim(), 1);
  RMatrix pts(1, 2);
  pts << -1.0, 1.0;
  EXPECT_EQ(SignalSet(pts, {0, 1}).rotation(), nullptr);
  EXPECT_NEAR(s.mean_energy(), 1.0, 1e-12);
}
