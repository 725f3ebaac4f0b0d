#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dstbc/harness.hpp"

using namespace dstbc;

namespace {

ExperimentConfig small_config(Decoder decoder, std::vector<double> grid, long trials) {
  ExperimentConfig c;
  c.code.preset = "example2";
  c.code.params = {2, 1, 2};
  c.receive_antennas = 2;
  c.decoder = decoder;
  c.snr_grid_db = std::move(grid);
  c.max_trials = trials;
  c.max_bit_errors = 1000000;
  c.master_seed = 99;
  c.threads = 1;
  return c;
}

BerCurve synthetic(const std::vector<double>& snr, double exponent) {
  BerCurve c;
  c.bits_per_codeword = 1;
  for (double s : snr) {
    const double P = std::pow(10.0, s / 10.0);
    c.points.push_back({s, 1000000, 1000, std::pow(P, -exponent)});
  }
  return c;
}

}  // namespace

TEST(SnrGrid, InclusiveArithmeticGrid) {
  EXPECT_EQ(snr_grid(0, 20, 5), (std::vector<double>{0, 5, 10, 15, 20}));
  EXPECT_EQ(snr_grid(3, 3, 1), (std::vector<double>{3}));
  EXPECT_EQ(snr_grid(0, 1, 0.1).size(), 11u);
  EXPECT_THROW(snr_grid(0, 10, 0), ParameterError);
  EXPECT_THROW(snr_grid(10, 0, 1), ParameterError);
  EXPECT_THROW(snr_grid(0, NAN, 1), ParameterError);
}

TEST(Config, ValidationRejectsBadValues) {
  ExperimentConfig c = small_config(Decoder::pic_sic, {0, 5}, 10);
  EXPECT_NO_THROW(c.validate());
  c.snr_grid_db = {};
  EXPECT_THROW(c.validate(), ParameterError);
  c.snr_grid_db = {5, 0};
  EXPECT_THROW(c.validate(), ParameterError);
  c.snr_grid_db = {0};
  c.max_trials = 0;
  EXPECT_THROW(c.validate(), ParameterError);
}

TEST(TrialSeed, StableAndDistinct) {
  EXPECT_EQ(trial_seed(1, 2, 3), trial_seed(1, 2, 3));
  EXPECT_NE(trial_seed(1, 2, 3), trial_seed(1, 3, 2));
  EXPECT_NE(trial_seed(1, 0, 0), trial_seed(2, 0, 0));
}

TEST(RunBer, NoiselessLimitHasNoErrors) {
  const BerCurve curve = run_ber(small_config(Decoder::pic_sic, {60.0}, 100));
  ASSERT_EQ(curve.points.size(), 1u);
  EXPECT_EQ(curve.points[0].trials, 100);
  EXPECT_EQ(curve.points[0].bit_errors, 0);
  EXPECT_EQ(curve.points[0].ber, 0.0);
}

TEST(RunBer, MlAndSingleGroupPicAgree) {
  // One real-symbol pair in a single group: PIC has nothing to cancel.
  DstbcCode code = build(1, cod_trivial(), 1, 1);
  code.grouping = GroupingScheme{{{0, 1}}};
  code.group_sets = {make_rotated_qam(16, RotationMatrix::standard_2d())};
  ExperimentConfig c = small_config(Decoder::ml, {0, 5, 10}, 500);
  const BerCurve ml = run_ber(code, c);
  c.decoder = Decoder::pic;
  const BerCurve pic = run_ber(code, c);
  ASSERT_EQ(ml.points.size(), pic.points.size());
  for (std::size_t i = 0; i < ml.points.size(); ++i) {
    EXPECT_EQ(ml.points[i].bit_errors, pic.points[i].bit_errors);
    EXPECT_EQ(ml.points[i].ber, pic.points[i].ber);
  }
}

TEST(RunBer, BerAccounting) {
  const BerCurve curve = run_ber(small_config(Decoder::pic_sic, {0.0}, 300));
  const auto& p = curve.points[0];
  EXPECT_EQ(curve.bits_per_codeword, 4);
  EXPECT_DOUBLE_EQ(p.ber, static_cast<double>(p.bit_errors) / (p.trials * 4.0));
}

TEST(RunBer, EarlyStopCountsActualTrials) {
  ExperimentConfig c = small_config(Decoder::pic_sic, {0.0}, 100000);
  c.max_bit_errors = 50;
  const BerCurve curve = run_ber(c);
  const auto& p = curve.points[0];
  EXPECT_GE(p.bit_errors, 50);
  EXPECT_LT(p.trials, 100000);
  // Replaying the same trials reproduces the count exactly.
  const DstbcCode code = resolve_code(c.code);
  const PowerConfig power = PowerConfig::from_snr_db(code, 0.0);
  long errors = 0;
  for (long t = 0; t < p.trials; ++t)
    errors += simulate_trial(code, c.decoder, c.receive_antennas, power, trial_seed(c.master_seed, 0, t));
  EXPECT_EQ(errors, p.bit_errors);
  EXPECT_LT(errors - simulate_trial(code, c.decoder, c.receive_antennas, power,
                                    trial_seed(c.master_seed, 0, p.trials - 1)),
            50);
}

TEST(RunBer, IndependentOfThreadCount) {
  ExperimentConfig c = small_config(Decoder::pic_sic, {0, 5}, 1500);
  c.max_bit_errors = 300;
  const BerCurve one = run_ber(c);
  c.threads = 3;
  const BerCurve three = run_ber(c);
  std::ostringstream a, b;
  write_csv(a, one);
  write_csv(b, three);
  EXPECT_EQ(a.str(), b.str());
}

TEST(RunBer, EightPamSetupReportsTwoBitsPerUse) {
  ExperimentConfig c;
  c.code.preset = "example1";
  c.code.params = {8, 1, 3};
  c.code.pam_order = 8;
  c.receive_antennas = 1;
  c.decoder = Decoder::zf_sic;
  c.snr_grid_db = {10.0};
  c.max_trials = 20;
  c.threads = 1;
  const DstbcCode code = resolve_code(c.code);
  EXPECT_EQ(bits_per_channel_use(code), Rational(2));
  EXPECT_EQ(rate_cspcu(code), Rational(1, 3));
  const BerCurve curve = run_ber(code, c);
  EXPECT_EQ(curve.points[0].trials, 20);
  EXPECT_EQ(curve.bits_per_codeword, 36);
}

TEST(RunBer, IncompatibleDecoderRejected) {
  ExperimentConfig c = small_config(Decoder::zf, {0.0}, 10);
  c.code.params = {4, 2, 1};
  c.code.preset = "example1";
  c.code.pam_order = 4;
  EXPECT_THROW(run_ber(c), ParameterError);
  c.decoder = Decoder::ml;
  c.code.params = {8, 1, 3};
  EXPECT_THROW(run_ber(c), ParameterError);
}

TEST(Slope, ExactPowerLaw) {
  EXPECT_NEAR(estimate_diversity_slope(synthetic({10, 15, 20, 25, 30}, 2.0), 10.0), 2.0, 1e-9);
  EXPECT_NEAR(estimate_diversity_slope(synthetic({0, 10, 20}, 1.0), 100.0), 1.0, 1e-9);
}

TEST(Slope, FlatCurve) {
  BerCurve c = synthetic({0, 10, 20}, 0.0);
  for (auto& p : c.points) p.ber = 0.1;
  EXPECT_NEAR(estimate_diversity_slope(c, 30.0), 0.0, 1e-12);
}

TEST(Slope, UsesOnlyHighestWindowAndEnoughErrors) {
  BerCurve c = synthetic({0, 10, 20, 30}, 1.0);
  c.points[0].ber = 0.5;  // outside the window
  c.points[3].bit_errors = 3;
  EXPECT_NEAR(estimate_diversity_slope(c, 10.0, 100), 1.0, 1e-9);
  EXPECT_THROW(estimate_diversity_slope(c, 5.0, 100), ParameterError);
  BerCurve zeros = synthetic({0, 10}, 1.0);
  zeros.points[1].ber = 0;
  EXPECT_THROW(estimate_diversity_slope(zeros, 20.0), ParameterError);
}

TEST(Csv, ExactSchema) {
  BerCurve c;
  c.points = {{5.0, 1000, 17, 0.00425}, {7.5, 123456, 0, 0.0}, {10.0, 3, 1, 1.0 / 12.0}};
  std::ostringstream out;
  write_csv(out, c);
  EXPECT_EQ(out.str(),
            "snr_db,trials,bit_errors,ber\n"
            "5,1000,17,0.00425\n"
            "7.5,123456,0,0\n"
            "10,3,1,0.0833333\n");
}

TEST(Threads, ExplicitRequestWins) {
  EXPECT_EQ(resolve_threads(3), 3);
  EXPECT_GE(resolve_threads(0), 1);
}
