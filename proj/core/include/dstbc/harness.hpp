#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dstbc/channel.hpp"
#include "dstbc/construct.hpp"
#include "dstbc/decode.hpp"

namespace dstbc {

/// Where the code comes from: a named preset or a JSON design file.
struct CodeSpec {
  std::string preset = "example2";
  PresetParams params{2, 1, 2};
  std::string design_file;
  /// PAM order of each signal-set component (2 gives BPSK, 4 gives 16-QAM for pairs).
  int pam_order = 2;
};

DstbcCode resolve_code(const CodeSpec& spec);

struct ExperimentConfig {
  CodeSpec code;
  int receive_antennas = 1;
  Decoder decoder = Decoder::pic_sic;
  std::vector<double> snr_grid_db;
  long max_trials = 10000;
  long max_bit_errors = 200;
  std::uint64_t master_seed = 1;
  /// Power split override; defaults to pi1 = 1, pi2 = 1/R.
  std::optional<double> pi1;
  std::optional<double> pi2;
  /// Worker count; 0 reads DSTBC_THREADS, falling back to the hardware count.
  int threads = 0;

  /// Throws ParameterError on an empty or non-increasing grid or nonpositive budgets.
  void validate() const;
};

/// Arithmetic SNR grid start, start + step, ... up to stop (inclusive within 1e-9).
std::vector<double> snr_grid(double start, double stop, double step);

struct BerPoint {
  double snr_db = 0.0;
  long trials = 0;
  long bit_errors = 0;
  double ber = 0.0;
};

struct BerCurve {
  std::vector<BerPoint> points;
  ExperimentConfig config;
  int bits_per_codeword = 0;
  double wall_time_s = 0.0;
};

/// Stable 64-bit seed for one trial of one SNR point.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t snr_index, std::uint64_t trial_index);

/// Bit errors of a single trial at the given power, reproducible from the seed alone.
long simulate_trial(const DstbcCode& code, Decoder decoder, int receive_antennas, const PowerConfig& power,
                    std::uint64_t seed);

/// Throws ParameterError if the decoder cannot run on the code.
void require_compatible(const DstbcCode& code, Decoder decoder);

BerCurve run_ber(const DstbcCode& code, const ExperimentConfig& config);
BerCurve run_ber(const ExperimentConfig& config);

/// Worker count actually used for a requested count (see ExperimentConfig::threads).
int resolve_threads(int requested);

/// Least-squares slope of log10(ber) against snr_db / 10 over the points within
/// window_db of the highest usable SNR, negated. Points with ber = 0 or fewer
/// than min_errors bit errors are ignored. Throws ParameterError with fewer than two usable points.
double estimate_diversity_slope(const BerCurve& curve, double window_db, long min_errors = 1);

/// Header `snr_db,trials,bit_errors,ber`, values with 6 significant digits.
void write_csv(std::ostream& out, const BerCurve& curve);

}  // namespace dstbc
