#include "dstbc/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "dstbc/channel.hpp"
#include "dstbc/io.hpp"

namespace dstbc {
namespace {

constexpr long kBatch = 512;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

PowerConfig power_for(const DstbcCode& code, const ExperimentConfig& config, double snr_db) {
  PowerConfig power = PowerConfig::from_snr_db(code, snr_db);
  if (config.pi1) power.pi1 = *config.pi1;
  if (config.pi2) power.pi2 = *config.pi2;
  return power;
}

// Runs trials [first, first + count) into errors[], spread over `threads` workers.
void run_batch(const DstbcCode& code, const ExperimentConfig& config, const PowerConfig& power,
               std::uint64_t snr_index, long first, std::vector<long>& errors, int threads) {
  const long count = static_cast<long>(errors.size());
  auto work = [&](long stride, long offset) {
    for (long t = offset; t < count; t += stride)
      errors[static_cast<std::size_t>(t)] =
          simulate_trial(code, config.decoder, config.receive_antennas, power,
                         trial_seed(config.master_seed, snr_index, static_cast<std::uint64_t>(first + t)));
  };
  const long workers = std::min<long>(threads, count);
  if (workers <= 1) {
    work(1, 0);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
  for (long w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        work(workers, w);
      } catch (...) {
        failures[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

}  // namespace

DstbcCode resolve_code(const CodeSpec& spec) {
  DstbcCode code = spec.design_file.empty() ? preset(spec.preset, spec.params) : load_code_file(spec.design_file);
  attach_signal_sets(code, spec.pam_order);
  return code;
}

void ExperimentConfig::validate() const {
  if (snr_grid_db.empty()) throw ParameterError("SNR grid is empty");
  for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
    if (!std::isfinite(snr_grid_db[i])) throw ParameterError("SNR grid contains a non-finite value");
    if (i > 0 && !(snr_grid_db[i] > snr_grid_db[i - 1])) throw ParameterError("SNR grid must be increasing");
  }
  if (max_trials < 1) throw ParameterError("max_trials must be at least 1");
  if (max_bit_errors < 1) throw ParameterError("max_bit_errors must be at least 1");
  if (receive_antennas < 1) throw ParameterError("receive antenna count must be at least 1");
  if (threads < 0) throw ParameterError("thread count must be nonnegative");
  if ((pi1 && !(*pi1 > 0)) || (pi2 && !(*pi2 > 0))) throw ParameterError("power fractions must be positive");
}

std::vector<double> snr_grid(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
    throw ParameterError("SNR grid bounds must be finite");
  if (!(step > 0)) throw ParameterError("SNR step must be positive");
  if (stop < start) throw ParameterError("SNR stop must not be below start");
  std::vector<double> out;
  for (long i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v > stop + 1e-9) break;
    out.push_back(v);
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t snr_index, std::uint64_t trial_index) {
  return splitmix64(splitmix64(splitmix64(master_seed) ^ snr_index) ^ trial_index);
}

long simulate_trial(const DstbcCode& code, Decoder decoder, int receive_antennas, const PowerConfig& power,
                    std::uint64_t seed) {
  Rng rng(seed);
  const int g = code.grouping.group_count();
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(g));
  RVector x(code.K());
  for (int k = 0; k < g; ++k) {
    const SignalSet& set = code.group_sets[static_cast<std::size_t>(k)];
    std::uniform_int_distribution<std::uint32_t> bits(0, static_cast<std::uint32_t>(set.size() - 1));
    const std::uint32_t label = bits(rng);
    labels[static_cast<std::size_t>(k)] = label;
    const auto point = set.point(static_cast<int>(set.index_of_label(label)));
    const auto& group = code.grouping.groups[static_cast<std::size_t>(k)];
    for (std::size_t d = 0; d < group.size(); ++d) x[group[d]] = point[static_cast<Eigen::Index>(d)];
  }

  const auto channel = ChannelRealization::draw(code.N(), receive_antennas, rng);
  const CMatrix Y = simulate_transmission(code, x, channel, power, rng);
  const NoiseModel noise = noise_covariance(code, channel, power);
  const RMatrix G_prime = build_G(code, effective_channel(code, channel), power.rho());
  Whitened w = whiten(noise, G_prime, vec_tilde(Y));
  const DecodeProblem problem(std::move(w.G), std::move(w.y), code.grouping, code.group_sets);
  const DecodeResult result = decode(decoder, problem);

  long errors = 0;
  for (int k = 0; k < g; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const std::uint32_t decided =
        code.group_sets[ku].label_of_index(static_cast<std::uint32_t>(result.point_indices[ku]));
    errors += std::popcount(decided ^ labels[ku]);
  }
  return errors;
}

void require_compatible(const DstbcCode& code, Decoder decoder) {
  if (!code.relay_form) throw ParameterError("code has no relay form and cannot be simulated");
  if (code.group_sets.size() != code.grouping.groups.size())
    throw ParameterError("signal sets are not attached to every group");
  if (decoder == Decoder::ml) {
    std::uint64_t space = 1;
    for (const auto& set : code.group_sets) {
      space *= static_cast<std::uint64_t>(set.size());
      if (space > kDefaultMlCap) throw ParameterError("ML search space exceeds the candidate cap");
    }
  }
  if ((decoder == Decoder::zf || decoder == Decoder::zf_sic) && code.grouping.max_group_size() > 1) {
    const RMatrix G = RMatrix::Identity(code.K(), code.K());
    const DecodeProblem probe(G, RVector::Zero(code.K()), code.grouping, code.group_sets);
    try {
      decode(decoder, probe);
    } catch (const StructuralError& e) {
      throw ParameterError(std::string(to_string(decoder)) + " is incompatible with this code: " + e.what());
    }
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DSTBC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

BerCurve run_ber(const DstbcCode& code, const ExperimentConfig& config) {
  config.validate();
  require_compatible(code, config.decoder);
  const auto started = std::chrono::steady_clock::now();
  const int threads = resolve_threads(config.threads);

  BerCurve curve;
  curve.config = config;
  for (const auto& set : code.group_sets) curve.bits_per_codeword += set.bits_per_point();

  for (std::size_t s = 0; s < config.snr_grid_db.size(); ++s) {
    const PowerConfig power = power_for(code, config, config.snr_grid_db[s]);
    BerPoint point;
    point.snr_db = config.snr_grid_db[s];
    bool done = false;
    while (!done && point.trials < config.max_trials) {
      const long count = std::min(kBatch, config.max_trials - point.trials);
      std::vector<long> errors(static_cast<std::size_t>(count), 0);
      run_batch(code, config, power, s, point.trials, errors, threads);
      for (long e : errors) {
        ++point.trials;
        point.bit_errors += e;
        if (point.bit_errors >= config.max_bit_errors) {
          done = true;
          break;
        }
      }
    }
    point.ber = static_cast<double>(point.bit_errors) /
                (static_cast<double>(point.trials) * static_cast<double>(curve.bits_per_codeword));
    curve.points.push_back(point);
  }
  curve.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return curve;
}

BerCurve run_ber(const ExperimentConfig& config) { return run_ber(resolve_code(config.code), config); }

double estimate_diversity_slope(const BerCurve& curve, double window_db, long min_errors) {
  std::vector<const BerPoint*> usable;
  for (const auto& p : curve.points)
    if (p.ber > 0 && p.bit_errors >= min_errors) usable.push_back(&p);
  if (usable.size() < 2) throw ParameterError("diversity slope needs at least two points with errors");
  double top = -std::numeric_limits<double>::infinity();
  for (const auto* p : usable) top = std::max(top, p->snr_db);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto* p : usable) {
    if (p->snr_db < top - window_db - 1e-9) continue;
    const double xv = p->snr_db / 10.0;
    const double yv = std::log10(p->ber);
    sx += xv;
    sy += yv;
    sxx += xv * xv;
    sxy += xv * yv;
    ++m;
  }
  if (m < 2) throw ParameterError("diversity slope needs at least two usable points inside the window");
  const double denom = m * sxx - sx * sx;
  if (denom <= 0) throw ParameterError("diversity slope window has no SNR spread");
  return -(m * sxy - sx * sy) / denom;
}

void write_csv(std::ostream& out, const BerCurve& curve) {
  out << "snr_db,trials,bit_errors,ber\n";
  char buf[128];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%.6g,%ld,%ld,%.6g\n", p.snr_db, p.trials, p.bit_errors, p.ber);
    out << buf;
  }
}

}  // namespace dstbc
