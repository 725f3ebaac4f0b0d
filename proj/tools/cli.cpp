#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>

#include "dstbc/channel.hpp"
#include "dstbc/design.hpp"
#include "dstbc/diversity.hpp"
#include "dstbc/harness.hpp"
#include "dstbc/io.hpp"

namespace dstbc::cli {
namespace {

struct Flags {
  std::optional<std::string> preset;
  std::optional<std::string> design_file;
  std::optional<int> N;
  std::optional<int> lambda;
  std::optional<int> n;
  std::optional<int> pam;
  std::optional<int> nd;
  std::optional<std::string> decoder;
  std::optional<double> snr_start;
  std::optional<double> snr_stop;
  std::optional<double> snr_step;
  std::optional<long> trials;
  std::optional<long> max_errors;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> config;
  std::string criterion = "pic-sic";
  std::vector<int> drop;
};

void add_code_flags(CLI::App* cmd, Flags& f) {
  auto* preset = cmd->add_option("--preset", f.preset, "Named code family")
                     ->check(CLI::IsMember(preset_names()));
  auto* file = cmd->add_option("--design-file", f.design_file, "JSON design or code document");
  preset->excludes(file);
  cmd->add_option("--N", f.N, "Number of relays")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", f.lambda, "Real symbols per group")->check(CLI::PositiveNumber);
  cmd->add_option("--n", f.n, "Number of diagonal layers")->check(CLI::PositiveNumber);
  cmd->add_option("--pam", f.pam, "PAM order of each signal-set component")->check(CLI::PositiveNumber);
  cmd->add_option("--config", f.config, "Flat JSON experiment config; flags override it");
}

ExperimentConfig make_config(const Flags& f) {
  ExperimentConfig config;
  config.code.params = {4, 1, 1};
  config.code.preset = "example1";
  if (f.config) config = config_from_json(read_json_file(*f.config), config);
  if (f.preset) {
    config.code.preset = *f.preset;
    config.code.design_file.clear();
  }
  if (f.design_file) config.code.design_file = *f.design_file;
  if (f.N) config.code.params.N = *f.N;
  if (f.lambda) config.code.params.lambda = *f.lambda;
  if (f.n) config.code.params.n = *f.n;
  if (f.pam) config.code.pam_order = *f.pam;
  if (f.nd) config.receive_antennas = *f.nd;
  if (f.decoder) config.decoder = parse_decoder(*f.decoder);
  if (f.trials) config.max_trials = *f.trials;
  if (f.max_errors) config.max_bit_errors = *f.max_errors;
  if (f.seed) config.master_seed = *f.seed;
  if (f.snr_start || f.snr_stop || f.snr_step || config.snr_grid_db.empty())
    config.snr_grid_db = snr_grid(f.snr_start.value_or(0.0), f.snr_stop.value_or(20.0), f.snr_step.value_or(5.0));
  return config;
}

std::string join_one_based(const std::vector<int>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + 1);
  return s + "}";
}

int cmd_info(const Flags& f, std::ostream& out) {
  const ExperimentConfig config = make_config(f);
  const DstbcCode code = resolve_code(config.code);
  out << "N = " << code.N() << "\n";
  if (code.params) {
    out << "L = " << code.params->L << "\n";
    out << "lambda = " << code.params->lambda << "\n";
    out << "n = " << code.params->n << "\n";
  } else {
    out << "lambda = " << code.grouping.max_group_size() << "\n";
  }
  out << "K = " << code.K() << "\n";
  if (code.relay_form) out << "T1 = " << code.T1() << "\n";
  out << "T2 = " << code.T2() << "\n";
  out << "g = " << code.grouping.group_count() << "\n";
  if (code.relay_form) {
    out << "S = " << join_one_based(code.relay_form->S()) << "\n";
    out << "R = " << rate_cspcu(code) << "\n";
    out << "bpcu = " << bits_per_channel_use(code) << " (" << config.code.pam_order << "-PAM components)\n";
  } else {
    out << "relay form: none (design is not conjugate linear)\n";
  }
  return 0;
}

int cmd_check(const Flags& f, std::ostream& out) {
  const ExperimentConfig config = make_config(f);
  DstbcCode code = resolve_code(config.code);
  if (!f.drop.empty()) {
    std::vector<int> zero_based;
    for (int r : f.drop) zero_based.push_back(r - 1);
    code = drop_relays(code, zero_based);
  }
  Rng rng(config.master_seed);
  CheckOptions options;
  if (f.trials) options.trials = static_cast<int>(*f.trials);

  std::vector<Criterion> criteria;
  if (f.criterion == "all") criteria = {Criterion::zf, Criterion::pic, Criterion::pic_sic};
  else if (f.criterion == "pic") criteria = {Criterion::pic};
  else if (f.criterion == "zf") criteria = {Criterion::zf};
  else criteria = {Criterion::pic_sic};

  bool all_passed = true;
  Json reports = Json::array();
  for (Criterion c : criteria) {
    const CriterionReport report = check_with_certificate(code, c, rng, options);
    all_passed = all_passed && report.passed;
    reports.push_back(report_to_json(report));
  }
  out << (criteria.size() == 1 ? reports[0] : reports).dump(2) << "\n";
  return all_passed ? 0 : 1;
}

int cmd_simulate(const Flags& f, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = make_config(f);
  if (!f.trials && !f.config) config.max_trials = 10000;
  const DstbcCode code = resolve_code(config.code);
  const BerCurve curve = run_ber(code, config);
  if (f.out) {
    std::ofstream file(*f.out, std::ios::binary);
    if (!file) throw ParameterError("cannot write " + *f.out);
    write_csv(file, curve);
    out << "wrote " << *f.out << "\n";
  } else {
    write_csv(out, curve);
  }
  err << "bpcu = " << bits_per_channel_use(code) << ", R = " << rate_cspcu(code) << ", decoder "
      << to_string(config.decoder) << ", " << curve.wall_time_s << " s\n";
  return 0;
}

int cmd_selftest(const Flags& f, std::ostream& out) {
  Rng rng(f.seed.value_or(1));
  bool ok = true;
  auto report = [&](const std::string& name, bool passed) {
    out << (passed ? "PASS " : "FAIL ") << name << "\n";
    ok = ok && passed;
  };

  report("cod identity (trivial)", verify_cod(cod_trivial()));
  report("cod identity (alamouti)", verify_cod(cod_alamouti()));
  report("projector transform", projector_transform_selftest(6, 100, rng));

  const DstbcCode code = build(2, cod_trivial(), 1, 2);
  report("noise covariance bound", noise_bound_selftest(code, 2, 100.0, 100, rng));

  const auto channel = ChannelRealization::draw(code.N(), 2, rng);
  const PowerConfig power = PowerConfig::from_snr_db(code, 10.0);
  const NoiseModel model = noise_covariance(code, channel, power);
  const RMatrix empirical = empirical_noise_covariance(code, channel, power, 20000, rng);
  const double rel = (empirical - model.gamma).norm() / model.gamma.norm();
  report("noise covariance oracle (relative error " + std::to_string(rel) + ")", rel < 0.05);
  const RMatrix whitened = model.whitening * empirical * model.whitening;
  const double white = (whitened - RMatrix::Identity(whitened.rows(), whitened.cols())).norm() /
                       std::sqrt(static_cast<double>(whitened.rows()));
  report("whitened noise is white (relative error " + std::to_string(white) + ")", white < 0.05);
  return ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed space-time block codes for amplify-and-forward relay networks", "dstbc"};
  app.require_subcommand(1);
  Flags f;

  auto* info = app.add_subcommand("info", "Print code parameters and rates");
  add_code_flags(info, f);

  auto* check = app.add_subcommand("check", "Full-diversity criteria report as JSON");
  add_code_flags(check, f);
  check->add_option("--criterion", f.criterion, "pic, pic-sic, zf or all")
      ->check(CLI::IsMember({"pic", "pic-sic", "zf", "all"}));
  check->add_option("--trials", f.trials, "Random interference draws per difference")->check(CLI::PositiveNumber);
  check->add_option("--seed", f.seed, "Random seed");
  check->add_option("--drop", f.drop, "Relays (1-based) to remove before checking")->delimiter(',');

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo bit error rate curve as CSV");
  add_code_flags(simulate, f);
  simulate->add_option("--nd", f.nd, "Receive antennas at the destination")->check(CLI::PositiveNumber);
  simulate->add_option("--decoder", f.decoder, "ml, pic, pic-sic, zf or zf-sic")
      ->check(CLI::IsMember({"ml", "pic", "pic-sic", "zf", "zf-sic"}));
  simulate->add_option("--snr-start", f.snr_start, "First SNR in dB");
  simulate->add_option("--snr-stop", f.snr_stop, "Last SNR in dB");
  simulate->add_option("--snr-step", f.snr_step, "SNR step in dB");
  simulate->add_option("--trials", f.trials, "Maximum trials per SNR point");
  simulate->add_option("--max-errors", f.max_errors, "Stop a point after this many bit errors");
  simulate->add_option("--seed", f.seed, "Master seed");
  simulate->add_option("--out", f.out, "CSV output path (default stdout)");

  auto* selftest = app.add_subcommand("selftest", "Algebraic and numerical self-checks");
  selftest->add_option("--seed", f.seed, "Random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  try {
    if (*info) return cmd_info(f, out);
    if (*check) return cmd_check(f, out);
    if (*simulate) return cmd_simulate(f, out, err);
    if (*selftest) return cmd_selftest(f, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace dstbc::cli
