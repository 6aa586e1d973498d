// SPDX-License-Identifier: Apache-2.0
//
// ssrs: secure rate-splitting precoder experiments.
//
//   ssrs sweep    --config PATH [--out PATH] [--workers N]
//   ssrs converge --config PATH --snr LIST [--out PATH]
//   ssrs single   --config PATH --seed S
//   ssrs validate [--filter NAME]
//
// SSRS_MASTER_SEED overrides master_seed from the config file.
// Exit codes: 0 ok, 1 config error, 2 io error, 3 validation failure.

#include "ssrs/harness/validation.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

using namespace ssrs;
using namespace ssrs::harness;

enum Exit { kOk = 0, kConfig = 1, kIo = 2, kValidation = 3 };

ExperimentConfig load(const std::string& path) {
  ExperimentConfig cfg = parse_config_file(path);
  if (const char* env = std::getenv("SSRS_MASTER_SEED")) {
    try {
      std::size_t used = 0;
      cfg.master_seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("SSRS_MASTER_SEED is not an unsigned integer: ") + env);
    }
  }
  return cfg;
}

std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : harness::detail::split_list(text)) out.push_back(harness::detail::parse_real("snr", item));
  if (out.empty()) throw ConfigError("--snr needs at least one value");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure rate-splitting precoder optimization by generalized power iteration"};
  app.require_subcommand(1);

  std::string config_path, out_path, snr_text, filter;
  int workers = default_workers();
  std::uint64_t seed = 0;

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep to CSV plus an .agg.csv summary");
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--out", out_path, "per-trial CSV path (default: output_path from the config)");
  sweep->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  auto* converge = app.add_subcommand("converge", "per-iteration convergence traces of gpi-rsma");
  converge->add_option("--config", config_path, "config file")->required();
  converge->add_option("--snr", snr_text, "comma-separated SNR list in dB")->required();
  converge->add_option("--out", out_path, "trace CSV path (default: output_path from the config)");

  auto* single = app.add_subcommand("single", "one scenario draw, every configured method, rows to stdout");
  single->add_option("--config", config_path, "config file")->required();
  single->add_option("--seed", seed, "scenario seed")->required();

  auto* validate = app.add_subcommand("validate", "run the self-check suite");
  validate->add_option("--filter", filter, "only checks whose name contains this");

  auto resolve_out = [](std::string& path, const ExperimentConfig& cfg) {
    if (path.empty()) path = cfg.output_path;
    if (path.empty()) throw ConfigError("no output path: pass --out or set output_path");
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (*sweep) {
      const ExperimentConfig cfg = load(config_path);
      resolve_out(out_path, cfg);
      const auto rows = run_sweep(cfg, out_path, workers);
      const auto failed = std::count_if(rows.begin(), rows.end(), [](const TrialResult& r) { return r.iterations < 0; });
      std::cerr << "wrote " << rows.size() << " rows to " << out_path << " (" << failed << " numeric failures)\n";
    } else if (*converge) {
      const ExperimentConfig cfg = load(config_path);
      resolve_out(out_path, cfg);
      const auto rows = run_convergence(cfg, parse_snr_list(snr_text), out_path);
      std::cerr << "wrote " << rows.size() << " trace rows to " << out_path << '\n';
    } else if (*single) {
      ExperimentConfig cfg = load(config_path);
      const double axis = cfg.axis_points().front();
      std::cout << kCsvHeader << '\n';
      for (const auto& r : run_trial_seeded(cfg, axis, 0, seed)) {
        std::cout << csv_row(r) << '\n';
        if (!r.failure.empty()) std::cerr << to_string(r.method) << ": " << r.failure << '\n';
      }
    } else if (*validate) {
      const auto results = run_validation(validation_suite(), filter);
      bool all = !results.empty();
      for (const auto& r : results) {
        std::cout << format_check(r) << '\n';
        all = all && r.pass;
      }
      if (results.empty()) std::cerr << "no check matches '" << filter << "'\n";
      return all ? kOk : kValidation;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
