// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte Carlo trials, sweeps and convergence traces.

#pragma once

#include "ssrs/baselines.hpp"
#include "ssrs/harness/config.hpp"
#include "ssrs/rate_metrics.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

namespace ssrs::harness {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based: depends only on its arguments, never on scheduling order.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t axis_index, std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(master) ^ axis_index) ^ trial);
}

struct TrialResult {
  Method method = Method::gpi_rsma;
  int trial_index = 0;
  std::uint64_t seed = 0;
  double axis_value = 0.0;
  SystemConfig system{};
  double kappa = 0.0;
  int iterations = 0;  // -1 marks a numeric failure
  bool converged = false;
  double smoothed_objective = 0.0;
  double sum_secrecy_se = 0.0;
  double common_min = 0.0;
  double runtime_ms = 0.0;
  std::string failure;
};

inline constexpr const char* kCsvHeader =
    "method,trial,seed,axis,snr_db,n,k,s,m,e,kappa,alpha,iterations,converged,objective,sum_secrecy_se,common_min,"
    "runtime_ms";

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string csv_row(const TrialResult& r) {
  const SystemConfig& s = r.system;
  std::string out;
  out += to_string(r.method);
  out += ',' + std::to_string(r.trial_index);
  out += ',' + std::to_string(r.seed);
  out += ',' + format_real(r.axis_value);
  out += ',' + format_real(s.snr_db());
  out += ',' + std::to_string(s.n_antennas);
  out += ',' + std::to_string(s.n_users());
  out += ',' + std::to_string(s.n_secret);
  out += ',' + std::to_string(s.n_normal);
  out += ',' + std::to_string(s.n_eves);
  out += ',' + format_real(r.kappa);
  out += ',' + format_real(s.alpha);
  out += ',' + std::to_string(r.iterations);
  out += r.converged ? ",true" : ",false";
  out += ',' + format_real(r.smoothed_objective);
  out += ',' + format_real(r.sum_secrecy_se);
  out += ',' + format_real(r.common_min);
  char ms[32];
  std::snprintf(ms, sizeof ms, ",%.3f", r.runtime_ms);
  out += ms;
  return out;
}

namespace detail {

struct Scored {
  int iterations = 0;
  bool converged = true;
  double objective = 0.0;
  RateReport report;
};

template <bool C>
Scored scored(const GpiResult<C>& r, const QuadFormSet& qf, const ChannelSet& truth, const SystemConfig& sys) {
  return {r.trace.iterations_used, r.trace.converged, smoothed_objective(qf, r.precoder, sys),
          sum_secrecy_se(truth, r.precoder, sys)};
}

inline QuadFormSet quadforms_for(const ChannelRealization& real, CsitMode mode, const SystemConfig& sys, bool common) {
  return mode == CsitMode::perfect ? build_quadforms_perfect(real.truth(), sys, common)
                                   : build_quadforms_limited(real.knowledge(), sys, common);
}

inline Scored run_method(Method method, const ChannelRealization& real, CsitMode mode, const SystemConfig& sys) {
  const ChannelSet truth = real.truth();
  // What the transmitter sees: true channels under perfect CSIT, estimates otherwise.
  const std::vector<CVec>& seen = mode == CsitMode::perfect ? real.user_channels : real.user_estimates;
  switch (method) {
    case Method::gpi_rsma: {
      const QuadFormSet qf = quadforms_for(real, mode, sys, true);
      return scored(gpi_solve(qf, mrt_init(seen), sys), qf, truth, sys);
    }
    case Method::gpi_sdma: {
      const QuadFormSet qf = quadforms_for(real, mode, sys, false);
      return scored(gpi_solve(qf, mrt_init_sdma(seen), sys), qf, truth, sys);
    }
    case Method::rzf_sdma: {
      const QuadFormSet qf = quadforms_for(real, mode, sys, false);
      const SdmaPrecoderStack f = rzf_precoder(seen, sys);
      return {0, true, smoothed_objective(qf, f, sys), sum_secrecy_se(truth, f, sys)};
    }
    case Method::mrt: {
      const QuadFormSet qf = quadforms_for(real, mode, sys, true);
      const PrecoderStack f = mrt_init(seen);
      return {0, true, smoothed_objective(qf, f, sys), sum_secrecy_se(truth, f, sys)};
    }
  }
  throw InvalidArgument("run_method: unknown method");
}

}  // namespace detail

/// One Monte Carlo draw scored by every configured method, from an explicit seed.
inline std::vector<TrialResult> run_trial_seeded(const ExperimentConfig& cfg, double axis_value, int trial_index,
                                                 std::uint64_t seed) {
  SystemConfig sys = cfg.system;
  ScenarioLayout layout = cfg.layout;
  if (cfg.sweep_axis != SweepAxis::none) apply_axis(cfg.sweep_axis, axis_value, sys, layout);

  std::mt19937_64 rng(seed);
  const ChannelRealization real = draw_scenario(sys, layout, rng);

  std::vector<TrialResult> rows;
  for (Method m : cfg.methods) {
    TrialResult r;
    r.method = m;
    r.trial_index = trial_index;
    r.seed = seed;
    r.axis_value = axis_value;
    r.system = sys;
    r.kappa = layout.kappa;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const detail::Scored s = detail::run_method(m, real, cfg.csit_mode, sys);
      r.iterations = s.iterations;
      r.converged = s.converged;
      r.smoothed_objective = s.objective;
      r.sum_secrecy_se = s.report.sum_secrecy_se;
      r.common_min = s.report.common_min;
    } catch (const NumericFailure& e) {
      r.iterations = -1;
      r.converged = false;
      r.smoothed_objective = r.sum_secrecy_se = r.common_min = std::numeric_limits<double>::quiet_NaN();
      r.failure = e.what();
    }
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, std::size_t axis_index, int trial_index) {
  const std::vector<double> points = cfg.axis_points();
  if (axis_index >= points.size()) throw InvalidArgument("run_trial: axis index out of range");
  const std::uint64_t seed = trial_seed(cfg.master_seed, axis_index, static_cast<std::uint64_t>(trial_index));
  return run_trial_seeded(cfg, points[axis_index], trial_index, seed);
}

inline int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// All rows of a sweep in (axis, trial, method) order.
inline std::vector<TrialResult> collect_sweep(const ExperimentConfig& cfg, int workers = default_workers()) {
  cfg.validate();
  const std::size_t n_axis = cfg.axis_points().size();
  const std::size_t n_items = n_axis * static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<TrialResult>> slots(n_items);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < n_items; i = next++)
      slots[i] = run_trial(cfg, i / static_cast<std::size_t>(cfg.trials), static_cast<int>(i % static_cast<std::size_t>(cfg.trials)));
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(n_items)));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<TrialResult> rows;
  rows.reserve(n_items * cfg.methods.size());
  for (auto& s : slots)
    for (auto& r : s) rows.push_back(std::move(r));
  return rows;
}

struct AggregateRow {
  double axis = 0.0;
  Method method = Method::gpi_rsma;
  double mean = 0.0;
  double stderr_ = 0.0;
  int n_trials = 0;
};

/// Per-(axis, method) mean and standard error; failed rows are excluded.
inline std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg, const std::vector<TrialResult>& rows) {
  std::vector<AggregateRow> out;
  const auto points = cfg.axis_points();
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (Method m : cfg.methods) {
      double sum = 0.0, sq = 0.0;
      int n = 0;
      for (const auto& r : rows) {
        const bool same_axis = std::isnan(points[a]) ? std::isnan(r.axis_value) : r.axis_value == points[a];
        if (r.method != m || !same_axis || r.iterations < 0) continue;
        sum += r.sum_secrecy_se;
        sq += r.sum_secrecy_se * r.sum_secrecy_se;
        ++n;
      }
      AggregateRow g{points[a], m, 0.0, 0.0, n};
      if (n > 0) g.mean = sum / n;
      if (n > 1) g.stderr_ = std::sqrt(std::max(sq / n - g.mean * g.mean, 0.0) * n / (n - 1) / n);
      out.push_back(g);
    }
  }
  return out;
}

inline std::string aggregate_path(const std::string& out_path) {
  const std::string suffix = ".csv";
  if (out_path.size() > suffix.size() && out_path.compare(out_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out_path.substr(0, out_path.size() - suffix.size()) + ".agg.csv";
  return out_path + ".agg.csv";
}

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << body;
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::string sweep_csv(const std::vector<TrialResult>& rows) {
  std::string body = std::string(kCsvHeader) + '\n';
  for (const auto& r : rows) body += csv_row(r) + '\n';
  return body;
}

inline std::string aggregate_csv(const std::vector<AggregateRow>& agg) {
  std::string body = "axis,method,mean_secrecy_se,stderr,n_trials\n";
  for (const auto& g : agg)
    body += format_real(g.axis) + ',' + to_string(g.method) + ',' + format_real(g.mean) + ',' + format_real(g.stderr_) +
            ',' + std::to_string(g.n_trials) + '\n';
  return body;
}

/// Writes the per-trial CSV and its `.agg.csv` companion; returns the rows.
inline std::vector<TrialResult> run_sweep(const ExperimentConfig& cfg, const std::string& out_path,
                                          int workers = default_workers()) {
  // Fail on an unwritable destination before spending the compute.
  write_text(out_path, "");
  const auto rows = collect_sweep(cfg, workers);
  write_text(out_path, sweep_csv(rows));
  write_text(aggregate_path(out_path), aggregate_csv(aggregate(cfg, rows)));
  return rows;
}

struct ConvergenceRow {
  double snr_db = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  int iteration = 0;
  double step_norm = 0.0;
  double objective = 0.0;
  double sum_secrecy_se = 0.0;
  bool converged = false;  // of the whole trace, repeated on each row
};

/// Per-iteration gpi-rsma traces; each trace stops at the first step norm
/// <= epsilon or at t_max.
inline std::vector<ConvergenceRow> collect_convergence(const ExperimentConfig& cfg, const std::vector<double>& snr_list) {
  cfg.validate();
  std::vector<ConvergenceRow> rows;
  for (std::size_t a = 0; a < snr_list.size(); ++a) {
    SystemConfig sys = cfg.system;
    ScenarioLayout layout = cfg.layout;
    sys.set_snr_db(snr_list[a]);
    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t seed = trial_seed(cfg.master_seed, a, static_cast<std::uint64_t>(t));
      std::mt19937_64 rng(seed);
      const ChannelRealization real = draw_scenario(sys, layout, rng);
      const QuadFormSet qf = detail::quadforms_for(real, cfg.csit_mode, sys, true);
      const auto& seen = cfg.csit_mode == CsitMode::perfect ? real.user_channels : real.user_estimates;
      const PrecoderStack f0 = mrt_init(seen);
      GpiOptions opts;
      opts.keep_precoders = true;
      try {
        const auto res = gpi_solve(qf, f0, sys, opts);
        const ChannelSet truth = real.truth();
        for (std::size_t i = 0; i < res.trace.iterates.size(); ++i) {
          const auto& it = res.trace.iterates[i];
          PrecoderStack fi(sys.n_antennas, sys.n_users(), res.trace.precoders[i]);
          rows.push_back({snr_list[a], t, seed, it.iteration, it.step_norm, it.objective,
                          sum_secrecy_se(truth, fi, sys).sum_secrecy_se, res.trace.converged});
        }
      } catch (const NumericFailure&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rows.push_back({snr_list[a], t, seed, -1, nan, nan, nan, false});
      }
    }
  }
  return rows;
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string body = "snr_db,trial,seed,iteration,step_norm,objective,sum_secrecy_se,converged\n";
  for (const auto& r : rows)
    body += format_real(r.snr_db) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' +
            std::to_string(r.iteration) + ',' + format_real(r.step_norm) + ',' + format_real(r.objective) + ',' +
            format_real(r.sum_secrecy_se) + (r.converged ? ",true\n" : ",false\n");
  return body;
}

inline std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg, const std::vector<double>& snr_list,
                                                   const std::string& out_path) {
  write_text(out_path, "");
  auto rows = collect_convergence(cfg, snr_list);
  write_text(out_path, convergence_csv(rows));
  return rows;
}

/// CSV body with the trailing runtime column removed, for determinism checks.
inline std::string strip_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto comma = line.rfind(',');
    out += (comma == std::string::npos ? line : line.substr(0, comma)) + '\n';
  }
  return out;
}

}  // namespace ssrs::harness
