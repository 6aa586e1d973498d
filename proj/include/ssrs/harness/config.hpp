// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: `key = value` lines, '#' comments, comma lists.

#pragma once

#include "ssrs/channel_model.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace ssrs::harness {

enum class Method { gpi_rsma, gpi_sdma, rzf_sdma, mrt };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::gpi_rsma: return "gpi-rsma";
    case Method::gpi_sdma: return "gpi-sdma";
    case Method::rzf_sdma: return "rzf-sdma";
    case Method::mrt: return "mrt";
  }
  return "?";
}

enum class SweepAxis { snr_db, n_secret, n_eves, angular_separation, kappa, none };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::n_secret: return "n_secret";
    case SweepAxis::n_eves: return "n_eves";
    case SweepAxis::angular_separation: return "angular_separation";
    case SweepAxis::kappa: return "kappa";
    case SweepAxis::none: return "none";
  }
  return "?";
}

struct ExperimentConfig {
  SystemConfig system{};
  CsitMode csit_mode = CsitMode::limited;
  std::vector<Method> methods{Method::gpi_rsma, Method::gpi_sdma, Method::rzf_sdma, Method::mrt};
  SweepAxis sweep_axis = SweepAxis::none;
  std::vector<double> sweep_values;
  int trials = 100;
  std::uint64_t master_seed = 1;
  ScenarioLayout layout{};
  std::string output_path;

  /// Axis values actually iterated; `none` runs a single unnamed point.
  std::vector<double> axis_points() const {
    if (sweep_axis == SweepAxis::none) return {std::numeric_limits<double>::quiet_NaN()};
    return sweep_values;
  }

  void validate() const {
    if (methods.empty()) throw ConfigError("methods must not be empty");
    if (sweep_axis != SweepAxis::none && sweep_values.empty()) throw ConfigError("sweep_values must not be empty");
    if (trials < 1) throw ConfigError("trials must be positive");
    try {
      system.validate();
      check_kappa(layout.kappa, "config");
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    if (!(layout.angular_spread > 0.0)) throw ConfigError("angular_spread must be positive");
    for (double v : sweep_values) {
      switch (sweep_axis) {
        case SweepAxis::n_secret:
          if (v < 0 || v > static_cast<double>(system.n_users()) || v != std::floor(v))
            throw ConfigError("n_secret sweep values must be integers in [0, K]");
          break;
        case SweepAxis::n_eves:
          if (v < 0 || v != std::floor(v)) throw ConfigError("n_eves sweep values must be nonnegative integers");
          break;
        case SweepAxis::kappa:
          if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("kappa sweep values must lie in [0, 1]");
          break;
        case SweepAxis::angular_separation:
          if (!(v >= 0.0)) throw ConfigError("angular_separation sweep values must be nonnegative");
          break;
        default: break;
      }
    }
  }
};

/// System and layout of one sweep point.
inline void apply_axis(SweepAxis axis, double value, SystemConfig& sys, ScenarioLayout& layout) {
  switch (axis) {
    case SweepAxis::snr_db: sys.set_snr_db(value); break;
    case SweepAxis::n_secret: {
      const Index k = sys.n_users();
      sys.n_secret = static_cast<Index>(value);
      sys.n_normal = k - sys.n_secret;
      break;
    }
    case SweepAxis::n_eves: sys.n_eves = static_cast<Index>(value); break;
    case SweepAxis::angular_separation: layout.user_spacing = value; break;
    case SweepAxis::kappa: layout.kappa = value; break;
    case SweepAxis::none: break;
  }
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  // pi-multiples are common for angles: "pi/6", "2pi", "pi".
  const auto p = t.find("pi");
  try {
    if (p != std::string::npos) {
      const std::string head = t.substr(0, p), tail = t.substr(p + 2);
      double v = kPi * (head.empty() ? 1.0 : std::stod(head));
      if (!tail.empty()) {
        if (tail.front() != '/') throw std::invalid_argument(t);
        v /= std::stod(tail.substr(1));
      }
      return v;
    }
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': " + text);
  }
}

inline long long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) throw ConfigError("invalid integer for '" + key + "': " + text);
  return v;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("invalid boolean for '" + key + "': " + text);
}

// "a = 1  b=2\nc = x, y" -> {(a,1), (b,2), (c,"x,y")}.
inline std::vector<std::pair<std::string, std::string>> tokenize(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string packed;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (c == '=' || c == ',') {
        while (!packed.empty() && (packed.back() == ' ' || packed.back() == '\t')) packed.pop_back();
        packed += c;
        while (i + 1 < line.size() && (line[i + 1] == ' ' || line[i + 1] == '\t')) ++i;
      } else {
        packed += c;
      }
    }
    std::istringstream words(packed);
    std::string word;
    while (words >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("expected key = value, got '" + word + "'");
      out.emplace_back(word.substr(0, eq), word.substr(eq + 1));
    }
  }
  return out;
}

}  // namespace detail

inline Method parse_method(const std::string& s) {
  if (s == "gpi-rsma") return Method::gpi_rsma;
  if (s == "gpi-sdma") return Method::gpi_sdma;
  if (s == "rzf-sdma") return Method::rzf_sdma;
  if (s == "mrt") return Method::mrt;
  throw ConfigError("unknown method '" + s + "'");
}

inline SweepAxis parse_axis(const std::string& s) {
  for (SweepAxis a : {SweepAxis::snr_db, SweepAxis::n_secret, SweepAxis::n_eves, SweepAxis::angular_separation,
                      SweepAxis::kappa, SweepAxis::none})
    if (s == to_string(a)) return a;
  throw ConfigError("unknown sweep_axis '" + s + "'");
}

inline ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  SystemConfig& sys = cfg.system;
  ScenarioLayout& lay = cfg.layout;
  std::optional<long long> stated_k;
  std::optional<double> snr_db;

  using namespace detail;
  for (const auto& [key, value] : tokenize(text)) {
    if (key == "n_antennas") sys.n_antennas = parse_int(key, value);
    else if (key == "n_secret") sys.n_secret = parse_int(key, value);
    else if (key == "n_normal") sys.n_normal = parse_int(key, value);
    else if (key == "k") stated_k = parse_int(key, value);
    else if (key == "n_eves") sys.n_eves = parse_int(key, value);
    else if (key == "snr_db") snr_db = parse_real(key, value);
    else if (key == "noise") sys.noise_user = sys.noise_eve = parse_real(key, value);
    else if (key == "noise_user") sys.noise_user = parse_real(key, value);
    else if (key == "noise_eve") sys.noise_eve = parse_real(key, value);
    else if (key == "alpha") sys.alpha = parse_real(key, value);
    else if (key == "epsilon") sys.epsilon = parse_real(key, value);
    else if (key == "t_max") sys.t_max = static_cast<int>(parse_int(key, value));
    else if (key == "csit_mode") {
      if (value == "perfect") cfg.csit_mode = CsitMode::perfect;
      else if (value == "limited") cfg.csit_mode = CsitMode::limited;
      else throw ConfigError("unknown csit_mode '" + value + "'");
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& m : split_list(value)) cfg.methods.push_back(parse_method(m));
    } else if (key == "sweep_axis") cfg.sweep_axis = parse_axis(value);
    else if (key == "sweep_values") {
      cfg.sweep_values.clear();
      for (const auto& v : split_list(value)) cfg.sweep_values.push_back(parse_real(key, v));
    } else if (key == "trials") cfg.trials = static_cast<int>(parse_int(key, value));
    else if (key == "master_seed") cfg.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "angular_spread") lay.angular_spread = parse_real(key, value);
    else if (key == "kappa") lay.kappa = parse_real(key, value);
    else if (key == "user_sector_center") lay.user_sector_center = parse_real(key, value);
    else if (key == "user_sector_width") lay.user_sector_width = parse_real(key, value);
    else if (key == "user_spacing") lay.user_spacing = parse_real(key, value);
    else if (key == "randomize_user_center") lay.randomize_user_center = parse_bool(key, value);
    else if (key == "eve_sector_start") lay.eve_sector_start = parse_real(key, value);
    else if (key == "eve_sector_width") lay.eve_sector_width = parse_real(key, value);
    else if (key == "antenna_spacing") lay.antenna_spacing = parse_real(key, value);
    else if (key == "output_path") cfg.output_path = value;
    else throw ConfigError("unknown key '" + key + "'");
  }

  if (snr_db) sys.set_snr_db(*snr_db);
  else sys.set_snr_db(20.0);
  if (stated_k && *stated_k != sys.n_secret + sys.n_normal)
    throw ConfigError("k = " + std::to_string(*stated_k) + " does not equal n_secret + n_normal = " +
                      std::to_string(sys.n_secret + sys.n_normal));
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace ssrs::harness
