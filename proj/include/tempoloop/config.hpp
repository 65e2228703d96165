#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tempoloop/errors.hpp"
#include "tempoloop/growth.hpp"
#include "tempoloop/micro.hpp"
#include "tempoloop/parareal.hpp"

namespace tempoloop {

// End value of the serial reference at default settings, frozen from an
// oracle run (see tests/make_golden). `tempoloop --check-golden` recomputes
// it and compares within 1e-12.
inline constexpr double kSerialReferenceGolden = 0.33000000095164206;

// Full experiment description: growth model, micro solver, parareal driver
// and sweep layout. All times carry their unit in the config key name; rates
// are per second, macro steps in days.
struct ExperimentConfig {
  GrowthParams growth;
  MicroConfig micro;
  double t_end_days = 300.0;
  double dt_fine_days = 0.3;
  double eps_par = 1e-3;
  int max_iterations = 20;
  std::vector<PararealVariant> variants = {PararealVariant::standard,
                                           PararealVariant::reuse,
                                           PararealVariant::interpolation};
  std::vector<int> process_counts = {10, 20, 30, 40, 50, 60};
  std::string output_dir = "out";
  bool emit_trajectories = false;
  int threads = 1;

  long n_fine_steps() const { return std::llround(t_end_days / dt_fine_days); }

  void validate() const {
    growth.validate();
    micro.validate();
    if (variants.empty()) throw ConfigError("config: variants must not be empty");
    if (process_counts.empty())
      throw ConfigError("config: process_counts must not be empty");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    // Every swept P must fit the fine grid; delegate the grid checks.
    for (int p : process_counts) parareal_for(p, variants.front()).validate();
    if (max_iterations < 1)
      throw ConfigError("config: max_iterations must be >= 1");
  }

  PararealConfig parareal_for(int processes, PararealVariant variant) const {
    PararealConfig cfg;
    cfg.processes = processes;
    cfg.t_end_days = t_end_days;
    cfg.dt_fine_days = dt_fine_days;
    cfg.eps_par = eps_par;
    cfg.variant = variant;
    cfg.max_iterations = max_iterations;
    cfg.threads = threads;
    return cfg;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + value + "'");
  }
  if (used != value.size())
    throw ConfigError("config: bad number for " + key + ": '" + value + "'");
  return parsed;
}

inline int parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  int parsed = 0;
  try {
    parsed = std::stoi(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
  }
  if (used != value.size())
    throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
  return parsed;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("config: bad boolean for " + key + " (use true/false)");
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) items.push_back(trim(item));
  return items;
}

inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace detail

// Flat `key = value` lines; '#' starts a comment; unknown and duplicate keys
// are rejected. Keys not present keep their defaults.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw ConfigError("config: duplicate key '" + key + "'");

    if (key == "alpha_per_second") {
      cfg.growth.alpha = detail::parse_double(key, value);
    } else if (key == "sigma0") {
      cfg.growth.sigma0 = detail::parse_double(key, value);
    } else if (key == "delta_tau_seconds") {
      cfg.micro.delta_tau = detail::parse_double(key, value);
    } else if (key == "cycle_length_seconds") {
      cfg.micro.cycle_length = detail::parse_double(key, value);
    } else if (key == "lambda_per_second") {
      cfg.micro.lambda = detail::parse_double(key, value);
    } else if (key == "v_mean") {
      cfg.micro.v_mean = detail::parse_double(key, value);
    } else if (key == "sigma_scale") {
      cfg.micro.sigma_scale = detail::parse_double(key, value);
    } else if (key == "eps_p") {
      cfg.micro.eps_p = detail::parse_double(key, value);
    } else if (key == "max_cycles") {
      cfg.micro.max_cycles = detail::parse_int(key, value);
    } else if (key == "t_end_days") {
      cfg.t_end_days = detail::parse_double(key, value);
    } else if (key == "dt_fine_days") {
      cfg.dt_fine_days = detail::parse_double(key, value);
    } else if (key == "eps_par") {
      cfg.eps_par = detail::parse_double(key, value);
    } else if (key == "max_iterations") {
      cfg.max_iterations = detail::parse_int(key, value);
    } else if (key == "variants") {
      cfg.variants.clear();
      for (const std::string& name : detail::split_list(value))
        cfg.variants.push_back(parse_variant(name));
      if (cfg.variants.empty())
        throw ConfigError("config: variants must not be empty");
    } else if (key == "process_counts") {
      cfg.process_counts.clear();
      for (const std::string& item : detail::split_list(value))
        cfg.process_counts.push_back(detail::parse_int(key, item));
      if (cfg.process_counts.empty())
        throw ConfigError("config: process_counts must not be empty");
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "emit_trajectories") {
      cfg.emit_trajectories = detail::parse_bool(key, value);
    } else if (key == "threads") {
      cfg.threads = detail::parse_int(key, value);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

// Canonical form: every key, fixed order, 17 significant digits. Serializing
// a parsed serialization reproduces it byte for byte.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "alpha_per_second = " << detail::format_double(cfg.growth.alpha)
      << "\n";
  out << "sigma0 = " << detail::format_double(cfg.growth.sigma0) << "\n";
  out << "delta_tau_seconds = " << detail::format_double(cfg.micro.delta_tau)
      << "\n";
  out << "cycle_length_seconds = "
      << detail::format_double(cfg.micro.cycle_length) << "\n";
  out << "lambda_per_second = " << detail::format_double(cfg.micro.lambda)
      << "\n";
  out << "v_mean = " << detail::format_double(cfg.micro.v_mean) << "\n";
  out << "sigma_scale = " << detail::format_double(cfg.micro.sigma_scale)
      << "\n";
  out << "eps_p = " << detail::format_double(cfg.micro.eps_p) << "\n";
  out << "max_cycles = " << cfg.micro.max_cycles << "\n";
  out << "t_end_days = " << detail::format_double(cfg.t_end_days) << "\n";
  out << "dt_fine_days = " << detail::format_double(cfg.dt_fine_days) << "\n";
  out << "eps_par = " << detail::format_double(cfg.eps_par) << "\n";
  out << "max_iterations = " << cfg.max_iterations << "\n";
  out << "variants = ";
  for (std::size_t i = 0; i < cfg.variants.size(); ++i)
    out << (i ? "," : "") << to_string(cfg.variants[i]);
  out << "\n";
  out << "process_counts = ";
  for (std::size_t i = 0; i < cfg.process_counts.size(); ++i)
    out << (i ? "," : "") << cfg.process_counts[i];
  out << "\n";
  out << "output_dir = " << cfg.output_dir << "\n";
  out << "emit_trajectories = " << (cfg.emit_trajectories ? "true" : "false")
      << "\n";
  out << "threads = " << cfg.threads << "\n";
  return out.str();
}

}  // namespace tempoloop
