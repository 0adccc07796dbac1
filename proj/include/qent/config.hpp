#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qent/io.hpp"
#include "qent/noise.hpp"
#include "qent/parallel.hpp"

namespace qent {

// Experiment knobs. Defaults reproduce the desk-scale protocol: 20k rows per
// witness model, 70/15/15 split, coarse RBF grid, 50 importance repeats.
struct ExperimentConfig {
  std::uint64_t seed = 42;

  long rows_b = 20000;
  long rows_w = 20000;
  long rows_ghz = 20000;
  long rows_cascade4 = 4000;

  double split_train = 0.70;
  double split_val = 0.15;
  double split_test = 0.15;

  std::vector<double> grid_c = {0.1, 1.0, 10.0, 100.0};
  std::vector<double> grid_gamma = {0.01, 1.0 / 63.0, 0.1, 1.0};
  long tune_rows = 4000;  // training subsample used during grid search

  double smo_tol = 1e-3;
  long smo_max_epochs = 10000;
  std::size_t smo_cache_mb = 1024;

  // feature selection stage
  long featsel_rows = 10000;       // rows per binary dataset
  long featsel_cascade4_rows = 2000;
  long featsel_eval_rows = 1000;   // validation subsample scored per repeat
  int featsel_repeats = 50;

  // noise sweep
  std::vector<double> noise_strengths = {0.01, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};
  long noise_rows = 2000;

  long ood_samples = 2000;

  int threads = default_threads();
  std::string out_dir = "out";

  void validate() const {
    if (std::abs(split_train + split_val + split_test - 1.0) > 1e-9)
      throw std::invalid_argument("config: split fractions must sum to 1");
    if (split_train <= 0 || split_val <= 0 || split_test <= 0)
      throw std::invalid_argument("config: split fractions must be positive");
    for (long n : {rows_b, rows_w, rows_ghz, rows_cascade4, featsel_rows, featsel_cascade4_rows})
      if (n < 10) throw std::invalid_argument("config: dataset sizes must be >= 10");
    if (grid_c.empty() || grid_gamma.empty())
      throw std::invalid_argument("config: tuning grid is empty");
    if (featsel_repeats < 1) throw std::invalid_argument("config: featsel_repeats must be >= 1");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  }

  SmoParams smo_params() const {
    SmoParams p;
    p.tol = smo_tol;
    p.max_epochs = smo_max_epochs;
    p.cache_bytes = smo_cache_mb * std::size_t(1 << 20);
    p.seed = seed;
    return p;
  }

  // Canonical serialization; also the config-hash input, so artifacts are
  // traceable to the exact knob values that produced them.
  std::string serialize() const {
    std::ostringstream ss;
    auto list = [](const std::vector<double>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_double(v[i]);
      return s;
    };
    ss << "seed=" << seed << "\n"
       << "rows_b=" << rows_b << "\n"
       << "rows_w=" << rows_w << "\n"
       << "rows_ghz=" << rows_ghz << "\n"
       << "rows_cascade4=" << rows_cascade4 << "\n"
       << "split_train=" << fmt_double(split_train) << "\n"
       << "split_val=" << fmt_double(split_val) << "\n"
       << "split_test=" << fmt_double(split_test) << "\n"
       << "grid_c=" << list(grid_c) << "\n"
       << "grid_gamma=" << list(grid_gamma) << "\n"
       << "tune_rows=" << tune_rows << "\n"
       << "smo_tol=" << fmt_double(smo_tol) << "\n"
       << "smo_max_epochs=" << smo_max_epochs << "\n"
       << "smo_cache_mb=" << smo_cache_mb << "\n"
       << "featsel_rows=" << featsel_rows << "\n"
       << "featsel_cascade4_rows=" << featsel_cascade4_rows << "\n"
       << "featsel_eval_rows=" << featsel_eval_rows << "\n"
       << "featsel_repeats=" << featsel_repeats << "\n"
       << "noise_strengths=" << list(noise_strengths) << "\n"
       << "noise_rows=" << noise_rows << "\n"
       << "ood_samples=" << ood_samples << "\n";
    return ss.str();
  }

  std::uint64_t hash() const { return fnv1a(serialize()); }
};

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

// Flat key=value file; '#' starts a comment, unknown keys are rejected.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "rows_b") cfg.rows_b = std::stol(val);
    else if (key == "rows_w") cfg.rows_w = std::stol(val);
    else if (key == "rows_ghz") cfg.rows_ghz = std::stol(val);
    else if (key == "rows_cascade4") cfg.rows_cascade4 = std::stol(val);
    else if (key == "split_train") cfg.split_train = std::stod(val);
    else if (key == "split_val") cfg.split_val = std::stod(val);
    else if (key == "split_test") cfg.split_test = std::stod(val);
    else if (key == "grid_c") cfg.grid_c = parse_double_list(val);
    else if (key == "grid_gamma") cfg.grid_gamma = parse_double_list(val);
    else if (key == "tune_rows") cfg.tune_rows = std::stol(val);
    else if (key == "smo_tol") cfg.smo_tol = std::stod(val);
    else if (key == "smo_max_epochs") cfg.smo_max_epochs = std::stol(val);
    else if (key == "smo_cache_mb") cfg.smo_cache_mb = std::stoul(val);
    else if (key == "featsel_rows") cfg.featsel_rows = std::stol(val);
    else if (key == "featsel_cascade4_rows") cfg.featsel_cascade4_rows = std::stol(val);
    else if (key == "featsel_eval_rows") cfg.featsel_eval_rows = std::stol(val);
    else if (key == "featsel_repeats") cfg.featsel_repeats = std::stoi(val);
    else if (key == "noise_strengths") cfg.noise_strengths = parse_double_list(val);
    else if (key == "noise_rows") cfg.noise_rows = std::stol(val);
    else if (key == "ood_samples") cfg.ood_samples = std::stol(val);
    else if (key == "threads") cfg.threads = std::stoi(val);
    else if (key == "out_dir") cfg.out_dir = val;
    else throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
  }
  return cfg;
}

}  // namespace qent
