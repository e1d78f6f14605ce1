#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../history.hpp"
#include "sweep.hpp"

namespace onebit::bench {

/// Accepts "adaptive", "adaptive:<alpha0>:<tau>", "fixed:<alpha>" or a bare
/// number (fixed).
inline AlphaMode parse_alpha(std::string_view text) {
  auto number = [&](std::string_view s) {
    std::string str(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      throw error(errc::config, "bad alpha value '" + std::string(text) + "'");
    }
    if (used != str.size()) throw error(errc::config, "bad alpha value '" + std::string(text) + "'");
    return v;
  };
  AlphaMode mode;
  if (text == "adaptive") {
    mode = AdaptiveAlpha{};
  } else if (text.starts_with("adaptive:")) {
    const auto rest = text.substr(9);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw error(errc::config, "adaptive alpha needs alpha0:tau");
    mode = AdaptiveAlpha{number(rest.substr(0, colon)), number(rest.substr(colon + 1))};
  } else if (text.starts_with("fixed:")) {
    mode = FixedAlpha{number(text.substr(6))};
  } else {
    mode = FixedAlpha{number(text)};
  }
  try {
    validate(mode);
  } catch (const error& e) {
    throw error(errc::config, e.what());
  }
  return mode;
}

namespace detail {

inline AlphaMode alpha_from_json(const nlohmann::json& j) {
  if (j.is_number()) {
    AlphaMode out = FixedAlpha{j.get<double>()};
    try {
      validate(out);
    } catch (const error& e) {
      throw error(errc::config, e.what());
    }
    return out;
  }
  if (j.is_string()) return parse_alpha(j.get<std::string>());
  if (j.is_object()) {
    const auto mode = j.value("mode", std::string("adaptive"));
    AlphaMode out;
    if (mode == "adaptive") {
      out = AdaptiveAlpha{j.value("alpha0", 4.0), j.value("tau", 1.0)};
    } else if (mode == "fixed") {
      if (!j.contains("alpha")) throw error(errc::config, "fixed alpha_mode needs 'alpha'");
      out = FixedAlpha{j.at("alpha").get<double>()};
    } else {
      throw error(errc::config, "alpha mode must be 'adaptive' or 'fixed'");
    }
    try {
      validate(out);
    } catch (const error& e) {
      throw error(errc::config, e.what());
    }
    return out;
  }
  throw error(errc::config, "alpha_mode must be a number, string or object");
}

template <class T>
std::vector<T> scalar_or_array(const nlohmann::json& j, const char* key) {
  if (j.is_array()) {
    std::vector<T> out;
    for (const auto& e : j) out.push_back(e.get<T>());
    return out;
  }
  if (j.is_number()) return {j.get<T>()};
  throw error(errc::config, std::string(key) + " must be a number or an array of numbers");
}

inline std::size_t as_count(const nlohmann::json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw error(errc::config, std::string(key) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

}  // namespace detail

/// Builds a config from JSON text on top of the experiment's defaults.
/// Recognized keys: experiment, n, k, m, rho, trials, base_seed,
/// algorithms, alpha_mode, alpha_variants, k_select, biht_max_iters,
/// biht_step_size, biht_stop_on_stall, threads. Unknown keys are errors.
inline SweepConfig parse_config(std::string_view json_text, std::optional<Experiment> experiment) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::config, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw error(errc::config, "config must be a JSON object");

  if (j.contains("experiment")) {
    const auto name = j.at("experiment").get<std::string>();
    const auto parsed = parse_experiment(name);
    if (!parsed) throw error(errc::config, "unknown experiment '" + name + "'");
    if (experiment && *experiment != *parsed)
      throw error(errc::config, "config experiment '" + name + "' does not match the requested one");
    experiment = parsed;
  }
  if (!experiment) throw error(errc::config, "no experiment given");

  SweepConfig c = SweepConfig::defaults(*experiment);
  static const std::set<std::string> known{"experiment",  "n",         "k",           "m",
                                           "rho",         "trials",    "base_seed",   "algorithms",
                                           "alpha_mode",  "alpha_variants", "k_select", "biht_max_iters",
                                           "biht_step_size", "biht_stop_on_stall", "threads"};
  try {
    for (const auto& [key, value] : j.items()) {
      if (!known.contains(key)) throw error(errc::config, "unknown config key '" + key + "'");
      if (key == "n") c.n = detail::scalar_or_array<std::size_t>(value, "n");
      else if (key == "k") c.k = detail::scalar_or_array<std::size_t>(value, "k");
      else if (key == "m") c.m = detail::scalar_or_array<std::size_t>(value, "m");
      else if (key == "rho") c.rho = detail::scalar_or_array<double>(value, "rho");
      else if (key == "trials") c.trials = detail::as_count(value, "trials");
      else if (key == "base_seed") c.base_seed = value.get<std::uint64_t>();
      else if (key == "threads") c.threads = detail::as_count(value, "threads");
      else if (key == "biht_max_iters") c.biht_max_iters = detail::as_count(value, "biht_max_iters");
      else if (key == "biht_step_size") c.biht_step_size = value.get<double>();
      else if (key == "biht_stop_on_stall") c.biht_stop_on_stall = value.get<bool>();
      else if (key == "k_select") c.k_select = detail::scalar_or_array<std::size_t>(value, "k_select");
      else if (key == "alpha_mode") c.alpha_mode = detail::alpha_from_json(value);
      else if (key == "alpha_variants") {
        c.alpha_variants.clear();
        for (const auto& e : value) c.alpha_variants.push_back(detail::alpha_from_json(e));
      } else if (key == "algorithms") {
        c.algorithms.clear();
        for (const auto& e : value) {
          const auto name = e.get<std::string>();
          const auto a = parse_algorithm(name);
          if (!a) throw error(errc::config, "unknown algorithm '" + name + "'");
          c.algorithms.push_back(*a);
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::config, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

inline SweepConfig load_config(const std::string& path, std::optional<Experiment> experiment) {
  std::ifstream in(path);
  if (!in) throw error(errc::io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), experiment);
}

/// Rows of comma-separated reals. Blank lines are skipped; all rows must
/// have the same length.
inline MeasurementEnsemble read_matrix_csv(std::istream& in) {
  std::vector<double> entries;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t count = 0;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw error(errc::io, "matrix row " + std::to_string(rows + 1) + ": bad number '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos)
        throw error(errc::io, "matrix row " + std::to_string(rows + 1) + ": bad number '" + cell + "'");
      entries.push_back(v);
      ++count;
    }
    if (rows == 0) cols = count;
    else if (count != cols) throw error(errc::io, "matrix row " + std::to_string(rows + 1) + " has wrong length");
    ++rows;
  }
  if (rows == 0 || cols == 0) throw error(errc::io, "matrix file is empty");
  return MeasurementEnsemble(rows, cols, std::move(entries));
}

/// +1 / -1 values separated by commas and/or newlines.
inline BitMeasurements read_bits_csv(std::istream& in) {
  std::vector<std::int8_t> bits;
  std::string token;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (char& ch : text)
    if (ch == ',' || ch == '\r' || ch == '\t') ch = '\n';
  std::stringstream ss(text);
  while (std::getline(ss, token)) {
    const auto first = token.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    const auto t = token.substr(first, token.find_last_not_of(' ') - first + 1);
    if (t == "1" || t == "+1") bits.push_back(1);
    else if (t == "-1") bits.push_back(-1);
    else throw error(errc::io, "bits file: expected +1 or -1, got '" + t + "'");
  }
  if (bits.empty()) throw error(errc::io, "bits file is empty");
  return BitMeasurements(std::move(bits));
}

}  // namespace onebit::bench
