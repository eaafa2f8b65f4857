#pragma once

#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dmme/bath.hpp"
#include "dmme/controls.hpp"

// Flat key=value experiment configuration.  '#' starts a comment, blank
// lines are ignored, keys are case-sensitive and lowercase.  After the file
// is read, every accepted key can be overridden through the environment as
// DMME_<KEY-IN-UPPERCASE>.

namespace dmme {

struct run_config {
  protocol_params proto;
  bath_params bath;
  std::string initial_state = "psi3_0";  // psi3_0 | ket00 | psi4_0 | custom
  std::array<double, 8> custom_state{};  // re,im pairs for the four amplitudes
  bool custom_state_set = false;
  bool closed_system = false;
  int grid = 1000;
  std::string out_dir = "out";
  double f_const = 1.0;  // constant-control stationary runs
  double j_const = 1.0;
  double scan_lo = 0.1;
  double scan_hi = 1.0;
};

namespace detail {

inline const std::vector<std::string>& accepted_keys() {
  static const std::vector<std::string> keys = {
      "gamma", "delta", "g2m", "omega_e", "g3", "variant", "orientation",
      "temperature", "s32", "s24", "cutoff_multiplier", "kappa",
      "include_lamb_shift", "initial_state", "custom_state", "closed_system",
      "grid", "out_dir", "f_const", "j_const", "scan_lo", "scan_hi"};
  return keys;
}

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw validation_error("config key '" + key + "': cannot parse '" + v + "' as a number");
  }
}

inline int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(x);
  } catch (const std::exception&) {
    throw validation_error("config key '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw validation_error("config key '" + key + "': cannot parse '" + v + "' as a boolean");
}

inline void apply_key(run_config& c, const std::string& key, const std::string& value) {
  if (key == "gamma") c.proto.gamma = parse_double(key, value);
  else if (key == "delta") c.proto.delta = parse_double(key, value);
  else if (key == "g2m") c.proto.g2m = parse_double(key, value);
  else if (key == "omega_e") c.proto.omega_e = parse_double(key, value);
  else if (key == "g3") c.proto.g3 = parse_double(key, value);
  else if (key == "variant") {
    if (value == "cos2") c.proto.variant = ansatz_variant::cos2;
    else if (value == "sin3") c.proto.variant = ansatz_variant::sin3;
    else throw validation_error("config key 'variant': expected cos2 or sin3, got '" + value + "'");
  } else if (key == "orientation") {
    if (value == "forward") c.proto.orientation = ansatz_orientation::forward;
    else if (value == "reversed") c.proto.orientation = ansatz_orientation::reversed;
    else throw validation_error("config key 'orientation': expected forward or reversed, got '" + value + "'");
  } else if (key == "temperature") c.bath.temperature = parse_double(key, value);
  else if (key == "s32") c.bath.s32 = parse_double(key, value);
  else if (key == "s24") c.bath.s24 = parse_double(key, value);
  else if (key == "cutoff_multiplier" || key == "kappa") c.bath.kappa = parse_double(key, value);
  else if (key == "include_lamb_shift") c.bath.include_lamb_shift = parse_bool(key, value);
  else if (key == "initial_state") {
    if (value != "psi3_0" && value != "ket00" && value != "psi4_0" && value != "custom") {
      throw validation_error("config key 'initial_state': expected psi3_0, ket00, psi4_0 or custom");
    }
    c.initial_state = value;
  } else if (key == "custom_state") {
    std::stringstream ss(value);
    std::string part;
    int n = 0;
    while (std::getline(ss, part, ',')) {
      if (n >= 8) throw validation_error("config key 'custom_state': expected 8 comma-separated numbers");
      c.custom_state[n++] = parse_double(key, trim(part));
    }
    if (n != 8) throw validation_error("config key 'custom_state': expected 8 comma-separated numbers");
    c.custom_state_set = true;
  } else if (key == "closed_system") c.closed_system = parse_bool(key, value);
  else if (key == "grid") c.grid = parse_int(key, value);
  else if (key == "out_dir") c.out_dir = value;
  else if (key == "f_const") c.f_const = parse_double(key, value);
  else if (key == "j_const") c.j_const = parse_double(key, value);
  else if (key == "scan_lo") c.scan_lo = parse_double(key, value);
  else if (key == "scan_hi") c.scan_hi = parse_double(key, value);
  else {
    std::string keys;
    for (const auto& k : accepted_keys()) keys += (keys.empty() ? "" : ", ") + k;
    throw validation_error("unknown config key '" + key + "'; accepted keys: " + keys);
  }
}

}  // namespace detail

inline void apply_config_text(run_config& c, const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string s = line;
    size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw validation_error("config line " + std::to_string(lineno) + " is not key=value: '" + line + "'");
    }
    std::string key = detail::trim(s.substr(0, eq));
    std::string value = detail::trim(s.substr(eq + 1));
    detail::apply_key(c, key, value);
  }
}

inline void apply_env_overrides(run_config& c) {
  for (const auto& key : detail::accepted_keys()) {
    std::string env = "DMME_";
    for (char ch : key) env += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const char* v = std::getenv(env.c_str())) {
      detail::apply_key(c, key, detail::trim(v));
    }
  }
}

inline void validate(const run_config& c) {
  validate(c.proto);
  if (c.bath.temperature < 0) throw validation_error("temperature must be nonnegative");
  if (!(c.bath.kappa > 0)) throw validation_error("cutoff_multiplier must be positive");
  if (c.bath.s32 < 0 || c.bath.s24 < 0) throw validation_error("coupling strengths must be nonnegative");
  if (c.grid < 1) throw validation_error("grid must be at least 1");
  if (c.initial_state == "custom" && !c.custom_state_set) {
    throw validation_error("initial_state=custom needs a custom_state value");
  }
  if (!(c.scan_lo > 0) || !(c.scan_hi > c.scan_lo)) {
    throw validation_error("scan range must satisfy 0 < scan_lo < scan_hi");
  }
}

// Load defaults, optional file, then environment overrides; validate.
inline run_config load_config(const std::string& path) {
  run_config c;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(c, buf.str());
  }
  apply_env_overrides(c);
  validate(c);
  return c;
}

// The configured initial state as a normalized vector; needs the t = 0
// invariant eigensystem for the psi_n choices.
inline Vec4 initial_state_vector(const run_config& c, const lri_eigensystem& es0) {
  if (c.initial_state == "psi3_0") return es0.states[2];
  if (c.initial_state == "psi4_0") return es0.states[3];
  if (c.initial_state == "ket00") return ket(0);
  Vec4 v;
  for (int i = 0; i < 4; ++i) v(i) = cplx(c.custom_state[2 * i], c.custom_state[2 * i + 1]);
  double n = v.norm();
  if (n < 1e-12) throw validation_error("custom_state must be a nonzero vector");
  return v / n;
}

}  // namespace dmme
