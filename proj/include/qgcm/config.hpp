// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgcm/io.hpp"
#include "qgcm/kernels.hpp"
#include "qgcm/model.hpp"
#include "qgcm/qsim.hpp"
#include "qgcm/solver.hpp"

namespace qgcm {

// ---------------------------------------------------------------------------
// Experiment configuration shared by the command-line tools: flat key=value
// files (JSON also accepted), overridable by command-line flags.  The echo()
// block written into every output reproduces the run when fed back in.
// ---------------------------------------------------------------------------

enum class RunMode { exact, shots, noisy };
enum class SolverKind { diag, vqd, both };
enum class MitigationKind { none, zne, scale, zne_scale };

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::exact: return "exact";
    case RunMode::shots: return "shots";
    case RunMode::noisy: return "noisy";
  }
  throw std::invalid_argument("to_string(RunMode): bad enum value");
}

inline const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::diag: return "diag";
    case SolverKind::vqd: return "vqd";
    case SolverKind::both: return "both";
  }
  throw std::invalid_argument("to_string(SolverKind): bad enum value");
}

inline const char* to_string(MitigationKind m) {
  switch (m) {
    case MitigationKind::none: return "none";
    case MitigationKind::zne: return "zne";
    case MitigationKind::scale: return "scale";
    case MitigationKind::zne_scale: return "zne+scale";
  }
  throw std::invalid_argument("to_string(MitigationKind): bad enum value");
}

inline RunMode run_mode_from_string(const std::string& s) {
  if (s == "exact") return RunMode::exact;
  if (s == "shots") return RunMode::shots;
  if (s == "noisy") return RunMode::noisy;
  throw std::invalid_argument("mode must be exact|shots|noisy, got '" + s + "'");
}

inline SolverKind solver_from_string(const std::string& s) {
  if (s == "diag") return SolverKind::diag;
  if (s == "vqd") return SolverKind::vqd;
  if (s == "both") return SolverKind::both;
  throw std::invalid_argument("solver must be diag|vqd|both, got '" + s + "'");
}

inline MitigationKind mitigation_from_string(const std::string& s) {
  if (s == "none") return MitigationKind::none;
  if (s == "zne") return MitigationKind::zne;
  if (s == "scale") return MitigationKind::scale;
  if (s == "zne+scale" || s == "zne_scale") return MitigationKind::zne_scale;
  throw std::invalid_argument("mitigate must be none|zne|scale|zne+scale, got '" + s + "'");
}

/// Parse an angle that may use pi notation: "pi", "-pi/3", "0.4pi", "1.57".
inline double parse_angle(const std::string& text) {
  std::string s = detail::trim(text);
  if (s.empty()) throw std::invalid_argument("parse_angle: empty string");
  double sign = 1.0;
  if (s[0] == '+' || s[0] == '-') {
    if (s[0] == '-') sign = -1.0;
    s = s.substr(1);
  }
  const std::size_t pi_pos = s.find("pi");
  if (pi_pos == std::string::npos) return sign * parse_double(s);
  const std::string pre = detail::trim(s.substr(0, pi_pos));
  const std::string post = detail::trim(s.substr(pi_pos + 2));
  double value = std::numbers::pi * (pre.empty() ? 1.0 : parse_double(pre));
  if (!post.empty()) {
    if (post[0] != '/') throw std::invalid_argument("parse_angle: bad angle '" + text + "'");
    value /= parse_double(detail::trim(post.substr(1)));
  }
  return sign * value;
}

struct ExperimentConfig {
  // model / grid
  int n = 4;
  double epsilon = 1.0;
  double chi = 1.0;
  std::vector<double> chi_sweep = {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
  bool use_chi_sweep = false;
  int grid_l = 5;

  // estimation
  RunMode mode = RunMode::exact;
  std::uint64_t shots = 10000;
  std::uint64_t seed = 42;
  MitigationKind mitigate = MitigationKind::none;
  std::vector<int> zne_folds = {0, 1, 2};
  bool scale_before_zne = false;
  bool assume_real = false;
  std::uint64_t calibration_shot_factor = 10;
  NoiseParams noise;  // engaged when mode == noisy

  // solving
  SolverKind solver = SolverKind::diag;
  std::optional<double> norm_threshold;  // default depends on mode
  double vqd_bound = 2.0;
  std::optional<double> vqd_lambda;
  std::optional<double> vqd_beta;
  int vqd_n_states = -1;
  int vqd_max_iterations = 500;
  double vqd_gradient_tolerance = 1e-6;
  int vqd_restarts = 5;
  bool vqd_dfo = false;

  // study parameters
  std::vector<std::uint64_t> shots_list = {100, 1000, 10000};
  int n_seeds = 10;
  std::optional<double> theta_ref;

  // output location (not part of the echo; it does not affect results)
  std::string out_dir = "out";

  double effective_norm_threshold() const {
    return norm_threshold.value_or(mode == RunMode::exact ? 1e-10 : 1e-4);
  }

  LipkinParams lipkin(double chi_value) const {
    LipkinParams p{n, epsilon, chi_value};
    p.validate();
    return p;
  }

  EstimatorConfig estimator() const {
    EstimatorConfig e;
    e.n_shots = mode == RunMode::exact ? kExactShots : shots;
    e.seed = seed;
    if (mode == RunMode::noisy) e.noise = noise;
    e.zne = (mitigate == MitigationKind::zne || mitigate == MitigationKind::zne_scale);
    e.zne_folds = zne_folds;
    e.scaling_correction =
        (mitigate == MitigationKind::scale || mitigate == MitigationKind::zne_scale);
    e.scale_before_zne = scale_before_zne;
    e.assume_real = assume_real;
    e.calibration_shot_factor = calibration_shot_factor;
    e.validate();
    return e;
  }

  DiagConfig diag_config() const { return DiagConfig{effective_norm_threshold()}; }

  VqdConfig vqd_config() const {
    VqdConfig v;
    v.bound = vqd_bound;
    v.lambda_norm = vqd_lambda;
    v.beta_orth = vqd_beta;
    v.n_states = vqd_n_states;
    v.max_iterations = vqd_max_iterations;
    v.gradient_tolerance = vqd_gradient_tolerance;
    v.restarts = vqd_restarts;
    v.seed = seed;
    v.norm_threshold = effective_norm_threshold();
    v.use_dfo_fallback = vqd_dfo;
    v.validate();
    return v;
  }

  void validate() const {
    lipkin(chi);
    for (double c : chi_sweep) lipkin(c);
    if (grid_l < 2) throw std::invalid_argument("config: grid_l must be >= 2");
    if (mode != RunMode::exact && shots == 0)
      throw std::invalid_argument("config: shots must be > 0 outside exact mode");
    if (n_seeds < 1) throw std::invalid_argument("config: n_seeds must be >= 1");
    if (shots_list.empty()) throw std::invalid_argument("config: shots_list must not be empty");
    estimator();
    diag_config().validate();
    vqd_config();
  }

  std::vector<std::string> echo() const;
  void set(const std::string& key, const std::string& value);
  static ExperimentConfig from_file(const std::filesystem::path& path);
};

namespace detail {

template <typename T>
std::string join_list(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    if constexpr (std::is_same_v<T, double>)
      out << format_g17(values[i]);
    else
      out << values[i];
  }
  return out.str();
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (const std::string& piece : split(s, ','))
    if (!trim(piece).empty()) out.push_back(trim(piece));
  return out;
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected boolean, got '" + s + "'");
}

}  // namespace detail

inline std::vector<std::string> ExperimentConfig::echo() const {
  std::vector<std::string> lines;
  auto kv = [&lines](const std::string& k, const std::string& v) { lines.push_back(k + " = " + v); };
  kv("n", std::to_string(n));
  kv("epsilon", format_g17(epsilon));
  kv("chi", format_g17(chi));
  kv("chi_sweep", detail::join_list(chi_sweep));
  kv("use_chi_sweep", use_chi_sweep ? "true" : "false");
  kv("grid_l", std::to_string(grid_l));
  kv("mode", to_string(mode));
  kv("shots", std::to_string(shots));
  kv("seed", std::to_string(seed));
  kv("mitigate", to_string(mitigate));
  kv("zne_folds", detail::join_list(zne_folds));
  kv("scale_before_zne", scale_before_zne ? "true" : "false");
  kv("assume_real", assume_real ? "true" : "false");
  kv("calibration_shot_factor", std::to_string(calibration_shot_factor));
  kv("noise_t1_us", format_g17(noise.t1_us));
  kv("noise_t2_us", format_g17(noise.t2_us));
  kv("noise_readout_error", format_g17(noise.readout_error));
  kv("noise_cnot_error", format_g17(noise.cnot_error));
  kv("noise_one_qubit_error", format_g17(noise.one_qubit_error));
  kv("noise_gate_1q_ns", format_g17(noise.gate_1q_ns));
  kv("noise_gate_2q_ns", format_g17(noise.gate_2q_ns));
  kv("noise_readout_ns", format_g17(noise.readout_ns));
  kv("solver", to_string(solver));
  kv("norm_threshold", format_g17(effective_norm_threshold()));
  kv("vqd_bound", format_g17(vqd_bound));
  kv("vqd_lambda", vqd_lambda ? format_g17(*vqd_lambda) : "auto");
  kv("vqd_beta", vqd_beta ? format_g17(*vqd_beta) : "auto");
  kv("vqd_n_states", std::to_string(vqd_n_states));
  kv("vqd_max_iterations", std::to_string(vqd_max_iterations));
  kv("vqd_gradient_tolerance", format_g17(vqd_gradient_tolerance));
  kv("vqd_restarts", std::to_string(vqd_restarts));
  kv("vqd_optimizer", vqd_dfo ? "linear_dfo" : "quasi_newton");
  kv("shots_list", detail::join_list(shots_list));
  kv("n_seeds", std::to_string(n_seeds));
  if (theta_ref) kv("theta_ref", format_g17(*theta_ref));
  return lines;
}

inline void ExperimentConfig::set(const std::string& key, const std::string& value) {
  // Metadata keys emitted in output echo blocks; ignored on the way back in
  // so that any output's comment block (with '#' stripped) is a valid config.
  if (key == "command" || key == "tool" || key == "provenance" || key == "mitigation" ||
      key == "n_shots" || key == "thetas")
    return;
  if (key == "n") n = std::stoi(value);
  else if (key == "epsilon") epsilon = parse_double(value);
  else if (key == "chi") chi = parse_double(value);
  else if (key == "chi_sweep") {
    chi_sweep.clear();
    for (const std::string& v : detail::split_list(value)) chi_sweep.push_back(parse_double(v));
  } else if (key == "use_chi_sweep") use_chi_sweep = detail::parse_bool(value);
  else if (key == "grid_l") grid_l = std::stoi(value);
  else if (key == "mode") mode = run_mode_from_string(value);
  else if (key == "shots") shots = std::stoull(value);
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "mitigate") mitigate = mitigation_from_string(value);
  else if (key == "zne_folds") {
    zne_folds.clear();
    for (const std::string& v : detail::split_list(value)) zne_folds.push_back(std::stoi(v));
  } else if (key == "scale_before_zne") scale_before_zne = detail::parse_bool(value);
  else if (key == "assume_real") assume_real = detail::parse_bool(value);
  else if (key == "calibration_shot_factor") calibration_shot_factor = std::stoull(value);
  else if (key == "noise_t1_us") noise.t1_us = parse_double(value);
  else if (key == "noise_t2_us") noise.t2_us = parse_double(value);
  else if (key == "noise_readout_error") noise.readout_error = parse_double(value);
  else if (key == "noise_cnot_error") noise.cnot_error = parse_double(value);
  else if (key == "noise_one_qubit_error") noise.one_qubit_error = parse_double(value);
  else if (key == "noise_gate_1q_ns") noise.gate_1q_ns = parse_double(value);
  else if (key == "noise_gate_2q_ns") noise.gate_2q_ns = parse_double(value);
  else if (key == "noise_readout_ns") noise.readout_ns = parse_double(value);
  else if (key == "solver") solver = solver_from_string(value);
  else if (key == "norm_threshold") norm_threshold = parse_double(value);
  else if (key == "vqd_bound") vqd_bound = parse_double(value);
  else if (key == "vqd_lambda") vqd_lambda = value == "auto" ? std::nullopt : std::optional<double>(parse_double(value));
  else if (key == "vqd_beta") vqd_beta = value == "auto" ? std::nullopt : std::optional<double>(parse_double(value));
  else if (key == "vqd_n_states") vqd_n_states = std::stoi(value);
  else if (key == "vqd_max_iterations") vqd_max_iterations = std::stoi(value);
  else if (key == "vqd_gradient_tolerance") vqd_gradient_tolerance = parse_double(value);
  else if (key == "vqd_restarts") vqd_restarts = std::stoi(value);
  else if (key == "vqd_optimizer") {
    if (value == "linear_dfo") vqd_dfo = true;
    else if (value == "quasi_newton") vqd_dfo = false;
    else throw std::invalid_argument("vqd_optimizer must be quasi_newton|linear_dfo");
  } else if (key == "shots_list") {
    shots_list.clear();
    for (const std::string& v : detail::split_list(value)) shots_list.push_back(std::stoull(v));
  } else if (key == "n_seeds") n_seeds = std::stoi(value);
  else if (key == "theta_ref") theta_ref = parse_angle(value);
  else if (key == "out") out_dir = value;
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  ExperimentConfig cfg;
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    // JSON object with the same flat keys.
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("config: JSON root must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      const nlohmann::json& v = it.value();
      std::string s;
      if (v.is_string()) s = v.get<std::string>();
      else if (v.is_boolean()) s = v.get<bool>() ? "true" : "false";
      else if (v.is_number_integer()) s = std::to_string(v.get<long long>());
      else if (v.is_number_unsigned()) s = std::to_string(v.get<unsigned long long>());
      else if (v.is_number_float()) s = format_g17(v.get<double>());
      else if (v.is_array()) {
        std::ostringstream list;
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) list << ',';
          if (v[i].is_number_float()) list << format_g17(v[i].get<double>());
          else list << v[i].dump();
        }
        s = list.str();
      } else {
        throw std::invalid_argument("config: unsupported JSON value for key '" + it.key() + "'");
      }
      cfg.set(it.key(), s);
    }
    return cfg;
  }

  // Flat key = value lines; '#' starts a comment.
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    cfg.set(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace qgcm
