// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgcm/kernels.hpp"
#include "qgcm/qsim.hpp"
#include "qgcm/rng.hpp"

namespace qgcm {

// ---------------------------------------------------------------------------
// Error mitigation: zero-noise extrapolation over unitary-folded circuits and
// a multiplicative per-operator scaling correction from calibration circuits
// with known ideal outcomes.
// ---------------------------------------------------------------------------

// Stream-key purpose tags separating data circuits from calibration circuits.
inline constexpr std::uint64_t kStreamData = 1;
inline constexpr std::uint64_t kStreamCalibration = 2;

/// Measurements of one observable at several noise-scale factors (2k+1 for
/// fold count k), ready for extrapolation to scale 0.
struct ZneSeries {
  std::vector<double> scale_factors;
  std::vector<double> means;
  std::vector<double> stderrs;

  void validate() const {
    if (scale_factors.size() < 2)
      throw std::invalid_argument("ZneSeries: need at least two scale factors");
    if (means.size() != scale_factors.size() || stderrs.size() != scale_factors.size())
      throw std::invalid_argument("ZneSeries: inconsistent series lengths");
    for (std::size_t i = 1; i < scale_factors.size(); ++i)
      if (scale_factors[i] <= scale_factors[i - 1])
        throw std::invalid_argument("ZneSeries: scale factors must be strictly increasing");
  }
};

struct Measurement {
  double mean = 0.0;
  double std = 0.0;
};

/// Ordinary-least-squares linear fit evaluated at scale 0.  The intercept is
/// a fixed linear combination sum_i c_i y_i of the measurements, so its
/// standard error follows by propagation: sqrt(sum_i c_i^2 sigma_i^2).
inline Measurement zne_extrapolate(const ZneSeries& series) {
  series.validate();
  const std::size_t n = series.scale_factors.size();
  double x_bar = 0.0;
  for (double x : series.scale_factors) x_bar += x;
  x_bar /= static_cast<double>(n);
  double sxx = 0.0;
  for (double x : series.scale_factors) sxx += (x - x_bar) * (x - x_bar);
  if (!(sxx > 0.0)) throw std::invalid_argument("zne_extrapolate: degenerate scale factors");

  Measurement out;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c =
        1.0 / static_cast<double>(n) + x_bar * (x_bar - series.scale_factors[i]) / sxx;
    out.mean += c * series.means[i];
    var += c * c * series.stderrs[i] * series.stderrs[i];
  }
  out.std = std::sqrt(var);
  return out;
}

namespace detail {

/// Measure one circuit part under `config`, folding and extrapolating when
/// ZNE is active.  `per_fold` (optional output) receives the raw per-fold
/// measurements.  Stream keys: (seed, purpose, l, lp, pauli, part, fold).
inline Measurement measure_part(double theta_l, double theta_lp, Pauli pauli, Part part,
                                const EstimatorConfig& config, std::uint64_t purpose,
                                std::uint64_t key_l, std::uint64_t key_lp,
                                std::vector<Measurement>* per_fold = nullptr) {
  const std::vector<int> folds = config.zne ? config.zne_folds : std::vector<int>{0};
  ZneSeries series;
  for (int k : folds) {
    HadamardTest circuit{theta_l, theta_lp, pauli, part, k};
    auto rng = keyed_engine({config.seed, purpose, key_l, key_lp,
                             static_cast<std::uint64_t>(pauli),
                             static_cast<std::uint64_t>(part),
                             static_cast<std::uint64_t>(k)});
    const ShotStats s = run_shots(circuit, config, rng);
    series.scale_factors.push_back(circuit.noise_scale());
    series.means.push_back(s.mean);
    series.stderrs.push_back(s.std);
    if (per_fold) per_fold->push_back({s.mean, s.std});
  }
  if (!config.zne) return {series.means[0], series.stderrs[0]};
  return zne_extrapolate(series);
}

}  // namespace detail

// --- calibration scaling ---------------------------------------------------------

/// A calibration circuit with a known ideal outcome of magnitude 1.
struct CalibrationPoint {
  Pauli op = Pauli::I;
  double theta_l = 0.0;
  double theta_lp = 0.0;
  Part part = Part::real;
  double ideal = 1.0;
};

/// Per-operator multiplicative scales s_P estimated from calibration circuits.
struct ScaleCalibration {
  std::array<double, 4> scale = {1.0, 1.0, 1.0, 1.0};        // s_P, indexed by Pauli
  std::array<double, 4> measured = {1.0, 1.0, 1.0, 1.0};     // headline measured values
  std::array<std::vector<double>, 4> fold_scale;              // s_P per fold (order of zne_folds)
  std::array<CalibrationPoint, 4> points;

  double scale_of(Pauli p) const { return scale[static_cast<int>(p)]; }
};

inline std::array<CalibrationPoint, 4> calibration_points() {
  const double q = std::numbers::pi / 2.0;
  return {CalibrationPoint{Pauli::I, 0.0, 0.0, Part::real, 1.0},
          CalibrationPoint{Pauli::X, q, q, Part::real, 1.0},
          CalibrationPoint{Pauli::Y, q, -q, Part::imag, 1.0},
          CalibrationPoint{Pauli::Z, 0.0, 0.0, Part::real, 1.0}};
}

/// Run the four calibration circuits under the estimator settings (including
/// ZNE when active) and derive the scales.  Calibration circuits receive
/// `calibration_shot_factor` times the data shot budget.  A measured
/// magnitude below 0.1 or a scale outside (0, 2] indicates a backend too
/// noisy to calibrate and raises an error.
inline ScaleCalibration calibrate_scaling(const EstimatorConfig& config) {
  config.validate();
  EstimatorConfig cal_config = config;
  if (config.n_shots != kExactShots) cal_config.n_shots *= config.calibration_shot_factor;

  ScaleCalibration cal;
  cal.points = calibration_points();
  for (const CalibrationPoint& pt : cal.points) {
    const int idx = static_cast<int>(pt.op);
    std::vector<Measurement> per_fold;
    const Measurement m = detail::measure_part(pt.theta_l, pt.theta_lp, pt.op, pt.part,
                                               cal_config, kStreamCalibration, 0, 0, &per_fold);
    if (std::abs(m.mean) < 0.1)
      throw std::runtime_error(std::string("calibrate_scaling: calibration signal for '") +
                               to_string(pt.op) + "' too small to trust (|" +
                               std::to_string(m.mean) + "| < 0.1)");
    const double s = m.mean / pt.ideal;
    if (s <= 0.0 || s > 2.0)
      throw std::runtime_error(std::string("calibrate_scaling: scale for '") + to_string(pt.op) +
                               "' outside (0, 2]");
    cal.measured[idx] = m.mean;
    cal.scale[idx] = s;
    cal.fold_scale[idx].reserve(per_fold.size());
    for (const Measurement& f : per_fold) cal.fold_scale[idx].push_back(f.mean / pt.ideal);
  }
  return cal;
}

/// Divide kernel tables and their standard errors by the per-operator scales.
inline OneBodyKernels apply_scaling(const OneBodyKernels& kernels, const ScaleCalibration& cal) {
  OneBodyKernels out = kernels;
  for (Pauli p : kAllPaulis) {
    const double s = cal.scale_of(p);
    if (!(s > 0.0)) throw std::invalid_argument("apply_scaling: scales must be positive");
    out.table(p) /= s;
    out.stderr_of(p, Part::real) /= s;
    out.stderr_of(p, Part::imag) /= s;
  }
  if (out.mitigation == "none")
    out.mitigation = "scale";
  else if (out.mitigation == "zne")
    out.mitigation = "zne+scale";
  return out;
}

}  // namespace qgcm
