// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <optional>

#include "qgcm/kernels.hpp"
#include "qgcm/mitigation.hpp"
#include "qgcm/qsim.hpp"

namespace qgcm {

namespace detail {

/// The closed-form kernel of operator P is purely real for I, X, Z and purely
/// imaginary for Y.  With assume_real set, only the structurally nonzero part
/// of each kernel is measured; the other part is fixed to zero.
inline bool part_is_structural(Pauli p, Part part) {
  return p == Pauli::Y ? part == Part::imag : part == Part::real;
}

}  // namespace detail

/// Estimate the four kernel tables on the grid under the given estimator
/// settings.  Noiseless infinite-shot requests return the closed forms
/// directly.  Otherwise every (l <= lp, operator, part) entry is measured on
/// its own deterministic RNG stream, extrapolated over folds when ZNE is
/// active, and optionally divided by calibrated per-operator scales.
inline OneBodyKernels estimate_one_body(const AngleGrid& grid, const EstimatorConfig& config) {
  config.validate();
  if (grid.size() < 2) throw std::invalid_argument("estimate_one_body: need at least 2 angles");

  if (!config.noise && config.n_shots == kExactShots) return analytic_kernels(grid);

  std::optional<ScaleCalibration> cal;
  if (config.scaling_correction) cal = calibrate_scaling(config);

  OneBodyKernels out;
  out.grid = grid;
  out.allocate();
  const int l_count = grid.size();
  const std::complex<double> i1(0.0, 1.0);

  for (Pauli p : kAllPaulis) {
    for (int l = 0; l < l_count; ++l) {
      for (int lp = l; lp < l_count; ++lp) {
        std::complex<double> value(0.0, 0.0);
        for (Part part : {Part::real, Part::imag}) {
          // Diagonal kernels <phi_l|P|phi_l> are expectation values of a
          // Hermitian operator, hence exactly real; measuring their imaginary
          // part would only inject noise that breaks table Hermiticity.
          if (part == Part::imag && l == lp) continue;
          if (config.assume_real && !detail::part_is_structural(p, part)) continue;

          std::vector<Measurement> per_fold;
          Measurement m = detail::measure_part(
              grid.thetas[l], grid.thetas[lp], p, part, config, kStreamData,
              static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(lp),
              (cal && config.scale_before_zne) ? &per_fold : nullptr);

          if (cal && config.scale_before_zne) {
            // Alternative order: rescale each fold by its own calibration
            // scale, then extrapolate the corrected series.
            const std::vector<double>& fs = cal->fold_scale[static_cast<int>(p)];
            ZneSeries corrected;
            const std::vector<int> folds = config.zne ? config.zne_folds : std::vector<int>{0};
            for (std::size_t j = 0; j < per_fold.size(); ++j) {
              corrected.scale_factors.push_back(2.0 * folds[j] + 1.0);
              corrected.means.push_back(per_fold[j].mean / fs[j]);
              corrected.stderrs.push_back(per_fold[j].std / std::abs(fs[j]));
            }
            m = config.zne ? zne_extrapolate(corrected)
                           : Measurement{corrected.means[0], corrected.stderrs[0]};
          }

          value += (part == Part::real ? std::complex<double>(m.mean) : i1 * m.mean);
          out.stderr_of(p, part)(l, lp) = m.std;
          out.stderr_of(p, part)(lp, l) = m.std;
        }
        out.table(p)(l, lp) = value;
        out.table(p)(lp, l) = std::conj(value);
      }
    }
  }

  if (cal && !config.scale_before_zne) out = apply_scaling(out, *cal);

  out.provenance = config.noise ? KernelProvenance::noisy : KernelProvenance::shots;
  out.n_shots = config.n_shots;
  out.mitigation = config.zne ? (config.scaling_correction ? "zne+scale" : "zne")
                              : (config.scaling_correction ? "scale" : "none");
  return out;
}

}  // namespace qgcm
