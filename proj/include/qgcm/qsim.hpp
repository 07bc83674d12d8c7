// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgcm {

// ---------------------------------------------------------------------------
// Two-qubit circuit simulator for the overlap-estimation (Hadamard-test)
// circuits.  Qubit layout: one ancilla and one work qubit; computational
// basis index = 2 * ancilla_bit + work_bit.  Two execution engines are
// provided: a noiseless statevector and a density matrix with gate-attached
// noise channels (depolarizing + thermal relaxation + readout bit flip).
// ---------------------------------------------------------------------------

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

enum class Pauli { I = 0, X = 1, Y = 2, Z = 3 };
enum class Part { real = 0, imag = 1 };
enum class Qubit { work = 0, ancilla = 1 };

inline constexpr std::array<Pauli, 4> kAllPaulis = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};

inline const char* to_string(Pauli p) {
  switch (p) {
    case Pauli::I: return "i";
    case Pauli::X: return "x";
    case Pauli::Y: return "y";
    case Pauli::Z: return "z";
  }
  throw std::invalid_argument("to_string(Pauli): bad enum value");
}

inline const char* to_string(Part p) { return p == Part::real ? "re" : "im"; }

inline Pauli pauli_from_string(const std::string& s) {
  if (s == "i" || s == "I") return Pauli::I;
  if (s == "x" || s == "X") return Pauli::X;
  if (s == "y" || s == "Y") return Pauli::Y;
  if (s == "z" || s == "Z") return Pauli::Z;
  throw std::invalid_argument("pauli_from_string: unknown operator '" + s + "'");
}

inline Part part_from_string(const std::string& s) {
  if (s == "re") return Part::real;
  if (s == "im") return Part::imag;
  throw std::invalid_argument("part_from_string: unknown part '" + s + "'");
}

// --- elementary gates -------------------------------------------------------

inline Mat2 pauli_matrix(Pauli p) {
  const std::complex<double> i1(0.0, 1.0);
  Mat2 m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -i1, i1, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

/// exp(-i theta Y / 2): the generating rotation of the trial states.
inline Mat2 ry_gate(double theta) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  Mat2 m;
  m << c, -s, s, c;
  return m;
}

/// Trial state u(theta)|0> = (cos(theta/2), sin(theta/2)).
inline Eigen::Vector2cd ry_state(double theta) {
  Eigen::Vector2cd v;
  v << std::cos(0.5 * theta), std::sin(0.5 * theta);
  return v;
}

inline Mat2 hadamard_gate() {
  const double s = 1.0 / std::numbers::sqrt2;
  Mat2 m;
  m << s, s, s, -s;
  return m;
}

inline Mat2 rz_gate(double lambda) {
  const std::complex<double> i1(0.0, 1.0);
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::exp(-i1 * (0.5 * lambda));
  m(1, 1) = std::exp(i1 * (0.5 * lambda));
  return m;
}

inline Mat4 kron2(const Mat2& a, const Mat2& b) {
  Mat4 k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

inline Mat4 lift(const Mat2& g, Qubit q) {
  return q == Qubit::ancilla ? kron2(g, Mat2::Identity()) : kron2(Mat2::Identity(), g);
}

/// Ancilla-controlled application of a work-qubit block.
inline Mat4 controlled_gate(const Mat2& b) {
  Mat4 c = Mat4::Identity();
  c.block<2, 2>(2, 2) = b;
  return c;
}

// --- noise model -------------------------------------------------------------

/// Device noise parameters.  Times T1/T2 are in microseconds, gate durations
/// in nanoseconds.  Defaults correspond to the reference superconducting
/// backend calibration used throughout ("lagos" preset).
struct NoiseParams {
  double t1_us = 84.23;
  double t2_us = 28.45;
  double readout_error = 1.44e-2;  // symmetric bit-flip probability
  double cnot_error = 8.79e-3;     // two-qubit depolarizing probability per CNOT
  double one_qubit_error = 3e-4;   // one-qubit depolarizing probability per gate
  double gate_1q_ns = 35.0;
  double gate_2q_ns = 300.0;
  double readout_ns = 700.0;  // reserved; readout is modeled as a pure bit flip

  void validate() const {
    if (!(t1_us > 0.0) || !(t2_us > 0.0))
      throw std::invalid_argument("NoiseParams: T1 and T2 must be positive");
    if (t2_us > 2.0 * t1_us + 1e-12)
      throw std::invalid_argument("NoiseParams: T2 <= 2*T1 is required for a physical channel");
    for (double p : {readout_error, cnot_error, one_qubit_error})
      if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("NoiseParams: error probabilities must lie in [0, 1]");
    for (double t : {gate_1q_ns, gate_2q_ns, readout_ns})
      if (t < 0.0) throw std::invalid_argument("NoiseParams: gate durations must be >= 0");
  }
};

/// Sentinel shot count requesting the infinite-shot expectation value.
inline constexpr std::uint64_t kExactShots = 0;

/// How kernel entries are estimated: shot budget, noise, and mitigation.
struct EstimatorConfig {
  std::uint64_t n_shots = 10000;  // kExactShots -> exact expectation values
  std::uint64_t seed = 42;
  std::optional<NoiseParams> noise;  // disengaged -> noiseless engine

  bool zne = false;                     // zero-noise extrapolation over folded circuits
  std::vector<int> zne_folds = {0, 1, 2};
  bool scaling_correction = false;      // divide by calibrated per-operator scale
  bool scale_before_zne = false;        // alternative order: rescale each fold, then extrapolate
  std::uint64_t calibration_shot_factor = 10;  // extra shots for calibration circuits

  bool assume_real = false;  // skip circuits whose ideal outcome is identically zero

  void validate() const {
    if (noise) noise->validate();
    if (zne) {
      if (zne_folds.size() < 2)
        throw std::invalid_argument("EstimatorConfig: ZNE needs at least two fold counts");
      bool has_zero = false;
      for (std::size_t i = 0; i < zne_folds.size(); ++i) {
        if (zne_folds[i] < 0)
          throw std::invalid_argument("EstimatorConfig: fold counts must be >= 0");
        if (zne_folds[i] == 0) has_zero = true;
        if (i > 0 && zne_folds[i] <= zne_folds[i - 1])
          throw std::invalid_argument("EstimatorConfig: fold counts must be strictly increasing");
      }
      if (!has_zero)
        throw std::invalid_argument("EstimatorConfig: fold list must contain 0 (identity fold)");
    }
    if (calibration_shot_factor < 1)
      throw std::invalid_argument("EstimatorConfig: calibration_shot_factor must be >= 1");
  }
};

// --- circuit description ------------------------------------------------------

/// One Hadamard-test circuit measuring Re or Im of <0| u(theta_l)^dag P u(theta_lp) |0>.
/// `folds` counts local unitary foldings of the controlled block: the block is
/// applied (2k+1) times as B, (B^dag B)^k, which is the identity transformation
/// noiselessly but multiplies the attached noise by the scale factor (2k+1).
struct HadamardTest {
  double theta_l = 0.0;
  double theta_lp = 0.0;
  Pauli pauli = Pauli::I;
  Part part = Part::real;
  int folds = 0;

  /// Fused controlled block: the ordered product u(theta_l)^dag * P * u(theta_lp).
  Mat2 block() const {
    return ry_gate(theta_l).adjoint() * pauli_matrix(pauli) * ry_gate(theta_lp);
  }
  int block_applications() const { return 2 * folds + 1; }
  int cnot_equivalents() const { return 3 * block_applications(); }
  double noise_scale() const { return static_cast<double>(block_applications()); }

  void validate() const {
    if (folds < 0) throw std::invalid_argument("HadamardTest: folds must be >= 0");
  }
};

inline HadamardTest fold_circuit(HadamardTest c, int k) {
  if (k < 0) throw std::invalid_argument("fold_circuit: fold count must be >= 0");
  c.folds = k;
  return c;
}

// --- statevector engine -------------------------------------------------------

class StateVector {
 public:
  StateVector() : amp_(Vec4::Zero()) { amp_(0) = 1.0; }

  void apply(const Mat2& g, Qubit q) { amp_ = lift(g, q) * amp_; }
  void apply_controlled(const Mat2& b) { amp_ = controlled_gate(b) * amp_; }

  double prob_ancilla0() const { return std::norm(amp_(0)) + std::norm(amp_(1)); }
  double norm_error() const { return std::abs(amp_.squaredNorm() - 1.0); }
  const Vec4& amplitudes() const { return amp_; }

 private:
  Vec4 amp_;
};

// --- density-matrix engine ------------------------------------------------------

class DensityMatrix {
 public:
  DensityMatrix() : rho_(Mat4::Zero()) { rho_(0, 0) = 1.0; }

  void apply(const Mat2& g, Qubit q) {
    const Mat4 u = lift(g, q);
    rho_ = u * rho_ * u.adjoint();
  }

  void apply_controlled(const Mat2& b) {
    const Mat4 c = controlled_gate(b);
    rho_ = c * rho_ * c.adjoint();
  }

  /// rho -> (1-p) rho + p I/4.
  void depolarize_two_qubit(double p) {
    rho_ = (1.0 - p) * rho_ + (p * rho_.trace() / 4.0) * Mat4::Identity();
  }

  /// rho -> (1-p) rho + p (I_q / 2) (x) tr_q(rho): replace qubit q by the
  /// maximally mixed state with probability p.
  void depolarize_one_qubit(double p, Qubit q) {
    Mat2 sub;
    if (q == Qubit::ancilla) {
      sub = rho_.block<2, 2>(0, 0) + rho_.block<2, 2>(2, 2);
      rho_ = (1.0 - p) * rho_ + p * kron2(0.5 * Mat2::Identity(), sub);
    } else {
      sub << rho_(0, 0) + rho_(1, 1), rho_(0, 2) + rho_(1, 3),
             rho_(2, 0) + rho_(3, 1), rho_(2, 2) + rho_(3, 3);
      rho_ = (1.0 - p) * rho_ + p * kron2(sub, 0.5 * Mat2::Identity());
    }
  }

  /// Amplitude damping composed with pure dephasing on qubit q for a duration
  /// given in nanoseconds (T1/T2 are in microseconds).
  void thermal_relaxation(Qubit q, double duration_ns, const NoiseParams& np) {
    const double t_us = duration_ns * 1e-3;
    const double gamma = 1.0 - std::exp(-t_us / np.t1_us);
    const double d_extra = std::exp(-t_us * (1.0 / np.t2_us - 0.5 / np.t1_us));
    const double p_phi = 0.5 * (1.0 - d_extra);

    Mat2 a0, a1;
    a0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    a1 << 0, std::sqrt(gamma), 0, 0;
    const Mat2 d0 = std::sqrt(1.0 - p_phi) * Mat2::Identity();
    const Mat2 d1 = std::sqrt(p_phi) * pauli_matrix(Pauli::Z);

    Mat4 out = Mat4::Zero();
    for (const Mat2& a : {a0, a1})
      for (const Mat2& d : {d0, d1}) {
        const Mat4 k = lift(d * a, q);
        out += k * rho_ * k.adjoint();
      }
    rho_ = out;
  }

  double prob_ancilla0() const { return std::real(rho_(0, 0) + rho_(1, 1)); }
  double trace_error() const { return std::abs(rho_.trace() - 1.0); }
  double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho_ + rho_.adjoint()));
    return es.eigenvalues().minCoeff();
  }
  const Mat4& rho() const { return rho_; }

 private:
  Mat4 rho_;
};

// --- circuit execution -----------------------------------------------------------

namespace detail {

/// Shared gate schedule of the Hadamard test.  `gate1` receives every
/// one-qubit gate, `block` every application of the controlled fused block.
template <typename Gate1, typename Block>
void schedule_hadamard_test(const HadamardTest& c, Gate1&& gate1, Block&& block) {
  c.validate();
  gate1(hadamard_gate(), Qubit::ancilla);
  if (c.part == Part::imag) gate1(rz_gate(-std::numbers::pi / 2.0), Qubit::ancilla);
  const Mat2 b = c.block();
  block(b);
  for (int k = 0; k < c.folds; ++k) {
    block(b.adjoint().eval());
    block(b);
  }
  gate1(hadamard_gate(), Qubit::ancilla);
}

}  // namespace detail

/// Noiseless expectation p0 - p1 of the ancilla measurement; equals
/// Re or Im of <0| u(theta_l)^dag P u(theta_lp) |0>.
inline double run_exact(const HadamardTest& c) {
  StateVector psi;
  detail::schedule_hadamard_test(
      c, [&](const Mat2& g, Qubit q) { psi.apply(g, q); },
      [&](const Mat2& b) { psi.apply_controlled(b); });
  if (psi.norm_error() > 1e-12) throw std::runtime_error("run_exact: state norm drifted");
  return 2.0 * psi.prob_ancilla0() - 1.0;
}

/// Ancilla p0 under the gate-attached noise model, including readout flip.
inline double noisy_prob0(const HadamardTest& c, const NoiseParams& np) {
  np.validate();
  DensityMatrix rho;
  detail::schedule_hadamard_test(
      c,
      [&](const Mat2& g, Qubit q) {
        rho.apply(g, q);
        rho.depolarize_one_qubit(np.one_qubit_error, q);
        rho.thermal_relaxation(q, np.gate_1q_ns, np);
      },
      [&](const Mat2& b) {
        rho.apply_controlled(b);
        for (int rep = 0; rep < 3; ++rep) {  // one controlled block ~ 3 CNOT equivalents
          rho.depolarize_two_qubit(np.cnot_error);
          rho.thermal_relaxation(Qubit::ancilla, np.gate_2q_ns, np);
          rho.thermal_relaxation(Qubit::work, np.gate_2q_ns, np);
        }
      });
  if (rho.trace_error() > 1e-9) throw std::runtime_error("noisy_prob0: trace not preserved");
  if (rho.min_eigenvalue() < -1e-8)
    throw std::runtime_error("noisy_prob0: density matrix lost positivity");
  double p0 = rho.prob_ancilla0();
  p0 = (1.0 - np.readout_error) * p0 + np.readout_error * (1.0 - p0);
  return p0;
}

/// Outcome statistics of repeated single-shot measurements (+1 for ancilla 0,
/// -1 for ancilla 1).
struct ShotStats {
  double mean = 0.0;    // sample mean of the +-1 outcomes
  double std = 0.0;     // standard error of the mean
  std::uint64_t n_shots = 0;
  double p0 = 0.0;      // underlying outcome probability used for sampling
};

/// Sample the circuit with the engine selected by `config` (noiseless or
/// noisy).  n_shots == kExactShots returns the exact expectation with zero
/// standard error.  The caller owns the RNG stream; see rng.hpp for the keyed
/// derivation used by the estimators.
inline ShotStats run_shots(const HadamardTest& c, const EstimatorConfig& config,
                           std::mt19937_64& rng) {
  config.validate();
  double p0 = config.noise ? noisy_prob0(c, *config.noise) : 0.5 * (run_exact(c) + 1.0);
  p0 = std::min(1.0, std::max(0.0, p0));

  ShotStats s;
  s.p0 = p0;
  s.n_shots = config.n_shots;
  if (config.n_shots == kExactShots) {
    s.mean = 2.0 * p0 - 1.0;
    s.std = 0.0;
    return s;
  }
  std::binomial_distribution<std::uint64_t> dist(config.n_shots, p0);
  const std::uint64_t n0 = dist(rng);
  const double n = static_cast<double>(config.n_shots);
  s.mean = (2.0 * static_cast<double>(n0) - n) / n;
  s.std = std::sqrt(std::max(0.0, 1.0 - s.mean * s.mean) / n);
  return s;
}

}  // namespace qgcm
