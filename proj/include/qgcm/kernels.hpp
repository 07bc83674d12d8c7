// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgcm/model.hpp"
#include "qgcm/qsim.hpp"

namespace qgcm {

// ---------------------------------------------------------------------------
// One-qubit overlap kernels on a symmetric angle grid, and their lift to
// many-body Hamiltonian / norm kernels of the collective model.
// ---------------------------------------------------------------------------

/// Symmetric generator grid theta_l = -pi(1-delta) + l * dtheta with
/// delta = 1/L, dtheta = 2 pi (1-delta)/(L-1).  The second half mirrors the
/// first exactly (theta_{L-1-l} = -theta_l bitwise), so parity symmetry holds
/// without floating-point slack.
struct AngleGrid {
  std::vector<double> thetas;

  int size() const { return static_cast<int>(thetas.size()); }

  bool is_symmetric(double tol = 1e-12) const {
    const int l_count = size();
    for (int l = 0; l < l_count; ++l)
      if (std::abs(thetas[l] + thetas[l_count - 1 - l]) > tol) return false;
    return true;
  }
};

inline AngleGrid make_grid(int l_count) {
  if (l_count < 2) throw std::invalid_argument("make_grid: need at least 2 grid points");
  const double delta = 1.0 / static_cast<double>(l_count);
  const double span = std::numbers::pi * (1.0 - delta);
  const double dtheta = 2.0 * span / static_cast<double>(l_count - 1);

  AngleGrid g;
  g.thetas.resize(l_count);
  for (int l = 0; l < l_count / 2; ++l) {
    g.thetas[l] = -span + l * dtheta;
    g.thetas[l_count - 1 - l] = -g.thetas[l];
  }
  if (l_count % 2 == 1) g.thetas[l_count / 2] = 0.0;
  return g;
}

/// Closed-form one-qubit kernels between trial states u(theta)|0>:
///   i = cos((tl - tlp)/2)   x = sin((tl + tlp)/2)
///   z = cos((tl + tlp)/2)   y = i sin((tl - tlp)/2)
struct KernelQuad {
  std::complex<double> i, x, y, z;

  std::complex<double> get(Pauli p) const {
    switch (p) {
      case Pauli::I: return i;
      case Pauli::X: return x;
      case Pauli::Y: return y;
      case Pauli::Z: return z;
    }
    throw std::invalid_argument("KernelQuad::get: bad enum value");
  }
};

inline KernelQuad analytic_one_body(double theta_l, double theta_lp) {
  const double diff = 0.5 * (theta_l - theta_lp);
  const double sum = 0.5 * (theta_l + theta_lp);
  KernelQuad q;
  q.i = std::cos(diff);
  q.z = std::cos(sum);
  q.x = std::sin(sum);
  q.y = std::complex<double>(0.0, std::sin(diff));
  return q;
}

enum class KernelProvenance { exact, shots, noisy };

inline const char* to_string(KernelProvenance p) {
  switch (p) {
    case KernelProvenance::exact: return "exact";
    case KernelProvenance::shots: return "shots";
    case KernelProvenance::noisy: return "noisy";
  }
  throw std::invalid_argument("to_string(KernelProvenance): bad enum value");
}

inline KernelProvenance provenance_from_string(const std::string& s) {
  if (s == "exact") return KernelProvenance::exact;
  if (s == "shots") return KernelProvenance::shots;
  if (s == "noisy") return KernelProvenance::noisy;
  throw std::invalid_argument("provenance_from_string: unknown provenance '" + s + "'");
}

/// Estimated kernel tables p_{l,lp} for P in {I, X, Y, Z}, with per-part
/// standard errors.  Tables are Hermitian-symmetric by construction: only the
/// upper triangle is measured, the lower is mirrored by conjugation.
struct OneBodyKernels {
  AngleGrid grid;
  std::array<Eigen::MatrixXcd, 4> tables;      // indexed by static_cast<int>(Pauli)
  std::array<Eigen::MatrixXd, 4> stderr_real;  // standard error of Re
  std::array<Eigen::MatrixXd, 4> stderr_imag;  // standard error of Im
  KernelProvenance provenance = KernelProvenance::exact;
  std::string mitigation = "none";  // none | zne | scale | zne+scale
  std::uint64_t n_shots = kExactShots;

  const Eigen::MatrixXcd& table(Pauli p) const { return tables[static_cast<int>(p)]; }
  Eigen::MatrixXcd& table(Pauli p) { return tables[static_cast<int>(p)]; }

  const Eigen::MatrixXd& stderr_of(Pauli p, Part part) const {
    return part == Part::real ? stderr_real[static_cast<int>(p)]
                              : stderr_imag[static_cast<int>(p)];
  }
  Eigen::MatrixXd& stderr_of(Pauli p, Part part) {
    return part == Part::real ? stderr_real[static_cast<int>(p)]
                              : stderr_imag[static_cast<int>(p)];
  }

  void allocate() {
    const int l_count = grid.size();
    for (int k = 0; k < 4; ++k) {
      tables[k] = Eigen::MatrixXcd::Zero(l_count, l_count);
      stderr_real[k] = Eigen::MatrixXd::Zero(l_count, l_count);
      stderr_imag[k] = Eigen::MatrixXd::Zero(l_count, l_count);
    }
  }

  void validate() const {
    const int l_count = grid.size();
    if (l_count < 2) throw std::invalid_argument("OneBodyKernels: empty grid");
    for (int k = 0; k < 4; ++k) {
      if (tables[k].rows() != l_count || tables[k].cols() != l_count ||
          stderr_real[k].rows() != l_count || stderr_imag[k].rows() != l_count)
        throw std::invalid_argument("OneBodyKernels: table shape does not match grid");
      const double herm = (tables[k] - tables[k].adjoint()).cwiseAbs().maxCoeff();
      if (herm > 1e-12)
        throw std::invalid_argument("OneBodyKernels: table is not Hermitian-symmetric");
    }
  }
};

/// Exact (closed-form) kernels on a grid; zero standard errors.
inline OneBodyKernels analytic_kernels(const AngleGrid& grid) {
  OneBodyKernels k;
  k.grid = grid;
  k.allocate();
  const int l_count = grid.size();
  for (int l = 0; l < l_count; ++l)
    for (int lp = l; lp < l_count; ++lp) {
      const KernelQuad q = analytic_one_body(grid.thetas[l], grid.thetas[lp]);
      for (Pauli p : kAllPaulis) {
        k.table(p)(l, lp) = q.get(p);
        k.table(p)(lp, l) = std::conj(q.get(p));
      }
    }
  k.provenance = KernelProvenance::exact;
  return k;
}

// --- many-body assembly ------------------------------------------------------

/// Hamiltonian and norm kernels between N-fold product trial states.
struct ManyBodyKernels {
  Eigen::MatrixXcd h;
  Eigen::MatrixXcd n;
  LipkinParams params;
  AngleGrid grid;
  bool parity_basis = false;

  int size() const { return static_cast<int>(n.rows()); }

  double hermiticity_error() const {
    return std::max((h - h.adjoint()).cwiseAbs().maxCoeff(),
                    (n - n.adjoint()).cwiseAbs().maxCoeff());
  }
};

/// Integer power with the convention 0^0 = 1 (exponent counts factors).
inline std::complex<double> pow_int(std::complex<double> base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("pow_int: negative exponent");
  std::complex<double> out(1.0, 0.0);
  for (int k = 0; k < exponent; ++k) out *= base;
  return out;
}

/// Lift one-qubit kernels to N-particle Hamiltonian/norm kernels:
///   n_{l,lp} = i^N
///   h_{l,lp} = (eps N / 2) i^{N-2} [ i z + (chi/2)(x^2 - y^2) ]     (N >= 2)
///   h_{l,lp} = (eps / 2) z,  n = i                                  (N == 1)
inline ManyBodyKernels assemble_many_body(const OneBodyKernels& kernels,
                                          const LipkinParams& params) {
  params.validate();
  kernels.validate();
  const int l_count = kernels.grid.size();
  const int n_particles = params.n_particles;

  ManyBodyKernels out;
  out.params = params;
  out.grid = kernels.grid;
  out.h = Eigen::MatrixXcd::Zero(l_count, l_count);
  out.n = Eigen::MatrixXcd::Zero(l_count, l_count);

  for (int l = 0; l < l_count; ++l)
    for (int lp = 0; lp < l_count; ++lp) {
      const std::complex<double> i = kernels.table(Pauli::I)(l, lp);
      const std::complex<double> x = kernels.table(Pauli::X)(l, lp);
      const std::complex<double> y = kernels.table(Pauli::Y)(l, lp);
      const std::complex<double> z = kernels.table(Pauli::Z)(l, lp);
      if (n_particles == 1) {
        out.h(l, lp) = 0.5 * params.epsilon * z;
        out.n(l, lp) = i;
      } else {
        out.n(l, lp) = pow_int(i, n_particles);
        out.h(l, lp) = 0.5 * params.epsilon * n_particles * pow_int(i, n_particles - 2) *
                       (i * z + 0.5 * params.chi * (x * x - y * y));
      }
    }

  // Defensive Hermitization; exact up to rounding for mirrored input tables.
  out.h = 0.5 * (out.h + out.h.adjoint()).eval();
  out.n = 0.5 * (out.n + out.n.adjoint()).eval();
  return out;
}

// --- parity-adapted basis ------------------------------------------------------

/// Combination matrix T mapping the grid basis to parity-adapted states
/// |+-_l> = (|phi_l> +- |phi_{L-1-l}>)/sqrt(2).  Columns: all plus combinations
/// (pair index ascending), then all minus combinations.  For odd L the middle
/// point theta = 0 contributes sqrt(2)|phi_m> as a plus state and an exactly
/// null minus column, so T has L+1 columns (it is square only for even L).
inline Eigen::MatrixXd parity_matrix(const AngleGrid& grid) {
  if (!grid.is_symmetric())
    throw std::invalid_argument("parity_matrix: grid is not symmetric under theta -> -theta");
  const int l_count = grid.size();
  const int pairs = l_count / 2;
  const bool odd = (l_count % 2 == 1);
  const int cols = odd ? l_count + 1 : l_count;
  const int plus_count = pairs + (odd ? 1 : 0);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(l_count, cols);
  for (int p = 0; p < pairs; ++p) {
    const int l = p, lbar = l_count - 1 - p;
    t(l, p) = inv_sqrt2;
    t(lbar, p) = inv_sqrt2;
    t(l, plus_count + p) = inv_sqrt2;
    t(lbar, plus_count + p) = -inv_sqrt2;
  }
  if (odd) {
    t(pairs, pairs) = std::numbers::sqrt2;  // middle plus column
    // middle minus column (index cols - 1) stays exactly zero
  }
  return t;
}

/// Congruence transform of both kernels into the parity-adapted basis.
inline ManyBodyKernels parity_transform(const ManyBodyKernels& kernels) {
  if (kernels.parity_basis)
    throw std::invalid_argument("parity_transform: kernels already in parity basis");
  if (kernels.size() != kernels.grid.size())
    throw std::invalid_argument("parity_transform: kernel size does not match grid");
  const Eigen::MatrixXd t = parity_matrix(kernels.grid);

  ManyBodyKernels out;
  out.params = kernels.params;
  out.grid = kernels.grid;
  out.parity_basis = true;
  out.h = t.transpose() * kernels.h * t;
  out.n = t.transpose() * kernels.n * t;
  return out;
}

}  // namespace qgcm
