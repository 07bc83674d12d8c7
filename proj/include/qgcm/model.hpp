// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qgcm {

/// Parameters of the two-level collective model
///
///   H = epsilon * Jz + (v/2) * (J+^2 + J-^2),   v = chi * epsilon / (N - 1)
///
/// for N particles occupying a doubly degenerate pair of levels split by
/// epsilon.  chi is the dimensionless interaction strength; v is derived,
/// never stored, so the scaling relation holds by construction.  For N = 1
/// there is no pair to scatter and v is defined as zero.
struct LipkinParams {
  int n_particles = 4;
  double epsilon = 1.0;
  double chi = 1.0;

  /// Two-body matrix element v = chi * epsilon / (N - 1); zero for N = 1.
  double v() const {
    if (n_particles == 1) return 0.0;
    return chi * epsilon / static_cast<double>(n_particles - 1);
  }

  void validate() const {
    if (n_particles < 1) throw std::invalid_argument("LipkinParams: n_particles must be >= 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("LipkinParams: epsilon must be > 0");
    if (chi < 0.0) throw std::invalid_argument("LipkinParams: chi must be >= 0");
  }
};

/// Collective angular-momentum basis |J, M> with J = N/2, M = -J..J.
struct ExactBasis {
  double j = 0.0;
  std::vector<double> m_values;  // ascending, size N + 1

  int dimension() const { return static_cast<int>(m_values.size()); }
};

inline ExactBasis exact_basis(const LipkinParams& p) {
  p.validate();
  ExactBasis b;
  b.j = 0.5 * p.n_particles;
  b.m_values.resize(p.n_particles + 1);
  for (int k = 0; k <= p.n_particles; ++k) b.m_values[k] = -b.j + k;
  return b;
}

/// Dense Hamiltonian in the maximal-J multiplet.  Diagonal entries are
/// epsilon * M; the interaction couples M <-> M + 2 with matrix element
///
///   (v/2) * sqrt[(J - M)(J + M + 1)(J - M - 1)(J + M + 2)] .
inline Eigen::MatrixXd build_exact_hamiltonian(const LipkinParams& p) {
  const ExactBasis basis = exact_basis(p);
  const int dim = basis.dimension();
  const double j = basis.j;
  const double v = p.v();

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double m = basis.m_values[k];
    h(k, k) = p.epsilon * m;
    if (k + 2 < dim) {
      const double amp =
          0.5 * v * std::sqrt((j - m) * (j + m + 1.0) * (j - m - 1.0) * (j + m + 2.0));
      h(k + 2, k) = amp;
      h(k, k + 2) = amp;
    }
  }
  return h;
}

/// Eigenvalues of the exact Hamiltonian, ascending.
inline std::vector<double> exact_spectrum(const LipkinParams& p) {
  const Eigen::MatrixXd h = build_exact_hamiltonian(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("exact_spectrum: eigensolver failed");
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace qgcm
