// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent reference implementations used only by the test suite.  They
// deliberately avoid the code paths of the library: rotations come from a
// dense matrix exponential, model spectra from the full 2^N spin space, and
// kernel overlaps from explicit product-state vectors.  Agreement between the
// library and these oracles therefore checks conventions (signs, orderings,
// normalizations), not just arithmetic.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qgcm/kernels.hpp"
#include "qgcm/qsim.hpp"

namespace oracle {

using cd = std::complex<double>;

/// exp(-i theta Y / 2) evaluated with Eigen's dense matrix exponential.
inline Eigen::Matrix2cd ry_exp(double theta) {
  const cd i1(0.0, 1.0);
  Eigen::Matrix2cd y;
  y << 0.0, -i1, i1, 0.0;
  return (-0.5 * i1 * theta * y).exp();
}

/// <0| u(theta_l)^dag P u(theta_lp) |0> from matrix exponentials.
inline cd kernel(double theta_l, double theta_lp, qgcm::Pauli p) {
  const Eigen::Matrix2cd m =
      ry_exp(theta_l).adjoint() * qgcm::pauli_matrix(p) * ry_exp(theta_lp);
  return m(0, 0);
}

/// Full 2^N-dimensional two-level pairing Hamiltonian
///   H = eps * Jz + (v/2) (J+^2 + J-^2),  v = chi * eps / (N - 1)
/// with one spin per qubit and bit value 0 meaning "up" (Jz contribution
/// +1/2).  The pair interaction flips every pair of equal bits.
inline Eigen::MatrixXd full_hamiltonian(int n_spins, double eps, double chi) {
  if (n_spins < 1) throw std::invalid_argument("full_hamiltonian: need at least one spin");
  const std::size_t dim = std::size_t{1} << n_spins;
  const double v = n_spins == 1 ? 0.0 : chi * eps / static_cast<double>(n_spins - 1);

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t s = 0; s < dim; ++s) {
    const int ones = std::popcount(s);
    h(s, s) = 0.5 * eps * static_cast<double>(n_spins - 2 * ones);
    // (v/2) sum_{a != b} (sigma+_a sigma+_b + sigma-_a sigma-_b): each
    // unordered pair of equal bits flips with amplitude v (2 ordered terms).
    for (int a = 0; a < n_spins; ++a)
      for (int b = a + 1; b < n_spins; ++b) {
        const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
        const bool bit_a = (s >> a) & 1u, bit_b = (s >> b) & 1u;
        if (bit_a == bit_b) h(s ^ mask, s) += v;
      }
  }
  return h;
}

/// Columns are the symmetric (maximal-J) basis states ordered by ascending
/// M = (N - 2k)/2, i.e. by descending number k of set bits, matching the
/// ascending-M convention of the collective basis.
inline Eigen::MatrixXd dicke_basis(int n_spins) {
  const std::size_t dim = std::size_t{1} << n_spins;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim, n_spins + 1);
  std::vector<std::size_t> count(n_spins + 1, 0);
  for (std::size_t s = 0; s < dim; ++s) ++count[std::popcount(s)];
  for (std::size_t s = 0; s < dim; ++s) {
    const int k = std::popcount(s);
    const int col = n_spins - k;  // M = -J + col
    d(s, col) = 1.0 / std::sqrt(static_cast<double>(count[k]));
  }
  return d;
}

/// Ascending spectrum of the full Hamiltonian restricted to the symmetric
/// sector, plus the residual || H D - D (D^T H D) ||_max which certifies that
/// the sector is an invariant subspace (it must vanish to rounding).
struct ProjectedSpectrum {
  std::vector<double> energies;
  double invariance_residual = 0.0;
};

inline ProjectedSpectrum projected_spectrum(int n_spins, double eps, double chi) {
  const Eigen::MatrixXd h = full_hamiltonian(n_spins, eps, chi);
  const Eigen::MatrixXd d = dicke_basis(n_spins);
  const Eigen::MatrixXd h_sym = d.transpose() * h * d;

  ProjectedSpectrum out;
  out.invariance_residual = (h * d - d * h_sym).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h_sym);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("projected_spectrum: eigensolver failed");
  out.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

/// N-fold product trial state u(theta)|0>^{(x) N} in the full 2^N space.
/// The amplitude of a bitstring depends only on its popcount.
inline Eigen::VectorXd product_state(double theta, int n_spins) {
  const std::size_t dim = std::size_t{1} << n_spins;
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  Eigen::VectorXd psi(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    const int k = std::popcount(b);
    double amp = 1.0;
    for (int j = 0; j < n_spins; ++j) amp *= (j < k ? s : c);
    psi(b) = amp;
  }
  return psi;
}

/// Hamiltonian / norm kernels between product trial states, computed in the
/// full space:  n = <psi_l | psi_lp>,  h = <psi_l | H | psi_lp>.
struct FullSpaceKernels {
  Eigen::MatrixXd h;
  Eigen::MatrixXd n;
};

inline FullSpaceKernels full_space_kernels(int n_spins, double eps, double chi,
                                           const std::vector<double>& thetas) {
  const Eigen::MatrixXd ham = full_hamiltonian(n_spins, eps, chi);
  const int l_count = static_cast<int>(thetas.size());
  std::vector<Eigen::VectorXd> psi(l_count);
  for (int l = 0; l < l_count; ++l) psi[l] = product_state(thetas[l], n_spins);

  FullSpaceKernels out;
  out.h.resize(l_count, l_count);
  out.n.resize(l_count, l_count);
  for (int l = 0; l < l_count; ++l)
    for (int lp = 0; lp < l_count; ++lp) {
      out.n(l, lp) = psi[l].dot(psi[lp]);
      out.h(l, lp) = psi[l].dot(ham * psi[lp]);
    }
  return out;
}

/// Generalized eigenvalues of (h, n) for positive-definite n, ascending.
inline std::vector<double> generalized_eigenvalues(const Eigen::MatrixXcd& h,
                                                   const Eigen::MatrixXcd& n) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, n);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("generalized_eigenvalues: solver failed");
  return std::vector<double>(es.eigenvalues().data(),
                             es.eigenvalues().data() + es.eigenvalues().size());
}

}  // namespace oracle
