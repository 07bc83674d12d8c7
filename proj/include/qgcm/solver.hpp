// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgcm/kernels.hpp"
#include "qgcm/optimize.hpp"
#include "qgcm/rng.hpp"

namespace qgcm {

// ---------------------------------------------------------------------------
// Generalized eigenvalue solvers for the kernel equation
//     sum_lp [ h_{l,lp} - E n_{l,lp} ] f_lp = 0 .
// gcm_diag: norm diagonalization, threshold, projection, diagonalization.
// gcm_vqd: sequential variational optimization of the mixing coefficients
// with penalty terms enforcing normalization and deflation orthogonality.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kStreamVqd = 3;

struct DiagConfig {
  double norm_threshold = 1e-10;  // absolute cutoff on norm eigenvalues

  void validate() const {
    if (!(norm_threshold > 0.0))
      throw std::invalid_argument("DiagConfig: norm_threshold must be positive");
  }
};

struct VqdConfig {
  double bound = 2.0;                     // coefficient box [-bound, bound]
  std::optional<double> lambda_norm;      // normalization penalty; default 10 N
  std::optional<double> beta_orth;        // deflation penalty; default 10 N
  int n_states = -1;                      // -1 -> as many as the norm rank allows
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;
  int restarts = 5;
  std::uint64_t seed = 42;
  double norm_threshold = 1e-10;          // rank count threshold on norm eigenvalues
  bool use_dfo_fallback = false;          // derivative-free optimizer instead of quasi-Newton

  void validate() const {
    if (!(bound > 0.0)) throw std::invalid_argument("VqdConfig: bound must be positive");
    if (restarts < 1) throw std::invalid_argument("VqdConfig: restarts must be >= 1");
    if (max_iterations < 1) throw std::invalid_argument("VqdConfig: max_iterations must be >= 1");
    if (!(norm_threshold > 0.0))
      throw std::invalid_argument("VqdConfig: norm_threshold must be positive");
  }
};

struct StateDiagnostics {
  bool converged = true;
  int iterations = 0;
  int evaluations = 0;
  double optimality = 0.0;
  double cost = 0.0;
};

struct GcmSolution {
  std::vector<double> energies;          // ascending
  Eigen::MatrixXcd mixing;               // one column of coefficients f per state
  std::vector<double> norm_eigenvalues;  // all eigenvalues of n, ascending
  int retained_count = 0;
  std::string method;                    // "diag" or "vqd"
  std::vector<StateDiagnostics> diagnostics;  // per state, vqd only

  int n_states() const { return static_cast<int>(energies.size()); }
};

namespace detail {

inline void check_hermitian(const ManyBodyKernels& k) {
  const double scale = std::max({1.0, k.h.cwiseAbs().maxCoeff(), k.n.cwiseAbs().maxCoeff()});
  if (k.hermiticity_error() > 1e-8 * scale)
    throw std::invalid_argument("solver: kernels are not Hermitian");
}

inline std::vector<double> norm_eigenvalues_of(const Eigen::MatrixXcd& n,
                                               Eigen::MatrixXcd* vectors = nullptr) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(n);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solver: norm eigendecomposition failed");
  if (vectors) *vectors = es.eigenvectors();
  const auto& xi = es.eigenvalues();
  return std::vector<double>(xi.data(), xi.data() + xi.size());
}

}  // namespace detail

/// Hill-Wheeler solution by norm diagonalization.  Norm eigenvectors with
/// eigenvalue xi >= norm_threshold span the retained subspace; the projected
/// Hamiltonian B^dag h B with B = V diag(xi^{-1/2}) is diagonalized and the
/// mixing coefficients are pulled back as f = B w, which makes every state
/// norm-normalized (f^dag n f = 1) by construction.
inline GcmSolution gcm_diag(const ManyBodyKernels& kernels, const DiagConfig& config = {}) {
  config.validate();
  detail::check_hermitian(kernels);

  Eigen::MatrixXcd vectors;
  const std::vector<double> xi = detail::norm_eigenvalues_of(kernels.n, &vectors);
  const int dim = static_cast<int>(xi.size());

  std::vector<int> keep;
  for (int k = 0; k < dim; ++k)
    if (xi[k] >= config.norm_threshold) keep.push_back(k);
  if (keep.empty())
    throw std::runtime_error("gcm_diag: no norm eigenvalue above threshold; basis is empty");

  Eigen::MatrixXcd b(dim, keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j)
    b.col(j) = vectors.col(keep[j]) / std::sqrt(xi[keep[j]]);

  Eigen::MatrixXcd h_proj = b.adjoint() * kernels.h * b;
  h_proj = 0.5 * (h_proj + h_proj.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_proj);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gcm_diag: projected eigendecomposition failed");

  GcmSolution sol;
  sol.method = "diag";
  sol.norm_eigenvalues = xi;
  sol.retained_count = static_cast<int>(keep.size());
  sol.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + keep.size());
  sol.mixing = b * es.eigenvectors();
  return sol;
}

/// Variational quantum deflation on the kernel matrices.  State K minimizes
///   C_K(f) = f^T h f + lambda (f^T n f - 1)^2 + sum_{j<K} beta (f_j^T n f)^2
/// over real coefficients in the box [-bound, bound]^L, with multi-start
/// optimization; lambda and beta default to 10 N.  Each accepted state is
/// renormalized to f^T n f = 1, so the reported energy is its Rayleigh
/// quotient.  States are stored even when their optimization fails to
/// converge; the per-state diagnostics carry the failure flag.
inline GcmSolution gcm_vqd(const ManyBodyKernels& kernels, const VqdConfig& config = {}) {
  config.validate();
  detail::check_hermitian(kernels);

  const int dim = kernels.size();
  // Real representation: for real f and Hermitian h, f^T h f = f^T Re(h) f.
  const Eigen::MatrixXd h = kernels.h.real();
  const Eigen::MatrixXd n = kernels.n.real();

  const std::vector<double> xi = detail::norm_eigenvalues_of(kernels.n);
  int rank = 0;
  for (double x : xi)
    if (x >= config.norm_threshold) ++rank;
  if (rank == 0) throw std::runtime_error("gcm_vqd: norm matrix has numerical rank zero");

  const int n_states = config.n_states < 0 ? rank : config.n_states;
  if (n_states > rank)
    throw std::invalid_argument("gcm_vqd: n_states exceeds the numerical rank of the norm");

  const double n_particles = static_cast<double>(kernels.params.n_particles);
  const double lambda = config.lambda_norm.value_or(10.0 * n_particles);
  const double beta = config.beta_orth.value_or(10.0 * n_particles);

  OptimOptions opt;
  opt.lower = -config.bound;
  opt.upper = config.bound;
  opt.max_iterations = config.max_iterations;
  opt.gradient_tolerance = config.gradient_tolerance;

  GcmSolution sol;
  sol.method = "vqd";
  sol.norm_eigenvalues = xi;
  sol.retained_count = n_states;
  sol.mixing = Eigen::MatrixXcd::Zero(dim, n_states);

  std::vector<Eigen::VectorXd> deflation;  // n f_j of accepted states
  for (int state = 0; state < n_states; ++state) {
    const auto cost = [&](const Eigen::VectorXd& f) {
      const double nf = f.dot(n * f);
      double c = f.dot(h * f) + lambda * (nf - 1.0) * (nf - 1.0);
      for (const Eigen::VectorXd& nd : deflation) {
        const double overlap = nd.dot(f);
        c += beta * overlap * overlap;
      }
      return c;
    };

    std::optional<OptimResult> best;
    for (int restart = 0; restart < config.restarts; ++restart) {
      auto rng = keyed_engine({config.seed, kStreamVqd, static_cast<std::uint64_t>(state),
                               static_cast<std::uint64_t>(restart)});
      std::uniform_real_distribution<double> u(-0.5, 0.5);
      Eigen::VectorXd x0(dim);
      for (int i = 0; i < dim; ++i) x0(i) = u(rng);

      const OptimResult r = config.use_dfo_fallback ? minimize_linear_dfo(cost, x0, opt)
                                                    : minimize_quasi_newton(cost, x0, opt);
      const bool better = !best || (r.converged && !best->converged) ||
                          (r.converged == best->converged && r.value < best->value);
      if (better) best = r;
    }

    Eigen::VectorXd f = best->x;
    const double nf = f.dot(n * f);
    if (!(nf > 1e-12))
      throw std::runtime_error("gcm_vqd: optimized state has vanishing norm overlap");
    f /= std::sqrt(nf);

    sol.energies.push_back(f.dot(h * f));
    sol.mixing.col(state) = f.cast<std::complex<double>>();
    sol.diagnostics.push_back({best->converged, best->iterations, best->evaluations,
                               best->optimality, best->value});
    deflation.push_back(n * f);
  }

  // Report states in ascending energy order.
  std::vector<int> order(sol.energies.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return sol.energies[a] < sol.energies[b]; });
  GcmSolution sorted = sol;
  for (std::size_t j = 0; j < order.size(); ++j) {
    sorted.energies[j] = sol.energies[order[j]];
    sorted.mixing.col(j) = sol.mixing.col(order[j]);
    sorted.diagnostics[j] = sol.diagnostics[order[j]];
  }
  return sorted;
}

// --- spectrum scoring -----------------------------------------------------------

/// RMS deviation of the lowest K states, relative to the exact ground-state
/// magnitude:  F_K = sqrt(sum_{a<K} (approx_a - exact_a)^2) / (|exact_0| K).
inline double f_k_metric(const std::vector<double>& approx, const std::vector<double>& exact,
                         int k) {
  if (k < 1) throw std::invalid_argument("f_k_metric: K must be >= 1");
  if (static_cast<int>(approx.size()) < k || static_cast<int>(exact.size()) < k)
    throw std::invalid_argument("f_k_metric: need at least K energies in both spectra");
  if (std::abs(exact[0]) < 1e-300)
    throw std::invalid_argument("f_k_metric: exact ground-state energy must be nonzero");
  double ss = 0.0;
  for (int a = 0; a < k; ++a) ss += (approx[a] - exact[a]) * (approx[a] - exact[a]);
  return std::sqrt(ss) / (std::abs(exact[0]) * static_cast<double>(k));
}

struct SpectrumReport {
  std::map<int, double> f_k;
  std::vector<double> per_state_errors;
  double e_gs = 0.0;
};

inline SpectrumReport score_spectrum(const std::vector<double>& approx,
                                     const std::vector<double>& exact,
                                     const std::vector<int>& ks) {
  SpectrumReport rep;
  if (exact.empty()) throw std::invalid_argument("score_spectrum: empty exact spectrum");
  rep.e_gs = exact[0];
  const std::size_t n = std::min(approx.size(), exact.size());
  rep.per_state_errors.resize(n);
  for (std::size_t a = 0; a < n; ++a) rep.per_state_errors[a] = std::abs(approx[a] - exact[a]);
  for (int k : ks) rep.f_k[k] = f_k_metric(approx, exact, k);
  return rep;
}

}  // namespace qgcm
