// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qgcm {

// ---------------------------------------------------------------------------
// Box-constrained minimization used by the variational solver.  Primary
// method: limited-memory quasi-Newton (two-loop recursion) with gradient
// projection onto the box and Armijo backtracking, gradients by central
// finite differences.  Fallback: a derivative-free method that fits a linear
// model through recent sample points and steps against its gradient.
// ---------------------------------------------------------------------------

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimOptions {
  double lower = -2.0;
  double upper = 2.0;
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;
  double fd_step = 1e-7;  // central-difference step, scaled by max(1, |x_i|)
  int history = 8;        // quasi-Newton memory
  int max_line_search = 50;

  void validate() const {
    if (!(upper > lower)) throw std::invalid_argument("OptimOptions: upper must exceed lower");
    if (max_iterations < 1) throw std::invalid_argument("OptimOptions: max_iterations must be >= 1");
    if (!(gradient_tolerance > 0.0) || !(fd_step > 0.0))
      throw std::invalid_argument("OptimOptions: tolerances must be positive");
    if (history < 1) throw std::invalid_argument("OptimOptions: history must be >= 1");
  }
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double optimality = 0.0;  // inf-norm of the projected gradient step
  bool converged = false;
};

namespace detail {

inline Eigen::VectorXd clip_to_box(Eigen::VectorXd x, const OptimOptions& opt) {
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = std::clamp(x(i), opt.lower, opt.upper);
  return x;
}

inline Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x,
                                        const OptimOptions& opt, int& evaluations) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = opt.fd_step * std::max(1.0, std::abs(x(i)));
    const double xi = x(i);
    xp(i) = xi + h;
    const double fp = f(xp);
    xp(i) = xi - h;
    const double fm = f(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
    evaluations += 2;
  }
  return g;
}

inline double projected_step_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                  const OptimOptions& opt) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double moved = std::clamp(x(i) - g(i), opt.lower, opt.upper) - x(i);
    norm = std::max(norm, std::abs(moved));
  }
  return norm;
}

}  // namespace detail

/// Projected limited-memory quasi-Newton minimization over the box
/// [lower, upper]^n.  Converges when the projected gradient step falls below
/// gradient_tolerance (inf-norm).
inline OptimResult minimize_quasi_newton(const Objective& f, Eigen::VectorXd x0,
                                         const OptimOptions& opt = {}) {
  opt.validate();
  if (x0.size() == 0) throw std::invalid_argument("minimize_quasi_newton: empty start point");

  OptimResult res;
  Eigen::VectorXd x = detail::clip_to_box(std::move(x0), opt);
  double fx = f(x);
  res.evaluations = 1;
  Eigen::VectorXd g = detail::central_gradient(f, x, opt, res.evaluations);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    res.iterations = iter;
    res.optimality = detail::projected_step_norm(x, g, opt);
    if (res.optimality <= opt.gradient_tolerance) {
      res.converged = true;
      break;
    }

    // Two-loop recursion applied to -g, yielding d = -H g by linearity.
    Eigen::VectorXd d = -g;
    if (!s_hist.empty()) {
      const std::size_t m = s_hist.size();
      std::vector<double> alpha(m);
      for (std::size_t j = m; j-- > 0;) {
        alpha[j] = rho_hist[j] * s_hist[j].dot(d);
        d -= alpha[j] * y_hist[j];
      }
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      d *= gamma;
      for (std::size_t j = 0; j < m; ++j) {
        const double beta = rho_hist[j] * y_hist[j].dot(d);
        d += (alpha[j] - beta) * s_hist[j];
      }
    }

    if (d.dot(g) >= 0.0) d = -g;  // not a descent direction: reset to steepest descent

    // Backtracking line search on the projected path.
    bool accepted = false;
    double alpha = 1.0;
    Eigen::VectorXd x_new;
    double f_new = fx;
    for (int ls = 0; ls < opt.max_line_search; ++ls) {
      x_new = detail::clip_to_box(x + alpha * d, opt);
      f_new = f(x_new);
      ++res.evaluations;
      const double decrease = g.dot(x_new - x);
      if (f_new <= fx + 1e-4 * decrease && x_new != x) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Retry once along steepest descent before giving up.
      alpha = 1.0 / std::max(1.0, g.norm());
      bool rescue = false;
      for (int ls = 0; ls < opt.max_line_search; ++ls) {
        x_new = detail::clip_to_box(x - alpha * g, opt);
        f_new = f(x_new);
        ++res.evaluations;
        if (f_new < fx && x_new != x) {
          rescue = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!rescue) break;  // stationary within line-search resolution
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    Eigen::VectorXd g_new = detail::central_gradient(f, x_new, opt, res.evaluations);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = std::move(x_new);
    fx = f_new;
    g = std::move(g_new);
  }

  res.optimality = detail::projected_step_norm(x, g, opt);
  if (res.optimality <= opt.gradient_tolerance) res.converged = true;
  res.x = std::move(x);
  res.value = fx;
  return res;
}

/// Derivative-free fallback: least-squares affine model over the most recent
/// n+1 sample points, step against the model gradient with an adaptive trust
/// radius.  Linear convergence, but requires only function values.
inline OptimResult minimize_linear_dfo(const Objective& f, Eigen::VectorXd x0,
                                       const OptimOptions& opt = {}) {
  opt.validate();
  const Eigen::Index n = x0.size();
  if (n == 0) throw std::invalid_argument("minimize_linear_dfo: empty start point");

  OptimResult res;
  Eigen::VectorXd best = detail::clip_to_box(std::move(x0), opt);
  double f_best = f(best);
  res.evaluations = 1;

  std::deque<std::pair<Eigen::VectorXd, double>> pts;
  double radius = 0.1 * (opt.upper - opt.lower);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd xi = best;
    xi(i) = std::clamp(xi(i) + radius, opt.lower, opt.upper);
    if (xi == best) xi(i) = std::clamp(best(i) - radius, opt.lower, opt.upper);
    pts.emplace_back(xi, f(xi));
    ++res.evaluations;
  }
  pts.emplace_back(best, f_best);

  const double min_radius = 1e-7 * (opt.upper - opt.lower);
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    res.iterations = iter;
    if (radius < min_radius) {
      res.converged = true;
      break;
    }

    // Affine fit f ~ c + g . (x - best) over the working set.
    Eigen::MatrixXd a(pts.size(), n + 1);
    Eigen::VectorXd b(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
      a(j, 0) = 1.0;
      a.row(j).tail(n) = (pts[j].first - best).transpose();
      b(j) = pts[j].second;
    }
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
    const Eigen::VectorXd g = coef.tail(n);
    res.optimality = detail::projected_step_norm(best, g, opt);
    if (g.norm() <= opt.gradient_tolerance && radius < 1e-4) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd trial = best;
    if (g.norm() > 0.0) trial = detail::clip_to_box(best - (radius / g.norm()) * g, opt);
    const double f_trial = f(trial);
    ++res.evaluations;
    pts.emplace_back(trial, f_trial);
    while (pts.size() > static_cast<std::size_t>(2 * n + 2)) pts.pop_front();

    if (f_trial < f_best - 1e-14) {
      best = trial;
      f_best = f_trial;
      radius = std::min(radius * 1.2, 0.25 * (opt.upper - opt.lower));
    } else {
      radius *= 0.5;
    }
  }

  res.x = best;
  res.value = f_best;
  return res;
}

}  // namespace qgcm
