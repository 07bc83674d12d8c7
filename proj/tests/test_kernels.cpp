// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "qgcm/estimator.hpp"
#include "qgcm/kernels.hpp"
#include "qgcm/solver.hpp"

using namespace qgcm;
using Catch::Matchers::WithinAbs;

TEST_CASE("generator grid hits the documented node positions", "[kernels]") {
  const AngleGrid g = make_grid(5);
  REQUIRE(g.size() == 5);
  CHECK_THAT(g.thetas[0], WithinAbs(-0.8 * std::numbers::pi, 1e-15));
  CHECK_THAT(g.thetas[1], WithinAbs(-0.4 * std::numbers::pi, 1e-15));
  CHECK(g.thetas[2] == 0.0);
  CHECK_THAT(g.thetas[3], WithinAbs(0.4 * std::numbers::pi, 1e-15));
  CHECK_THAT(g.thetas[4], WithinAbs(0.8 * std::numbers::pi, 1e-15));

  const AngleGrid g4 = make_grid(4);
  CHECK_THAT(g4.thetas[0], WithinAbs(-0.75 * std::numbers::pi, 1e-15));
  CHECK_THAT(g4.thetas[1], WithinAbs(-0.25 * std::numbers::pi, 1e-15));

  CHECK_THROWS_AS(make_grid(1), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0), std::invalid_argument);
}

TEST_CASE("grid mirror symmetry holds bitwise, not just within tolerance", "[kernels]") {
  for (int l_count : {2, 3, 5, 8, 13, 21}) {
    const AngleGrid g = make_grid(l_count);
    for (int l = 0; l < l_count; ++l) CHECK(g.thetas[l] == -g.thetas[l_count - 1 - l]);
    if (l_count % 2 == 1) CHECK(g.thetas[l_count / 2] == 0.0);
    CHECK(g.is_symmetric(0.0));

    AngleGrid skewed = g;
    skewed.thetas[0] += 1e-9;
    CHECK_FALSE(skewed.is_symmetric());
  }
}

TEST_CASE("closed-form kernels match the matrix-exponential oracle", "[kernels][oracle]") {
  const double angles[] = {-2.9, -1.3, -0.2, 0.0, 0.6, 1.1, 2.8};
  for (double tl : angles)
    for (double tlp : angles) {
      const KernelQuad q = analytic_one_body(tl, tlp);
      for (Pauli p : kAllPaulis)
        CHECK(std::abs(q.get(p) - oracle::kernel(tl, tlp, p)) < 1e-14);
    }
}

TEST_CASE("kernel quad satisfies the trigonometric sum rules", "[kernels]") {
  for (double tl : {-2.2, 0.1, 1.7})
    for (double tlp : {-0.9, 0.4, 2.6}) {
      const KernelQuad q = analytic_one_body(tl, tlp);
      CHECK_THAT(std::norm(q.i) + std::norm(q.y), WithinAbs(1.0, 1e-14));
      CHECK_THAT(std::norm(q.z) + std::norm(q.x), WithinAbs(1.0, 1e-14));
      CHECK(q.i.imag() == 0.0);
      CHECK(q.y.real() == 0.0);
    }
}

TEST_CASE("analytic kernel tables are Hermitian with unit diagonal identity", "[kernels]") {
  const OneBodyKernels k = analytic_kernels(make_grid(7));
  REQUIRE_NOTHROW(k.validate());
  CHECK(k.provenance == KernelProvenance::exact);
  CHECK(k.n_shots == kExactShots);
  for (Pauli p : kAllPaulis) {
    CHECK((k.table(p) - k.table(p).adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(k.stderr_of(p, Part::real).cwiseAbs().maxCoeff() == 0.0);
    CHECK(k.stderr_of(p, Part::imag).cwiseAbs().maxCoeff() == 0.0);
  }
  for (int l = 0; l < k.grid.size(); ++l)
    CHECK(std::abs(k.table(Pauli::I)(l, l) - 1.0) < 1e-15);
}

TEST_CASE("kernel container validation rejects broken tables", "[kernels]") {
  OneBodyKernels k = analytic_kernels(make_grid(4));

  OneBodyKernels tampered = k;
  tampered.table(Pauli::X)(0, 1) += std::complex<double>(0.0, 1e-6);
  CHECK_THROWS_AS(tampered.validate(), std::invalid_argument);

  OneBodyKernels misshapen = k;
  misshapen.tables[0] = Eigen::MatrixXcd::Identity(3, 3);
  CHECK_THROWS_AS(misshapen.validate(), std::invalid_argument);
}

TEST_CASE("integer power uses the exponent-counts-factors convention", "[kernels]") {
  CHECK(pow_int({0.0, 0.0}, 0) == std::complex<double>(1.0, 0.0));
  CHECK(pow_int({2.0, 0.0}, 10).real() == 1024.0);
  const std::complex<double> b(0.3, -0.8);
  CHECK(std::abs(pow_int(b, 7) - std::pow(b, 7)) < 1e-14);
  CHECK_THROWS_AS(pow_int(b, -1), std::invalid_argument);
}

TEST_CASE("single-particle assembly reduces to the bare kernels", "[kernels]") {
  const AngleGrid grid = make_grid(5);
  const OneBodyKernels k = analytic_kernels(grid);
  const ManyBodyKernels mb = assemble_many_body(k, LipkinParams{1, 1.7, 0.9});
  CHECK((mb.n - k.table(Pauli::I)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((mb.h - 0.5 * 1.7 * k.table(Pauli::Z)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("many-body kernels equal full-space product-state matrix elements",
          "[kernels][oracle]") {
  const int n = GENERATE(1, 2, 3, 6);
  const double chi = GENERATE(0.5, 1.0, 2.0);
  const double eps = 1.3;

  const AngleGrid grid = make_grid(5);
  const OneBodyKernels k = analytic_kernels(grid);
  const ManyBodyKernels mb = assemble_many_body(k, LipkinParams{n, eps, chi});
  const oracle::FullSpaceKernels ref = oracle::full_space_kernels(n, eps, chi, grid.thetas);

  CHECK((mb.n - ref.n.cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((mb.h - ref.h.cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("assembled kernels are Hermitian with unit-diagonal positive norm", "[kernels]") {
  const ManyBodyKernels mb =
      assemble_many_body(analytic_kernels(make_grid(9)), LipkinParams{8, 1.0, 1.4});
  CHECK(mb.hermiticity_error() < 1e-13);
  for (int l = 0; l < mb.size(); ++l)
    CHECK(std::abs(mb.n(l, l) - 1.0) < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mb.n);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("parity combination matrix has the documented block structure", "[kernels]") {
  const Eigen::MatrixXd t5 = parity_matrix(make_grid(5));
  REQUIRE(t5.rows() == 5);
  REQUIRE(t5.cols() == 6);
  const double s = 1.0 / std::numbers::sqrt2;
  CHECK(t5(0, 0) == s);
  CHECK(t5(4, 0) == s);
  CHECK(t5(2, 2) == std::numbers::sqrt2);  // middle point appears only as a plus state
  CHECK(t5(0, 3) == s);
  CHECK(t5(4, 3) == -s);
  CHECK(t5.col(5).cwiseAbs().maxCoeff() == 0.0);  // exactly null minus column

  const Eigen::MatrixXd t4 = parity_matrix(make_grid(4));
  REQUIRE(t4.rows() == 4);
  REQUIRE(t4.cols() == 4);
  CHECK((t4.transpose() * t4 - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);

  AngleGrid skewed = make_grid(5);
  skewed.thetas[1] += 1e-6;
  CHECK_THROWS_AS(parity_matrix(skewed), std::invalid_argument);
}

TEST_CASE("parity transform decouples the parity blocks and keeps the spectrum",
          "[kernels]") {
  const ManyBodyKernels mb =
      assemble_many_body(analytic_kernels(make_grid(5)), LipkinParams{4, 1.0, 1.0});
  const ManyBodyKernels pt = parity_transform(mb);
  REQUIRE(pt.parity_basis);
  REQUIRE(pt.size() == 6);

  // Null minus column of the middle grid point propagates exactly.
  CHECK(pt.h.col(5).cwiseAbs().maxCoeff() == 0.0);
  CHECK(pt.n.row(5).cwiseAbs().maxCoeff() == 0.0);

  // Plus (columns 0-2) and minus (columns 3-5) sectors do not mix.
  CHECK(pt.h.block(0, 3, 3, 3).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(pt.n.block(0, 3, 3, 3).cwiseAbs().maxCoeff() < 1e-10);

  const GcmSolution before = gcm_diag(mb);
  const GcmSolution after = gcm_diag(pt);
  REQUIRE(before.n_states() == after.n_states());
  for (int a = 0; a < before.n_states(); ++a)
    CHECK_THAT(after.energies[a], WithinAbs(before.energies[a], 1e-10));

  CHECK_THROWS_AS(parity_transform(pt), std::invalid_argument);
}

TEST_CASE("sampled tables stay within five standard errors of the closed forms", "[kernels]") {
  const AngleGrid grid = make_grid(4);
  const OneBodyKernels ref = analytic_kernels(grid);
  int total = 0, within = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EstimatorConfig est;
    est.n_shots = 100;
    est.seed = seed;
    const OneBodyKernels k = estimate_one_body(grid, est);
    for (Pauli p : kAllPaulis)
      for (int l = 0; l < grid.size(); ++l)
        for (int lp = l; lp < grid.size(); ++lp)
          for (Part part : {Part::real, Part::imag}) {
            if (part == Part::imag && l == lp) continue;  // pinned to zero, never sampled
            const double got =
                part == Part::real ? k.table(p)(l, lp).real() : k.table(p)(l, lp).imag();
            const double want =
                part == Part::real ? ref.table(p)(l, lp).real() : ref.table(p)(l, lp).imag();
            ++total;
            if (std::abs(got - want) <= 5.0 * k.stderr_of(p, part)(l, lp) + 1e-12) ++within;
          }
  }
  // 100-shot estimates: a handful of saturated entries (sample mean exactly
  // +-1, zero estimated error) may fall outside, so demand 99% coverage.
  CHECK(total == 20 * 4 * (10 * 2 - 4));
  CHECK(within * 100 >= total * 99);
}
