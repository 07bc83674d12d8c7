// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qgcm/model.hpp"

using namespace qgcm;

TEST_CASE("parameter validation rejects unphysical inputs", "[model]") {
  REQUIRE_THROWS_AS((LipkinParams{0, 1.0, 1.0}.validate()), std::invalid_argument);
  REQUIRE_THROWS_AS((LipkinParams{-3, 1.0, 1.0}.validate()), std::invalid_argument);
  REQUIRE_THROWS_AS((LipkinParams{4, 0.0, 1.0}.validate()), std::invalid_argument);
  REQUIRE_THROWS_AS((LipkinParams{4, -1.0, 1.0}.validate()), std::invalid_argument);
  REQUIRE_THROWS_AS((LipkinParams{4, 1.0, -0.5}.validate()), std::invalid_argument);
  REQUIRE_NOTHROW((LipkinParams{1, 2.0, 0.0}.validate()));
}

TEST_CASE("two-body matrix element follows the 1/(N-1) scaling", "[model]") {
  CHECK((LipkinParams{1, 1.0, 5.0}.v()) == 0.0);  // single particle: no pair to scatter
  CHECK((LipkinParams{2, 1.0, 1.0}.v()) == 1.0);
  CHECK((LipkinParams{5, 1.0, 2.0}.v()) == Catch::Approx(0.5));
  CHECK((LipkinParams{11, 3.0, 2.0}.v()) == Catch::Approx(0.6));
}

TEST_CASE("collective basis spans M = -N/2 .. N/2 ascending", "[model]") {
  const ExactBasis b = exact_basis(LipkinParams{5, 1.0, 1.0});
  REQUIRE(b.dimension() == 6);
  CHECK(b.j == 2.5);
  CHECK(b.m_values.front() == -2.5);
  CHECK(b.m_values.back() == 2.5);
  for (int k = 1; k < b.dimension(); ++k) CHECK(b.m_values[k] - b.m_values[k - 1] == 1.0);
}

TEST_CASE("N = 2 Hamiltonian matches its closed form", "[model]") {
  const double eps = 1.3, chi = 0.7;
  const LipkinParams p{2, eps, chi};
  const double v = p.v();  // equals chi * eps for N = 2
  REQUIRE(v == Catch::Approx(chi * eps));

  const Eigen::MatrixXd h = build_exact_hamiltonian(p);
  REQUIRE(h.rows() == 3);
  // Basis M = -1, 0, +1: diagonal eps*M, corner coupling v between M = -1, +1.
  CHECK_THAT(h(0, 0), Catch::Matchers::WithinAbs(-eps, 1e-15));
  CHECK_THAT(h(1, 1), Catch::Matchers::WithinAbs(0.0, 1e-15));
  CHECK_THAT(h(2, 2), Catch::Matchers::WithinAbs(eps, 1e-15));
  CHECK_THAT(h(0, 2), Catch::Matchers::WithinAbs(v, 1e-15));
  CHECK_THAT(h(2, 0), Catch::Matchers::WithinAbs(v, 1e-15));
  CHECK_THAT(h(0, 1), Catch::Matchers::WithinAbs(0.0, 1e-15));
  CHECK_THAT(h(1, 2), Catch::Matchers::WithinAbs(0.0, 1e-15));

  const double root = std::sqrt(eps * eps + v * v);
  const std::vector<double> spectrum = exact_spectrum(p);
  REQUIRE(spectrum.size() == 3);
  CHECK_THAT(spectrum[0], Catch::Matchers::WithinAbs(-root, 1e-12));
  CHECK_THAT(spectrum[1], Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(spectrum[2], Catch::Matchers::WithinAbs(root, 1e-12));
}

TEST_CASE("collective spectrum equals the symmetric sector of the full spin space",
          "[model][oracle]") {
  const int n = GENERATE(1, 2, 3, 4, 8);
  const double chi = GENERATE(0.0, 0.2, 1.0, 2.0);
  const double eps = GENERATE(1.0, 1.3);

  const LipkinParams p{n, eps, chi};
  const std::vector<double> spectrum = exact_spectrum(p);
  const oracle::ProjectedSpectrum ref = oracle::projected_spectrum(n, eps, chi);

  // The symmetric sector must be invariant under the full Hamiltonian,
  // otherwise the projection would not be a faithful restriction.
  REQUIRE(ref.invariance_residual < 1e-12);

  REQUIRE(spectrum.size() == ref.energies.size());
  for (std::size_t a = 0; a < spectrum.size(); ++a)
    CHECK_THAT(spectrum[a], Catch::Matchers::WithinAbs(ref.energies[a], 1e-9));
}

TEST_CASE("spectrum is symmetric under E -> -E", "[model]") {
  // diag(i^k) conjugation plus basis reversal maps H to -H, so eigenvalues
  // come in +-E pairs for every particle number and coupling.
  const int n = GENERATE(2, 3, 4, 7, 10);
  const double chi = GENERATE(0.3, 1.0, 1.7);
  const std::vector<double> spectrum = exact_spectrum(LipkinParams{n, 1.0, chi});
  const std::size_t dim = spectrum.size();
  for (std::size_t a = 0; a < dim; ++a)
    CHECK_THAT(spectrum[a], Catch::Matchers::WithinAbs(-spectrum[dim - 1 - a], 1e-10));
}

TEST_CASE("spectrum is ascending and has dimension N + 1", "[model]") {
  for (int n : {1, 2, 5, 12}) {
    const std::vector<double> spectrum = exact_spectrum(LipkinParams{n, 1.0, 1.5});
    REQUIRE(static_cast<int>(spectrum.size()) == n + 1);
    for (std::size_t a = 1; a < spectrum.size(); ++a) CHECK(spectrum[a] >= spectrum[a - 1]);
  }
}
