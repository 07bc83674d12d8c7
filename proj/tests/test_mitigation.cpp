// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "qgcm/estimator.hpp"
#include "qgcm/mitigation.hpp"

using namespace qgcm;
using Catch::Matchers::WithinAbs;

namespace {

ZneSeries series(std::vector<double> x, std::vector<double> y, std::vector<double> s) {
  return ZneSeries{std::move(x), std::move(y), std::move(s)};
}

}  // namespace

TEST_CASE("series validation", "[mitigation]") {
  CHECK_THROWS_AS(series({1.0}, {0.5}, {0.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(series({1.0, 3.0}, {0.5}, {0.1, 0.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(series({1.0, 1.0}, {0.5, 0.5}, {0.1, 0.1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(series({3.0, 1.0}, {0.5, 0.5}, {0.1, 0.1}).validate(), std::invalid_argument);
  REQUIRE_NOTHROW(series({1.0, 3.0, 5.0}, {1, 2, 3}, {0, 0, 0}).validate());
}

TEST_CASE("linear extrapolation recovers an exact linear trend", "[mitigation]") {
  const double a = 0.3751, b = -0.0417;
  ZneSeries s = series({1.0, 3.0, 5.0}, {}, {0.0, 0.0, 0.0});
  for (double x : s.scale_factors) s.means.push_back(a + b * x);
  const Measurement m = zne_extrapolate(s);
  CHECK_THAT(m.mean, WithinAbs(a, 1e-14));
  CHECK(m.std == 0.0);
}

TEST_CASE("intercept weights for scales {1,3,5} are {13/12, 1/3, -5/12}", "[mitigation]") {
  const double expected[] = {13.0 / 12.0, 1.0 / 3.0, -5.0 / 12.0};
  for (int i = 0; i < 3; ++i) {
    std::vector<double> y = {0.0, 0.0, 0.0};
    y[i] = 1.0;
    const Measurement m = zne_extrapolate(series({1.0, 3.0, 5.0}, y, {0.0, 0.0, 0.0}));
    CHECK_THAT(m.mean, WithinAbs(expected[i], 1e-14));
  }
}

TEST_CASE("intercept standard error follows from the fixed weights", "[mitigation]") {
  // Equal input errors sigma: sigma_intercept = sigma * sqrt(210)/12 = 1.2076 sigma.
  const double sigma = 0.01;
  const Measurement m =
      zne_extrapolate(series({1.0, 3.0, 5.0}, {0.9, 0.7, 0.5}, {sigma, sigma, sigma}));
  CHECK_THAT(m.std, WithinAbs(sigma * std::sqrt(210.0) / 12.0, 1e-15));

  // Mixed errors propagate as sqrt(sum c_i^2 sigma_i^2).
  const std::vector<double> c = {13.0 / 12.0, 1.0 / 3.0, -5.0 / 12.0};
  const std::vector<double> sig = {0.02, 0.005, 0.013};
  double var = 0.0;
  for (int i = 0; i < 3; ++i) var += c[i] * c[i] * sig[i] * sig[i];
  const Measurement mm = zne_extrapolate(series({1.0, 3.0, 5.0}, {0.9, 0.7, 0.5}, sig));
  CHECK_THAT(mm.std, WithinAbs(std::sqrt(var), 1e-15));
}

TEST_CASE("extrapolation agrees with a dense least-squares fit", "[mitigation][oracle]") {
  const std::vector<double> x = {1.0, 3.0, 5.0, 7.0};
  const std::vector<double> y = {0.81, 0.55, 0.38, 0.21};
  Eigen::MatrixXd design(4, 2);
  Eigen::VectorXd rhs(4);
  for (int i = 0; i < 4; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[i];
    rhs(i) = y[i];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  const Measurement m = zne_extrapolate(series(x, y, {0, 0, 0, 0}));
  CHECK_THAT(m.mean, WithinAbs(coef(0), 1e-12));
}

TEST_CASE("measurement streams are deterministic and key-separated", "[mitigation]") {
  EstimatorConfig cfg;
  cfg.n_shots = 4000;
  cfg.seed = 11;

  const Measurement a =
      detail::measure_part(0.4, -0.9, Pauli::X, Part::real, cfg, kStreamData, 1, 2);
  const Measurement b =
      detail::measure_part(0.4, -0.9, Pauli::X, Part::real, cfg, kStreamData, 1, 2);
  CHECK(a.mean == b.mean);
  CHECK(a.std == b.std);

  // A different stream key draws different shots (same underlying circuit).
  const Measurement c =
      detail::measure_part(0.4, -0.9, Pauli::X, Part::real, cfg, kStreamData, 2, 1);
  const Measurement d =
      detail::measure_part(0.4, -0.9, Pauli::X, Part::real, cfg, kStreamCalibration, 1, 2);
  CHECK((c.mean != a.mean || d.mean != a.mean));
}

TEST_CASE("calibration circuits sit at unit-magnitude ideal outcomes", "[mitigation]") {
  for (const CalibrationPoint& pt : calibration_points()) {
    CHECK(pt.ideal == 1.0);
    const double measured =
        run_exact(HadamardTest{pt.theta_l, pt.theta_lp, pt.op, pt.part, 0});
    CHECK_THAT(measured, WithinAbs(1.0, 1e-14));
  }
}

TEST_CASE("noiseless calibration yields unit scales", "[mitigation]") {
  EstimatorConfig cfg;
  cfg.n_shots = kExactShots;
  const ScaleCalibration cal = calibrate_scaling(cfg);
  for (Pauli p : kAllPaulis) {
    CHECK_THAT(cal.scale_of(p), WithinAbs(1.0, 1e-14));
    CHECK_THAT(cal.measured[static_cast<int>(p)], WithinAbs(1.0, 1e-14));
  }
}

TEST_CASE("noisy calibration measures attenuation scales below one", "[mitigation]") {
  EstimatorConfig cfg;
  cfg.n_shots = kExactShots;  // exact noisy expectation values
  cfg.noise = NoiseParams{};
  cfg.zne = true;
  cfg.zne_folds = {0, 1, 2};

  const ScaleCalibration cal = calibrate_scaling(cfg);
  for (Pauli p : kAllPaulis) {
    const int idx = static_cast<int>(p);
    CHECK(cal.scale[idx] > 0.5);
    CHECK(cal.scale[idx] < 1.05);
    REQUIRE(cal.fold_scale[idx].size() == 3);
    // Per-fold attenuation worsens monotonically with the noise scale.
    CHECK(cal.fold_scale[idx][0] > cal.fold_scale[idx][1]);
    CHECK(cal.fold_scale[idx][1] > cal.fold_scale[idx][2]);
  }
}

TEST_CASE("calibration refuses a backend with no usable signal", "[mitigation]") {
  EstimatorConfig cfg;
  cfg.n_shots = kExactShots;
  NoiseParams np;
  np.readout_error = 0.5;  // outcome probability pinned to 1/2: zero signal
  cfg.noise = np;
  CHECK_THROWS_AS(calibrate_scaling(cfg), std::runtime_error);
}

TEST_CASE("scaling correction divides tables and error bars", "[mitigation]") {
  OneBodyKernels k = analytic_kernels(make_grid(3));
  for (Pauli p : kAllPaulis) {
    k.stderr_of(p, Part::real).setConstant(0.04);
    k.stderr_of(p, Part::imag).setConstant(0.02);
  }

  ScaleCalibration cal;
  cal.scale = {0.5, 1.0, 2.0, 0.8};
  const OneBodyKernels scaled = apply_scaling(k, cal);

  CHECK((scaled.table(Pauli::I) - 2.0 * k.table(Pauli::I)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((scaled.table(Pauli::X) - k.table(Pauli::X)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((scaled.table(Pauli::Y) - 0.5 * k.table(Pauli::Y)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THAT(scaled.stderr_of(Pauli::I, Part::real)(0, 1), WithinAbs(0.08, 1e-15));
  CHECK_THAT(scaled.stderr_of(Pauli::Z, Part::imag)(0, 1), WithinAbs(0.025, 1e-15));
  CHECK(scaled.mitigation == "scale");

  OneBodyKernels zk = k;
  zk.mitigation = "zne";
  CHECK(apply_scaling(zk, cal).mitigation == "zne+scale");

  ScaleCalibration bad;
  bad.scale = {1.0, 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(apply_scaling(k, bad), std::invalid_argument);
}

TEST_CASE("extrapolation shrinks the noisy kernel bias", "[mitigation]") {
  const AngleGrid grid = make_grid(3);

  EstimatorConfig raw;
  raw.n_shots = kExactShots;
  raw.noise = NoiseParams{};

  EstimatorConfig zne = raw;
  zne.zne = true;
  zne.zne_folds = {0, 1, 2};

  const OneBodyKernels k_raw = estimate_one_body(grid, raw);
  const OneBodyKernels k_zne = estimate_one_body(grid, zne);
  const OneBodyKernels k_ref = analytic_kernels(grid);

  double err_raw = 0.0, err_zne = 0.0;
  for (Pauli p : kAllPaulis) {
    err_raw += (k_raw.table(p) - k_ref.table(p)).cwiseAbs().sum();
    err_zne += (k_zne.table(p) - k_ref.table(p)).cwiseAbs().sum();
  }
  CHECK(k_raw.mitigation == "none");
  CHECK(k_zne.mitigation == "zne");
  CHECK(err_zne < 0.5 * err_raw);
}
