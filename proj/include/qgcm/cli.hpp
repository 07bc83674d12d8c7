// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qgcm/config.hpp"
#include "qgcm/estimator.hpp"
#include "qgcm/io.hpp"
#include "qgcm/kernels.hpp"
#include "qgcm/mitigation.hpp"
#include "qgcm/model.hpp"
#include "qgcm/solver.hpp"
#include "qgcm/version.hpp"

namespace qgcm {

// Stream-key purpose tag for reference-column measurements (theta_lp fixed
// off-grid), distinct from table data and calibration.
inline constexpr std::uint64_t kStreamRef = 4;

namespace cli_detail {

inline std::vector<std::string> echo_lines(const ExperimentConfig& cfg,
                                           const std::string& command) {
  std::vector<std::string> lines;
  lines.push_back("command = " + command);
  for (const std::string& l : cfg.echo()) lines.push_back(l);
  return lines;
}

inline std::string csv_with_header(const std::vector<std::string>& echo,
                                   const std::string& column_header,
                                   const std::vector<std::string>& rows) {
  std::ostringstream out;
  out << "# tool = qgcm v" << kVersion << "\n";
  for (const std::string& l : echo) out << "# " << l << "\n";
  out << column_header << "\n";
  for (const std::string& r : rows) out << r << "\n";
  return out.str();
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline std::vector<double> resolve_chis(const ExperimentConfig& cfg) {
  return cfg.use_chi_sweep ? cfg.chi_sweep : std::vector<double>{cfg.chi};
}

inline std::vector<std::string> resolve_methods(const ExperimentConfig& cfg) {
  switch (cfg.solver) {
    case SolverKind::diag: return {"diag"};
    case SolverKind::vqd: return {"vqd"};
    case SolverKind::both: return {"diag", "vqd"};
  }
  throw std::invalid_argument("resolve_methods: bad solver kind");
}

inline GcmSolution solve_with(const std::string& method, const ManyBodyKernels& kernels,
                              const ExperimentConfig& cfg) {
  if (method == "diag") return gcm_diag(kernels, cfg.diag_config());
  return gcm_vqd(kernels, cfg.vqd_config());
}

/// Per-operator error statistics of an estimated table against closed forms.
struct KernelErrorStats {
  double mean_abs = 0.0;
  double max_abs = 0.0;
};

inline KernelErrorStats kernel_errors(const OneBodyKernels& kernels, Pauli p) {
  KernelErrorStats st;
  const int l_count = kernels.grid.size();
  int count = 0;
  for (int l = 0; l < l_count; ++l)
    for (int lp = l; lp < l_count; ++lp) {
      const KernelQuad q =
          analytic_one_body(kernels.grid.thetas[l], kernels.grid.thetas[lp]);
      const double err = std::abs(kernels.table(p)(l, lp) - q.get(p));
      st.mean_abs += err;
      st.max_abs = std::max(st.max_abs, err);
      ++count;
    }
  st.mean_abs /= count;
  return st;
}

inline KernelErrorStats kernel_errors_all(const OneBodyKernels& kernels) {
  KernelErrorStats st;
  for (Pauli p : kAllPaulis) {
    const KernelErrorStats s = kernel_errors(kernels, p);
    st.mean_abs += s.mean_abs / 4.0;
    st.max_abs = std::max(st.max_abs, s.max_abs);
  }
  return st;
}

}  // namespace cli_detail

// --- subcommand: kernels --------------------------------------------------------

inline int cmd_kernels(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const AngleGrid grid = make_grid(cfg.grid_l);
  const EstimatorConfig est = cfg.estimator();
  const OneBodyKernels kernels = estimate_one_body(grid, est);
  const auto echo = cli_detail::echo_lines(cfg, "kernels");

  fs::create_directories(cfg.out_dir);
  write_file_atomic(fs::path(cfg.out_dir) / "kernels.csv", kernels_csv_string(kernels, echo));

  // Per-operator, per-part error summary against the closed forms.
  std::vector<std::string> rows;
  for (Pauli p : kAllPaulis)
    for (Part part : {Part::real, Part::imag}) {
      double mean_err = 0.0, max_err = 0.0, max_std = 0.0;
      int count = 0;
      for (int l = 0; l < grid.size(); ++l)
        for (int lp = l; lp < grid.size(); ++lp) {
          const KernelQuad q = analytic_one_body(grid.thetas[l], grid.thetas[lp]);
          const double exact =
              part == Part::real ? q.get(p).real() : q.get(p).imag();
          const std::complex<double> v = kernels.table(p)(l, lp);
          const double got = part == Part::real ? v.real() : v.imag();
          mean_err += std::abs(got - exact);
          max_err = std::max(max_err, std::abs(got - exact));
          max_std = std::max(max_std, kernels.stderr_of(p, part)(l, lp));
          ++count;
        }
      mean_err /= count;
      std::ostringstream r;
      r << to_string(p) << ',' << to_string(part) << ',' << format_g17(mean_err) << ','
        << format_g17(max_err) << ',' << format_g17(max_std);
      rows.push_back(r.str());
    }
  write_file_atomic(fs::path(cfg.out_dir) / "kernel_summary.csv",
                    cli_detail::csv_with_header(
                        echo, "op,part,mean_abs_error,max_abs_error,max_stderr", rows));

  // Optional reference column: all grid angles against a fixed theta_ref.
  if (cfg.theta_ref) {
    std::optional<ScaleCalibration> cal;
    if (est.scaling_correction) cal = calibrate_scaling(est);
    std::vector<std::string> ref_rows;
    for (int l = 0; l < grid.size(); ++l) {
      const KernelQuad q = analytic_one_body(grid.thetas[l], *cfg.theta_ref);
      for (Pauli p : kAllPaulis)
        for (Part part : {Part::real, Part::imag}) {
          const double exact = part == Part::real ? q.get(p).real() : q.get(p).imag();
          Measurement m;
          if (!est.noise && est.n_shots == kExactShots) {
            m = {exact, 0.0};
          } else if (est.assume_real && !detail::part_is_structural(p, part)) {
            m = {0.0, 0.0};
          } else {
            m = detail::measure_part(grid.thetas[l], *cfg.theta_ref, p, part, est, kStreamRef,
                                     static_cast<std::uint64_t>(l), 0);
            if (cal) {
              m.mean /= cal->scale_of(p);
              m.std /= cal->scale_of(p);
            }
          }
          std::ostringstream r;
          r << l << ',' << format_g17(grid.thetas[l]) << ',' << to_string(p) << ','
            << to_string(part) << ',' << format_g17(m.mean) << ',' << format_g17(m.std) << ','
            << format_g17(exact);
          ref_rows.push_back(r.str());
        }
    }
    write_file_atomic(fs::path(cfg.out_dir) / "kernels_ref.csv",
                      cli_detail::csv_with_header(
                          echo, "l,theta_l,op,part,value,stderr,exact", ref_rows));
  }

  std::cout << "kernels: wrote " << (fs::path(cfg.out_dir) / "kernels.csv").string() << " (L="
            << cfg.grid_l << ", mode=" << to_string(cfg.mode) << ", mitigate="
            << to_string(cfg.mitigate) << ")\n";
  return 0;
}

// --- subcommand: spectrum ----------------------------------------------------------

inline int cmd_spectrum(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const AngleGrid grid = make_grid(cfg.grid_l);
  const EstimatorConfig est = cfg.estimator();
  const OneBodyKernels kernels = estimate_one_body(grid, est);
  const auto echo = cli_detail::echo_lines(cfg, "spectrum");
  const std::vector<double> chis = cli_detail::resolve_chis(cfg);
  const std::vector<std::string> methods = cli_detail::resolve_methods(cfg);

  std::vector<std::string> spectrum_rows, fk_rows;
  nlohmann::json solutions = nlohmann::json::array();
  for (double chi : chis) {
    const LipkinParams params = cfg.lipkin(chi);
    const ManyBodyKernels many = assemble_many_body(kernels, params);
    const std::vector<double> exact = exact_spectrum(params);
    for (const std::string& method : methods) {
      GcmSolution sol;
      try {
        sol = cli_detail::solve_with(method, many, cfg);
      } catch (const std::exception& e) {
        std::cerr << "warning: chi=" << format_g17(chi) << " method=" << method
                  << " failed: " << e.what() << "\n";
        continue;  // keep sweeping the remaining points
      }
      for (int s = 0; s < sol.n_states(); ++s) {
        const bool has_exact = s < static_cast<int>(exact.size());
        const double ex = has_exact ? exact[s] : 0.0;
        const bool conv = sol.diagnostics.empty() || sol.diagnostics[s].converged;
        std::ostringstream r;
        r << format_g17(chi) << ',' << method << ',' << s << ',' << format_g17(sol.energies[s])
          << ',' << (has_exact ? format_g17(ex) : "") << ','
          << (has_exact ? format_g17(std::abs(sol.energies[s] - ex)) : "") << ','
          << (conv ? 1 : 0);
        spectrum_rows.push_back(r.str());
      }
      const int k_max = std::min<int>(sol.n_states(), static_cast<int>(exact.size()));
      for (int k = 1; k <= k_max; ++k) {
        std::ostringstream r;
        r << format_g17(chi) << ',' << method << ',' << k << ','
          << format_g17(f_k_metric(sol.energies, exact, k));
        fk_rows.push_back(r.str());
      }
      nlohmann::json entry = solution_to_json(sol);
      entry["chi"] = chi;
      entry["energies_exact"] = exact;
      solutions.push_back(entry);
    }
  }

  fs::create_directories(cfg.out_dir);
  write_file_atomic(fs::path(cfg.out_dir) / "spectrum.csv",
                    cli_detail::csv_with_header(
                        echo, "chi,method,state,energy,energy_exact,abs_error,converged",
                        spectrum_rows));
  write_file_atomic(fs::path(cfg.out_dir) / "spectrum_fk.csv",
                    cli_detail::csv_with_header(echo, "chi,method,k,f_k", fk_rows));

  nlohmann::json doc;
  doc["version"] = kVersion;
  doc["command"] = "spectrum";
  nlohmann::json config_echo = nlohmann::json::object();
  for (const std::string& line : cfg.echo()) {
    const std::size_t eq = line.find('=');
    config_echo[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  doc["config"] = config_echo;
  doc["solutions"] = solutions;
  write_file_atomic(fs::path(cfg.out_dir) / "solutions.json", doc.dump(2) + "\n");

  if (est.scaling_correction)
    write_file_atomic(fs::path(cfg.out_dir) / "calibration.txt",
                      calibration_report(calibrate_scaling(est)));

  std::cout << "spectrum: wrote " << (fs::path(cfg.out_dir) / "spectrum.csv").string() << " ("
            << chis.size() << " chi point(s), " << methods.size() << " method(s))\n";
  return 0;
}

// --- subcommand: noise-study ---------------------------------------------------------

inline int cmd_noise_study(ExperimentConfig cfg) {
  namespace fs = std::filesystem;
  cfg.mode = RunMode::noisy;  // the study compares raw vs mitigated noisy runs
  if (cfg.mitigate == MitigationKind::none) cfg.mitigate = MitigationKind::zne_scale;

  ExperimentConfig raw_cfg = cfg;
  raw_cfg.mitigate = MitigationKind::none;

  const AngleGrid grid = make_grid(cfg.grid_l);
  const OneBodyKernels raw = estimate_one_body(grid, raw_cfg.estimator());
  const OneBodyKernels mit = estimate_one_body(grid, cfg.estimator());
  const auto echo = cli_detail::echo_lines(cfg, "noise-study");

  std::vector<std::string> err_rows;
  auto error_row = [&](const std::string& label, const cli_detail::KernelErrorStats& r,
                       const cli_detail::KernelErrorStats& m) {
    std::ostringstream s;
    s << label << ',' << format_g17(r.mean_abs) << ',' << format_g17(r.max_abs) << ','
      << format_g17(m.mean_abs) << ',' << format_g17(m.max_abs) << ','
      << format_g17(m.mean_abs > 0.0 ? r.mean_abs / m.mean_abs : 0.0);
    err_rows.push_back(s.str());
  };
  for (Pauli p : kAllPaulis)
    error_row(to_string(p), cli_detail::kernel_errors(raw, p), cli_detail::kernel_errors(mit, p));
  error_row("all", cli_detail::kernel_errors_all(raw), cli_detail::kernel_errors_all(mit));

  std::vector<std::string> study_rows;
  for (double chi : cli_detail::resolve_chis(cfg)) {
    const LipkinParams params = cfg.lipkin(chi);
    const std::vector<double> exact = exact_spectrum(params);
    try {
      const GcmSolution sol_raw = gcm_diag(assemble_many_body(raw, params), cfg.diag_config());
      const GcmSolution sol_mit = gcm_diag(assemble_many_body(mit, params), cfg.diag_config());
      const double e0 = exact[0];
      std::ostringstream r;
      r << format_g17(chi) << ',' << format_g17(e0) << ',' << format_g17(sol_raw.energies[0])
        << ',' << format_g17(sol_mit.energies[0]) << ','
        << format_g17(std::abs(sol_raw.energies[0] - e0) / std::abs(e0)) << ','
        << format_g17(std::abs(sol_mit.energies[0] - e0) / std::abs(e0));
      study_rows.push_back(r.str());
    } catch (const std::exception& e) {
      std::cerr << "warning: chi=" << format_g17(chi) << " failed: " << e.what() << "\n";
    }
  }

  fs::create_directories(cfg.out_dir);
  write_file_atomic(
      fs::path(cfg.out_dir) / "kernel_error.csv",
      cli_detail::csv_with_header(echo,
                                  "op,raw_mean_abs_error,raw_max_abs_error,mit_mean_abs_error,"
                                  "mit_max_abs_error,improvement_factor",
                                  err_rows));
  write_file_atomic(
      fs::path(cfg.out_dir) / "noise_study.csv",
      cli_detail::csv_with_header(
          echo, "chi,e_exact,e_raw,e_mitigated,rel_error_raw,rel_error_mitigated", study_rows));
  if (cfg.estimator().scaling_correction)
    write_file_atomic(fs::path(cfg.out_dir) / "calibration.txt",
                      calibration_report(calibrate_scaling(cfg.estimator())));

  std::cout << "noise-study: wrote " << (fs::path(cfg.out_dir) / "noise_study.csv").string()
            << " (mitigate=" << to_string(cfg.mitigate) << ")\n";
  return 0;
}

// --- subcommand: shot-study ------------------------------------------------------------

inline int cmd_shot_study(ExperimentConfig cfg) {
  namespace fs = std::filesystem;
  if (cfg.mode == RunMode::exact) cfg.mode = RunMode::shots;  // the study needs sampling noise

  const AngleGrid grid = make_grid(cfg.grid_l);
  const LipkinParams params = cfg.lipkin(cfg.chi);
  const std::vector<double> exact = exact_spectrum(params);
  const std::vector<std::string> methods = cli_detail::resolve_methods(cfg);
  const auto echo = cli_detail::echo_lines(cfg, "shot-study");

  std::vector<std::string> rows;
  // method -> budget -> F_K samples over seeds
  std::map<std::string, std::map<std::uint64_t, std::vector<double>>> samples;
  for (int seed_idx = 0; seed_idx < cfg.n_seeds; ++seed_idx) {
    for (std::uint64_t budget : cfg.shots_list) {
      ExperimentConfig run = cfg;
      run.seed = cfg.seed + static_cast<std::uint64_t>(seed_idx);
      run.shots = budget;
      const OneBodyKernels kernels = estimate_one_body(grid, run.estimator());
      const ManyBodyKernels many = assemble_many_body(kernels, params);
      for (const std::string& method : methods) {
        try {
          const GcmSolution sol = cli_detail::solve_with(method, many, run);
          const int k = std::min<int>(sol.n_states(), static_cast<int>(exact.size()));
          const double fk = f_k_metric(sol.energies, exact, k);
          int n_converged = sol.n_states();
          if (!sol.diagnostics.empty()) {
            n_converged = 0;
            for (const StateDiagnostics& d : sol.diagnostics) n_converged += d.converged ? 1 : 0;
          }
          std::ostringstream r;
          r << method << ',' << budget << ',' << run.seed << ',' << k << ',' << format_g17(fk)
            << ',' << sol.retained_count << ',' << n_converged;
          rows.push_back(r.str());
          samples[method][budget].push_back(fk);
        } catch (const std::exception& e) {
          std::cerr << "warning: seed=" << run.seed << " shots=" << budget
                    << " method=" << method << " failed: " << e.what() << "\n";
        }
      }
    }
  }

  std::vector<std::string> summary_rows;
  for (const std::string& method : methods)
    for (std::uint64_t budget : cfg.shots_list) {
      const std::vector<double>& v = samples[method][budget];
      if (v.empty()) continue;
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      std::ostringstream r;
      r << method << ',' << budget << ',' << (params.n_particles + 1) << ','
        << format_g17(cli_detail::median(v)) << ',' << format_g17(mean) << ',' << v.size();
      summary_rows.push_back(r.str());
    }

  fs::create_directories(cfg.out_dir);
  write_file_atomic(fs::path(cfg.out_dir) / "shot_study.csv",
                    cli_detail::csv_with_header(
                        echo, "method,n_shots,seed,k,f_k,retained,n_converged", rows));
  write_file_atomic(fs::path(cfg.out_dir) / "shot_study_summary.csv",
                    cli_detail::csv_with_header(
                        echo, "method,n_shots,k,median_f_k,mean_f_k,n_seeds", summary_rows));

  std::cout << "shot-study: wrote " << (fs::path(cfg.out_dir) / "shot_study.csv").string() << " ("
            << cfg.n_seeds << " seeds x " << cfg.shots_list.size() << " budgets)\n";
  return 0;
}

// --- argument parsing -------------------------------------------------------------------

namespace cli_detail {

inline std::vector<double> parse_chi_sweep(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const std::vector<std::string> f = detail::split(text, ':');
    if (f.size() != 3) throw std::invalid_argument("--chi-sweep range must be start:end:step");
    const double a = parse_double(detail::trim(f[0]));
    const double b = parse_double(detail::trim(f[1]));
    const double step = parse_double(detail::trim(f[2]));
    if (!(step > 0.0)) throw std::invalid_argument("--chi-sweep step must be positive");
    const int count = static_cast<int>(std::floor((b - a) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(a + i * step);
    return out;
  }
  for (const std::string& v : detail::split_list(text)) out.push_back(parse_double(v));
  return out;
}

}  // namespace cli_detail

/// Entry point shared by the installed binary and the in-process CLI tests.
/// `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args) {
  ExperimentConfig cfg;

  // The config file provides the base layer; explicit flags override it.
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size())
        cfg = ExperimentConfig::from_file(args[i + 1]);
      else if (args[i].rfind("--config=", 0) == 0)
        cfg = ExperimentConfig::from_file(args[i].substr(9));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App app{"Hybrid generator-coordinate spectra of the two-level pairing model"};
  app.set_version_flag("--version", std::string("qgcm ") + kVersion);
  app.require_subcommand(1);

  struct Holders {
    std::string config_path, mode, solver, mitigate, noise_preset, theta_ref, chi_sweep;
    std::string zne_folds, shots_list, vqd_lambda, vqd_beta, vqd_optimizer;
    double norm_threshold = 0.0;
  } hold;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", hold.config_path, "configuration file (key=value or JSON)");
    s->add_option("--n", cfg.n, "particle number N");
    s->add_option("--epsilon", cfg.epsilon, "level splitting epsilon");
    s->add_option("--chi", cfg.chi, "interaction strength chi");
    s->add_option("--chi-sweep", hold.chi_sweep, "chi values: comma list or start:end:step");
    s->add_option("--grid-l,--L", cfg.grid_l, "number of generator angles L");
    s->add_option("--mode", hold.mode, "estimation mode: exact|shots|noisy");
    s->add_option("--shots", cfg.shots, "shots per circuit");
    s->add_option("--seed", cfg.seed, "base RNG seed");
    s->add_option("--solver", hold.solver, "solver: diag|vqd|both");
    s->add_option("--mitigate", hold.mitigate, "mitigation: none|zne|scale|zne+scale");
    s->add_option("--zne-folds", hold.zne_folds, "fold counts for ZNE, comma list");
    s->add_flag("--scale-before-zne", cfg.scale_before_zne,
                "apply scaling per fold before extrapolating");
    s->add_flag("--assume-real", cfg.assume_real,
                "skip circuits whose ideal outcome is identically zero");
    s->add_option("--calibration-shot-factor", cfg.calibration_shot_factor,
                  "shot multiplier for calibration circuits");
    s->add_option("--norm-threshold", hold.norm_threshold,
                  "norm eigenvalue cutoff (default 1e-10 exact, 1e-4 otherwise)")
        ->check(CLI::PositiveNumber);
    s->add_option("--noise", hold.noise_preset, "noise preset: off|lagos");
    s->add_option("--t1", cfg.noise.t1_us, "T1 relaxation time [us]");
    s->add_option("--t2", cfg.noise.t2_us, "T2 dephasing time [us]");
    s->add_option("--readout-error", cfg.noise.readout_error, "readout bit-flip probability");
    s->add_option("--cnot-error", cfg.noise.cnot_error, "two-qubit depolarizing probability");
    s->add_option("--one-qubit-error", cfg.noise.one_qubit_error,
                  "one-qubit depolarizing probability");
    s->add_option("--gate-1q-ns", cfg.noise.gate_1q_ns, "one-qubit gate duration [ns]");
    s->add_option("--gate-2q-ns", cfg.noise.gate_2q_ns, "two-qubit gate duration [ns]");
    s->add_option("--vqd-bound", cfg.vqd_bound, "VQD coefficient box half-width");
    s->add_option("--vqd-lambda", hold.vqd_lambda, "normalization penalty weight or 'auto'");
    s->add_option("--vqd-beta", hold.vqd_beta, "orthogonality penalty weight or 'auto'");
    s->add_option("--vqd-n-states", cfg.vqd_n_states, "number of VQD states (-1: all)");
    s->add_option("--vqd-max-iterations", cfg.vqd_max_iterations, "optimizer iteration cap");
    s->add_option("--vqd-gradient-tolerance", cfg.vqd_gradient_tolerance,
                  "optimizer convergence tolerance");
    s->add_option("--vqd-restarts", cfg.vqd_restarts, "random restarts per state");
    s->add_option("--vqd-optimizer", hold.vqd_optimizer, "quasi_newton|linear_dfo");
    s->add_option("--shots-list", hold.shots_list, "shot budgets for shot-study, comma list");
    s->add_option("--n-seeds", cfg.n_seeds, "number of seeds for shot-study");
    s->add_option("--theta-ref", hold.theta_ref,
                  "reference angle for the kernels command (accepts pi notation)");
    s->add_option("--out", cfg.out_dir, "output directory");
  };

  CLI::App* sub_kernels = app.add_subcommand("kernels", "estimate one-body kernel tables");
  CLI::App* sub_spectrum = app.add_subcommand("spectrum", "solve for many-body spectra");
  CLI::App* sub_noise = app.add_subcommand("noise-study", "raw vs mitigated noisy estimates");
  CLI::App* sub_shots = app.add_subcommand("shot-study", "spectral accuracy vs shot budget");
  for (CLI::App* s : {sub_kernels, sub_spectrum, sub_noise, sub_shots}) add_common(s);

  std::vector<const char*> argv;
  argv.push_back("qgcm");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!hold.mode.empty()) cfg.mode = run_mode_from_string(hold.mode);
    if (!hold.solver.empty()) cfg.solver = solver_from_string(hold.solver);
    if (!hold.mitigate.empty()) cfg.mitigate = mitigation_from_string(hold.mitigate);
    if (!hold.chi_sweep.empty()) {
      cfg.chi_sweep = cli_detail::parse_chi_sweep(hold.chi_sweep);
      cfg.use_chi_sweep = true;
    } else if (sub->count("--chi") > 0) {
      cfg.use_chi_sweep = false;
    }
    if (!hold.zne_folds.empty()) {
      cfg.zne_folds.clear();
      for (const std::string& v : detail::split_list(hold.zne_folds))
        cfg.zne_folds.push_back(std::stoi(v));
    }
    if (!hold.shots_list.empty()) {
      cfg.shots_list.clear();
      for (const std::string& v : detail::split_list(hold.shots_list))
        cfg.shots_list.push_back(std::stoull(v));
    }
    if (sub->count("--norm-threshold") > 0) cfg.norm_threshold = hold.norm_threshold;
    if (!hold.vqd_lambda.empty())
      cfg.vqd_lambda = hold.vqd_lambda == "auto" ? std::nullopt
                                                 : std::optional<double>(parse_double(hold.vqd_lambda));
    if (!hold.vqd_beta.empty())
      cfg.vqd_beta = hold.vqd_beta == "auto" ? std::nullopt
                                             : std::optional<double>(parse_double(hold.vqd_beta));
    if (!hold.vqd_optimizer.empty()) {
      if (hold.vqd_optimizer == "linear_dfo") cfg.vqd_dfo = true;
      else if (hold.vqd_optimizer == "quasi_newton") cfg.vqd_dfo = false;
      else throw std::invalid_argument("--vqd-optimizer must be quasi_newton|linear_dfo");
    }
    if (!hold.theta_ref.empty()) cfg.theta_ref = parse_angle(hold.theta_ref);
    if (!hold.noise_preset.empty()) {
      if (hold.noise_preset == "lagos") {
        cfg.mode = RunMode::noisy;
        cfg.noise = NoiseParams{};
      } else if (hold.noise_preset == "off") {
        if (cfg.mode == RunMode::noisy) cfg.mode = RunMode::shots;
      } else {
        throw std::invalid_argument("--noise must be off|lagos");
      }
    }

    cfg.validate();
    if (sub == sub_kernels) return cmd_kernels(cfg);
    if (sub == sub_spectrum) return cmd_spectrum(cfg);
    if (sub == sub_noise) return cmd_noise_study(cfg);
    return cmd_shot_study(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qgcm
