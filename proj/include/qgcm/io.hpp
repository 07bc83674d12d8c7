// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgcm/kernels.hpp"
#include "qgcm/mitigation.hpp"
#include "qgcm/solver.hpp"
#include "qgcm/version.hpp"

namespace qgcm {

// ---------------------------------------------------------------------------
// Deterministic text serialization.  All floating-point values are written
// with 17 significant digits, which round-trips IEEE doubles exactly; output
// contains no timestamps or absolute paths, so reruns are byte-identical.
// ---------------------------------------------------------------------------

inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw std::invalid_argument("parse_double: trailing junk in '" + s + "'");
  return v;
}

/// Write via a temporary file in the same directory, then rename into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
    out << content;
    if (!out.good()) throw std::runtime_error("write_file_atomic: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace detail

// --- kernel table CSV -------------------------------------------------------------

/// CSV schema: columns l, lp, op, part, value, stderr, n_shots; one row per
/// measured upper-triangle entry and part.  The comment block carries the
/// grid angles and estimator metadata needed to reconstruct the container,
/// plus any caller-provided configuration echo.
inline void write_kernels_csv(std::ostream& out, const OneBodyKernels& kernels,
                              const std::vector<std::string>& header_lines = {}) {
  kernels.validate();
  out << "# tool = qgcm kernel table v" << kVersion << "\n";
  for (const std::string& line : header_lines) out << "# " << line << "\n";
  out << "# provenance = " << to_string(kernels.provenance) << "\n";
  out << "# mitigation = " << kernels.mitigation << "\n";
  out << "# n_shots = " << kernels.n_shots << "\n";
  out << "# thetas =";
  for (double t : kernels.grid.thetas) out << ' ' << format_g17(t);
  out << "\n";
  out << "l,lp,op,part,value,stderr,n_shots\n";
  const int l_count = kernels.grid.size();
  for (Pauli p : kAllPaulis)
    for (int l = 0; l < l_count; ++l)
      for (int lp = l; lp < l_count; ++lp)
        for (Part part : {Part::real, Part::imag}) {
          const std::complex<double> v = kernels.table(p)(l, lp);
          const double value = part == Part::real ? v.real() : v.imag();
          out << l << ',' << lp << ',' << to_string(p) << ',' << to_string(part) << ','
              << format_g17(value) << ',' << format_g17(kernels.stderr_of(p, part)(l, lp)) << ','
              << kernels.n_shots << "\n";
        }
}

inline std::string kernels_csv_string(const OneBodyKernels& kernels,
                                      const std::vector<std::string>& header_lines = {}) {
  std::ostringstream out;
  write_kernels_csv(out, kernels, header_lines);
  return out.str();
}

inline OneBodyKernels read_kernels_csv(std::istream& in) {
  OneBodyKernels kernels;
  bool have_thetas = false;
  bool have_header_row = false;
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = detail::trim(line.substr(1, eq - 1));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key == "thetas") {
        std::istringstream ts(value);
        double t;
        kernels.grid.thetas.clear();
        while (ts >> t) kernels.grid.thetas.push_back(t);
        if (kernels.grid.size() < 2)
          throw std::invalid_argument("read_kernels_csv: bad theta list");
        kernels.allocate();
        have_thetas = true;
      } else if (key == "provenance") {
        kernels.provenance = provenance_from_string(value);
      } else if (key == "mitigation") {
        kernels.mitigation = value;
      } else if (key == "n_shots") {
        kernels.n_shots = std::stoull(value);
      }
      continue;
    }
    if (!have_header_row) {  // first non-comment line is the column header
      if (line != "l,lp,op,part,value,stderr,n_shots")
        throw std::invalid_argument("read_kernels_csv: unexpected column header '" + line + "'");
      if (!have_thetas)
        throw std::invalid_argument("read_kernels_csv: missing '# thetas =' metadata line");
      have_header_row = true;
      continue;
    }
    const std::vector<std::string> f = detail::split(line, ',');
    if (f.size() != 7)
      throw std::invalid_argument("read_kernels_csv: expected 7 columns, got '" + line + "'");
    const int l = std::stoi(f[0]);
    const int lp = std::stoi(f[1]);
    const int l_count = kernels.grid.size();
    if (l < 0 || lp < l || lp >= l_count)
      throw std::invalid_argument("read_kernels_csv: index pair out of range in '" + line + "'");
    const Pauli p = pauli_from_string(f[2]);
    const Part part = part_from_string(f[3]);
    const double value = parse_double(f[4]);
    const double err = parse_double(f[5]);

    std::complex<double> cur = kernels.table(p)(l, lp);
    if (part == Part::real)
      cur.real(value);
    else
      cur.imag(value);
    kernels.table(p)(l, lp) = cur;
    kernels.table(p)(lp, l) = std::conj(cur);
    kernels.stderr_of(p, part)(l, lp) = err;
    kernels.stderr_of(p, part)(lp, l) = err;
  }
  if (!have_header_row) throw std::invalid_argument("read_kernels_csv: no data found");
  kernels.validate();
  return kernels;
}

// --- solution export ---------------------------------------------------------------

inline nlohmann::json solution_to_json(const GcmSolution& sol) {
  nlohmann::json j;
  j["method"] = sol.method;
  j["energies"] = sol.energies;
  j["retained_count"] = sol.retained_count;
  j["norm_eigenvalues"] = sol.norm_eigenvalues;
  nlohmann::json mixing = nlohmann::json::array();
  for (int s = 0; s < sol.mixing.cols(); ++s) {
    nlohmann::json col = nlohmann::json::array();
    for (int l = 0; l < sol.mixing.rows(); ++l)
      col.push_back({sol.mixing(l, s).real(), sol.mixing(l, s).imag()});
    mixing.push_back(col);
  }
  j["mixing"] = mixing;
  if (!sol.diagnostics.empty()) {
    nlohmann::json diags = nlohmann::json::array();
    for (const StateDiagnostics& d : sol.diagnostics)
      diags.push_back({{"converged", d.converged},
                       {"iterations", d.iterations},
                       {"evaluations", d.evaluations},
                       {"optimality", d.optimality},
                       {"cost", d.cost}});
    j["diagnostics"] = diags;
  }
  return j;
}

// --- calibration report --------------------------------------------------------------

inline std::string calibration_report(const ScaleCalibration& cal) {
  std::ostringstream out;
  out << "# qgcm calibration report v" << kVersion << "\n";
  for (const CalibrationPoint& pt : cal.points) {
    const int idx = static_cast<int>(pt.op);
    const std::string op = to_string(pt.op);
    out << "calibration." << op << ".theta_l = " << format_g17(pt.theta_l) << "\n";
    out << "calibration." << op << ".theta_lp = " << format_g17(pt.theta_lp) << "\n";
    out << "calibration." << op << ".part = " << to_string(pt.part) << "\n";
    out << "calibration." << op << ".ideal = " << format_g17(pt.ideal) << "\n";
    out << "calibration." << op << ".measured = " << format_g17(cal.measured[idx]) << "\n";
    out << "calibration." << op << ".scale = " << format_g17(cal.scale[idx]) << "\n";
  }
  return out.str();
}

}  // namespace qgcm
