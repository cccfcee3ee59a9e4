#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aim/eigenflow.hpp"
#include "aim/tau.hpp"
#include "aim/triple.hpp"
#include "aim/types.hpp"

namespace aim {

using Json = nlohmann::json;

// Run-wide knobs shared by the CLI subcommands.
struct RunConfig {
  std::uint64_t seed = 1;
  double tol_rank = kDefaultRankTol;
  double tol_identity = 1e-9;
  int max_time_index = kDefaultMaxTimeIndex;
  std::string output_path;
  std::string format = "json";  // json | csv

  void validate() const {
    if (tol_rank <= 0 || tol_identity <= 0) throw Error("RunConfig: tolerances must be positive");
    if (max_time_index < 1) throw Error("RunConfig: max_time_index must be >= 1");
    if (format != "json" && format != "csv") throw Error("RunConfig: format must be json or csv");
  }
};

// Outcome of one verification check over many instances.
struct VerificationReport {
  std::string check_name;
  int instances = 0;
  double max_relative_residual = 0.0;
  std::vector<std::pair<std::string, double>> failures;

  bool pass() const { return failures.empty(); }

  void record(const std::string& instance, double residual, double tolerance) {
    ++instances;
    max_relative_residual = std::max(max_relative_residual, residual);
    if (!(residual < tolerance)) failures.emplace_back(instance, residual);
  }
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --- JSON encoding -----------------------------------------------------------
// Matrices are row-major nested arrays of [re, im] pairs; full double precision
// survives the round trip.

inline Json to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const CMatrix& a) {
  Json rows = Json::array();
  for (int i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < a.cols(); ++j) row.push_back(to_json(a(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline Json to_json(const CVector& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(to_json(v(i)));
  return arr;
}

namespace detail {

inline Complex complex_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw IoError("expected [re, im] pair in " + where);
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline CMatrix matrix_from_json(const Json& j, int n, const std::string& name) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw IoError("matrix \"" + name + "\" must have " + std::to_string(n) + " rows");
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
      throw IoError("matrix \"" + name + "\" row " + std::to_string(i) + " must have " +
                    std::to_string(n) + " entries");
    for (int k = 0; k < n; ++k)
      a(i, k) = complex_from_json(j[i][k], "matrix \"" + name + "\"");
  }
  if (!all_finite(a)) throw IoError("matrix \"" + name + "\" has non-finite entries");
  return a;
}

inline CVector vector_from_json(const Json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) throw IoError("array \"" + name + "\" must be non-empty");
  CVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<int>(i)) = complex_from_json(j[i], "array \"" + name + "\"");
  return v;
}

inline Json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open \"" + path + "\"");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw IoError("malformed JSON in \"" + path + "\": " + e.what());
  }
  return j;
}

}  // namespace detail

inline Json triple_to_json(const Triple& m) {
  Json j;
  j["n"] = m.n();
  j["X"] = to_json(m.X);
  j["Y"] = to_json(m.Y);
  j["Z"] = to_json(m.Z);
  return j;
}

inline Triple triple_from_json(const Json& j) {
  for (const char* key : {"n", "X", "Y", "Z"})
    if (!j.contains(key)) throw IoError(std::string("triple file missing key \"") + key + "\"");
  const int n = j["n"].get<int>();
  if (n < 1) throw IoError("field \"n\" must be a positive integer");
  return make_triple(detail::matrix_from_json(j["X"], n, "X"),
                     detail::matrix_from_json(j["Y"], n, "Y"),
                     detail::matrix_from_json(j["Z"], n, "Z"));
}

inline void write_triple(const std::string& path, const Triple& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write \"" + path + "\"");
  out << triple_to_json(m).dump(2) << "\n";
}

inline Triple read_triple(const std::string& path) {
  return triple_from_json(detail::parse_file(path));
}

inline Json spectral_to_json(const SpectralSolitonData& d) {
  Json j;
  j["n"] = d.n();
  j["alpha"] = to_json(d.alpha);
  j["beta"] = to_json(d.beta);
  j["lambda"] = to_json(d.lambda);
  j["mu"] = to_json(d.mu);
  return j;
}

inline SpectralSolitonData spectral_from_json(const Json& j) {
  for (const char* key : {"alpha", "beta", "lambda", "mu"})
    if (!j.contains(key))
      throw IoError(std::string("spectral file missing key \"") + key + "\"");
  SpectralSolitonData d;
  d.alpha = detail::vector_from_json(j["alpha"], "alpha");
  d.beta = detail::vector_from_json(j["beta"], "beta");
  d.lambda = detail::vector_from_json(j["lambda"], "lambda");
  d.mu = detail::vector_from_json(j["mu"], "mu");
  d.validate();
  return d;
}

inline void write_spectral(const std::string& path, const SpectralSolitonData& d) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write \"" + path + "\"");
  out << spectral_to_json(d).dump(2) << "\n";
}

inline SpectralSolitonData read_spectral(const std::string& path) {
  return spectral_from_json(detail::parse_file(path));
}

/// Header: check,instance,residual  followed by a summary row.
inline std::string report_to_csv(const VerificationReport& r) {
  std::ostringstream out;
  out << "check,instance,residual\n";
  for (const auto& [what, res] : r.failures)
    out << r.check_name << ',' << what << ',' << format_double(res) << "\n";
  out << r.check_name << ",max," << format_double(r.max_relative_residual) << "\n";
  out << r.check_name << ",pass," << (r.pass() ? 1 : 0) << "\n";
  return out.str();
}

inline Json report_to_json(const VerificationReport& r) {
  Json j;
  j["check_name"] = r.check_name;
  j["instances"] = r.instances;
  j["max_relative_residual"] = r.max_relative_residual;
  Json fails = Json::array();
  for (const auto& [what, res] : r.failures) {
    Json f;
    f["instance"] = what;
    f["residual"] = res;
    fails.push_back(f);
  }
  j["failures"] = fails;
  j["pass"] = r.pass();
  return j;
}

// --- CSV ----------------------------------------------------------------------

/// Header: x,y,t,re,im
inline std::string grid_csv(const std::vector<GridValue>& grid) {
  std::ostringstream out;
  out << "x,y,t,re,im\n";
  for (const auto& g : grid)
    out << format_double(g.x) << ',' << format_double(g.y) << ',' << format_double(g.s) << ','
        << format_double(g.u.real()) << ',' << format_double(g.u.imag()) << "\n";
  return out.str();
}

/// Header: t,re_Q1,im_Q1,...
inline std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  const int n = traj.Q.empty() ? 0 : static_cast<int>(traj.Q.front().size());
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",re_Q" << i << ",im_Q" << i;
  out << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_double(traj.times[k]);
    for (int i = 0; i < n; ++i)
      out << ',' << format_double(traj.Q[k](i).real()) << ','
          << format_double(traj.Q[k](i).imag());
    out << "\n";
  }
  return out.str();
}

/// Two trajectories on a shared grid.  Header: t,re_Q1_direct,...,re_Q1_ode,...
inline std::string compare_csv(const Trajectory& direct, const Trajectory& ode) {
  std::ostringstream out;
  const std::size_t rows = std::min(direct.times.size(), ode.times.size());
  const int n = rows == 0 ? 0 : static_cast<int>(direct.Q.front().size());
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",re_Q" << i << "_direct,im_Q" << i << "_direct";
  for (int i = 1; i <= n; ++i) out << ",re_Q" << i << "_ode,im_Q" << i << "_ode";
  out << "\n";
  for (std::size_t k = 0; k < rows; ++k) {
    out << format_double(direct.times[k]);
    for (int i = 0; i < n; ++i)
      out << ',' << format_double(direct.Q[k](i).real()) << ','
          << format_double(direct.Q[k](i).imag());
    for (int i = 0; i < n; ++i)
      out << ',' << format_double(ode.Q[k](i).real()) << ',' << format_double(ode.Q[k](i).imag());
    out << "\n";
  }
  return out.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write \"" + path + "\"");
  out << text;
}

}  // namespace aim
