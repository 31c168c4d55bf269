#pragma once

// JSON serialization for reports and the run manifest, plus small helpers
// for CSV margin tables and flat binary field dumps.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "folia/models.hpp"
#include "folia/verify.hpp"

namespace folia::report {

using nlohmann::json;

inline json to_json(const verify::CheckReport& r) {
  json j;
  j["id"] = r.id;
  j["model"] = r.model;
  j["params"] = r.params;
  j["samples"] = r.margins.size();
  j["margins"] = r.margins;
  j["min_margin"] = r.min_margin;
  j["tolerance"] = r.tolerance;
  j["status"] = r.status;
  if (!r.refinement.empty()) {
    json ref = json::array();
    for (auto [N, m] : r.refinement) ref.push_back({{"N", N}, {"min_margin", m}});
    j["refinement"] = ref;
  }
  if (!r.extras.empty()) j["extras"] = r.extras;
  return j;
}

inline json to_json(const models::ValidationReport& r) {
  json j;
  j["pass"] = r.all_ok();
  j["antisymmetry"] = {{"ok", r.antisymmetry_ok}, {"residual", r.antisymmetry_residual}};
  j["jacobi"] = {{"ok", r.jacobi_ok}, {"residual", r.jacobi_residual}};
  j["vertical_integrability"] = {{"ok", r.vertical_integrability_ok},
                                 {"residual", r.vertical_integrability_residual}};
  j["bracket_generating"] = {{"ok", r.bracket_generating_ok},
                             {"step", r.bracket_generating_step}};
  j["totally_geodesic"] = {{"ok", r.totally_geodesic_ok}, {"residual", r.totally_geodesic_residual}};
  j["bundle_like"] = {{"ok", r.bundle_like_ok}, {"residual", r.bundle_like_residual}};
  j["yang_mills"] = {{"ok", r.yang_mills_ok}, {"residual", r.yang_mills_residual}};
  j["chart_brackets"] = {{"ok", r.chart_ok}, {"residual", r.chart_residual}};
  return j;
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << std::setprecision(17) << j.dump(2) << "\n";
}

inline void write_margins_csv(const std::string& path, const verify::CheckReport& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "index,margin\n" << std::setprecision(17);
  for (std::size_t i = 0; i < r.margins.size(); ++i) out << i << "," << r.margins[i] << "\n";
}

// Flat little-endian dump: int32 N, float64 eps, float64 t, then N^3 float64
// values in canonical index order.
inline void write_field(const std::string& path, const heat::Field& f, double eps, double t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  std::int32_t N = f.grid->N;
  out.write(reinterpret_cast<const char*>(&N), sizeof(N));
  out.write(reinterpret_cast<const char*>(&eps), sizeof(eps));
  out.write(reinterpret_cast<const char*>(&t), sizeof(t));
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(sizeof(double) * f.values.size()));
}

inline heat::Field read_field(const std::string& path, const heat::NilGrid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::int32_t N = 0;
  double eps = 0.0, t = 0.0;
  in.read(reinterpret_cast<char*>(&N), sizeof(N));
  in.read(reinterpret_cast<char*>(&eps), sizeof(eps));
  in.read(reinterpret_cast<char*>(&t), sizeof(t));
  if (N != grid.N) throw std::runtime_error("field size mismatch in " + path);
  heat::Field f{&grid, Eigen::VectorXd(grid.size())};
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(sizeof(double) * f.values.size()));
  if (!in) throw std::runtime_error("truncated field file " + path);
  return f;
}

// FNV-1a over the canonical config string; stable across runs and platforms.
inline std::string config_hash(const std::string& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : config) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

struct Manifest {
  std::string config;
  std::vector<std::string> report_paths;
  std::vector<double> timings_sec;  // wall clock, excluded from determinism scope

  json to_json() const {
    json j;
    j["config_hash"] = config_hash(config);
    j["version"] = "1.0.0";
    j["reports"] = report_paths;
    j["timings_sec"] = timings_sec;
    return j;
  }
};

}  // namespace folia::report
