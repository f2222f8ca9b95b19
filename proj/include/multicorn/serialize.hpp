#pragma once

// Line-oriented tables and JSON documents for arcs, rays, transit records and
// census reports. Numbers are written with 17 significant digits so dumps
// round-trip exactly; NaN becomes "nan" in tables and null in JSON.

#include <cstdio>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "multicorn/census.hpp"
#include "multicorn/parabolic.hpp"
#include "multicorn/rays.hpp"
#include "multicorn/transit.hpp"

namespace multicorn {

inline constexpr int kSchemaVersion = 1;

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string row(std::initializer_list<std::string> cols) {
  std::string out;
  for (const auto& c : cols) {
    if (!out.empty()) out += '\t';
    out += c;
  }
  return out + '\n';
}

inline nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace detail

// arcs

inline std::string arc_tsv(const std::vector<ArcSample>& arc) {
  std::string out = "# arclen\tre_c\tim_c\th\tiota\tq\n";
  for (const auto& s : arc)
    out += detail::row({fmt(s.arclen), fmt(s.c.real()), fmt(s.c.imag()), fmt(s.h), fmt(s.iota), s.cusp ? "2" : "1"});
  return out;
}

inline nlohmann::json to_json(const ArcSample& s) {
  using detail::num;
  return {{"arclen", s.arclen},
          {"c", {s.c.real(), s.c.imag()}},
          {"z0", {s.z0.real(), s.z0.imag()}},
          {"h", num(s.h)},
          {"iota", num(s.iota)},
          {"iota_imag", num(s.iota_imag)},
          {"q", s.cusp ? 2 : 1},
          {"chart_residual", num(s.chart_residual)},
          {"equator_defect", num(s.equator_defect)}};
}

inline nlohmann::json arc_json(const std::vector<ArcSample>& arc, int d, int k) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : arc) samples.push_back(to_json(s));
  return {{"schema_version", kSchemaVersion}, {"d", d}, {"k", k}, {"samples", samples}};
}

// rays

inline std::string ray_tsv(const RayPolyline& ray) {
  std::string out = "# log_potential\tre\tim\tresidual\n";
  for (const auto& p : ray.points)
    out += detail::row({fmt(p.log_potential), fmt(p.z.real()), fmt(p.z.imag()), fmt(p.residual)});
  return out;
}

inline nlohmann::json ray_json(const RayPolyline& ray) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : ray.points) pts.push_back({p.log_potential, p.z.real(), p.z.imag(), detail::num(p.residual)});
  return {{"schema_version", kSchemaVersion},
          {"angle", ray.angle.str()},
          {"kind", to_string(ray.kind)},
          {"base", ray.base ? nlohmann::json{ray.base->c.real(), ray.base->c.imag()} : nlohmann::json(nullptr)},
          {"status", to_string(ray.status)},
          {"columns", {"log_potential", "re", "im", "residual"}},
          {"points", pts}};
}

// transit

inline std::string transit_tsv(const std::vector<TransitRecord>& recs) {
  std::string out = "# s\ta_mod\tpi_over_a\tphase\theight\titerations\n";
  for (const auto& r : recs)
    out += detail::row({fmt(r.s), fmt(r.a_mod), fmt(pi / r.a_mod), fmt(r.phase), fmt(r.height), std::to_string(r.iterations)});
  return out;
}

inline nlohmann::json transit_json(const std::vector<TransitRecord>& recs) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : recs)
    rows.push_back({{"s", r.s},
                    {"a_mod", r.a_mod},
                    {"phase", detail::num(r.phase)},
                    {"height", detail::num(r.height)},
                    {"iterations", r.iterations}});
  return {{"schema_version", kSchemaVersion}, {"records", rows}};
}

// census

inline std::string census_tsv(const std::vector<CensusReport>& reports) {
  std::string out = "# d\tn\tpredicted\tfound\tmatch\n";
  for (const auto& r : reports)
    out += detail::row({std::to_string(r.d), std::to_string(r.n), std::to_string(r.predicted),
                        std::to_string(r.found_centers.size()), r.match ? "true" : "false"});
  return out;
}

inline nlohmann::json to_json(const CensusReport& r) {
  nlohmann::json centers = nlohmann::json::array();
  for (Cplx c : r.found_centers) centers.push_back({c.real(), c.imag()});
  nlohmann::json j = {{"d", r.d},
                      {"n", r.n},
                      {"predicted", r.predicted},
                      {"found", r.found_centers.size()},
                      {"match", r.match},
                      {"centers", centers}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline nlohmann::json census_json(const std::vector<CensusReport>& reports) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : reports) rows.push_back(to_json(r));
  return {{"schema_version", kSchemaVersion}, {"reports", rows}};
}

}  // namespace multicorn
