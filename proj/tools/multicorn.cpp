// Batch front end: render, census, arc, ray and transit subcommands.
// Exit codes: 0 success, 2 verification mismatch, 3 numerical failure.

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>

#include "multicorn/arc_seed.hpp"
#include "multicorn/census.hpp"
#include "multicorn/raster.hpp"
#include "multicorn/rays.hpp"
#include "multicorn/serialize.hpp"
#include "multicorn/transit.hpp"

using namespace multicorn;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kMismatch = 2, kNumerical = 3;

Cplx parse_complex(const std::string& text) {
  const auto comma = text.find(',');
  auto part = [&](std::size_t b, std::size_t e) {
    double x = 0.0;
    const auto [end, ec] = std::from_chars(text.data() + b, text.data() + e, x);
    if (ec != std::errc() || end != text.data() + e || b == e)
      throw Error(ErrorKind::invalid_argument, "expected re,im but got '" + text + "'");
    return x;
  };
  if (comma == std::string::npos) return {part(0, text.size()), 0.0};
  return {part(0, comma), part(comma + 1, text.size())};
}

void emit(bool as_json, const json& j, const std::string& table) {
  if (as_json) std::cout << j.dump(2) << "\n";
  else std::cout << table;
}

struct RenderArgs {
  int d = 2;
  std::string center = "0,0";
  double width = 4.0;
  int px = 512;
  int py = 0;
  int max_iter = 500;
  std::string out = "multicorn.ppm";
  std::string julia;
  std::vector<std::string> rays;
  double ray_pot_min = -8.0;
  std::string overlay;
  bool grayscale = false;
  bool json = false;
};

int cmd_render(const RenderArgs& a) {
  const Viewport vp{parse_complex(a.center), a.width, a.px, a.py > 0 ? a.py : a.px};
  const PixelGrid g = a.julia.empty() ? render_multicorn(a.d, vp, a.max_iter)
                                      : render_julia(MapSpec(a.d, parse_complex(a.julia)), vp, a.max_iter);
  write_ppm(g, a.grayscale ? Palette::grayscale() : Palette::standard(), a.out);

  std::vector<OverlayItem> items;
  RayOptions opt;
  opt.log_pot_min = std::log(10.0) * a.ray_pot_min;
  for (const auto& text : a.rays) {
    const RationalAngle angle = parse_angle(text);
    const RayPolyline ray = a.julia.empty() ? parameter_ray(angle, a.d, opt)
                                            : dynamic_ray(MapSpec(a.d, parse_complex(a.julia)), angle, opt);
    OverlayItem it{"ray", angle.str(), {}};
    for (const auto& p : ray.points) it.points.push_back(p.z);
    items.push_back(std::move(it));
  }
  if (!a.overlay.empty()) {
    std::ofstream f(a.overlay);
    f << export_overlay(items, vp).dump() << "\n";
    if (!f) throw Error(ErrorKind::invalid_argument, "cannot write " + a.overlay);
  }

  std::array<int, 13> periods{};
  int escaped = 0;
  for (std::size_t i = 0; i < g.escaped.size(); ++i) {
    if (g.escaped[i]) ++escaped;
    else ++periods[static_cast<std::size_t>(std::min(g.period[i], 12))];
  }
  json j = {{"schema_version", kSchemaVersion}, {"out", a.out}, {"viewport", viewport_json(vp)}, {"escaped", escaped}};
  std::string table = "# out\t" + a.out + "\n# escaped\t" + std::to_string(escaped) + "\n";
  for (int p = 0; p <= 12; ++p) {
    if (!periods[p]) continue;
    j["period_pixels"][std::to_string(p)] = periods[p];
    table += "# period " + std::to_string(p) + "\t" + std::to_string(periods[p]) + "\n";
  }
  emit(a.json, j, table);
  return kOk;
}

int cmd_census(int d, int n_max, bool as_json) {
  std::vector<CensusReport> reps;
  for (int n = 1; n <= n_max; ++n) reps.push_back(census_verify(d, n));
  emit(as_json, census_json(reps), census_tsv(reps));
  bool ok = true;
  for (const auto& r : reps) {
    if (r.match) continue;
    ok = false;
    std::cerr << "mismatch d=" << r.d << " n=" << r.n << ": " << r.note << "\n";
  }
  return ok ? kOk : kMismatch;
}

int cmd_arc(int d, int k, int seed, int steps, bool with_height, bool as_json) {
  TraceOptions opt;
  opt.max_steps = steps;
  opt.sample.with_height = with_height;
  const auto arc = trace_full_arc(seed_arc(d, k, seed, opt.sample), opt);
  const IndexProfile prof = index_profile(arc);

  double deviation = 0.0;
  if (k == 1)
    for (const auto& s : arc) deviation = std::max(deviation, main_arc_deviation(d, s.c, s.z0));
  const double iota_first = prof.iota_peak_before, iota_last = prof.iota_peak_after;
  const bool to_infinity = iota_first > 10.0 && iota_last > 10.0;

  json j = arc_json(arc, d, k);
  j["seed"] = seed;
  j["iota_end_peaks"] = {detail::num(iota_first), detail::num(iota_last)};
  j["iota_tends_to_infinity"] = to_infinity;
  j["iota_one_crossings"] = json::array();
  std::string table = arc_tsv(arc);
  for (const auto& x : prof.crossings) {
    j["iota_one_crossings"].push_back({{"arclen", x.arclen}, {"c", {x.c.real(), x.c.imag()}}, {"h", x.h}});
    table += "# iota=1 crossing\t" + fmt(x.arclen) + "\t" + fmt(x.c.real()) + "\t" + fmt(x.c.imag()) + "\t" + fmt(x.h) + "\n";
  }
  table += "# iota end peaks\t" + fmt(iota_first) + "\t" + fmt(iota_last) + (to_infinity ? "\ttends to infinity\n" : "\n");
  if (with_height) {
    j["iota_at_h_zero"] = detail::num(prof.iota_at_h_zero);
    table += "# iota at h=0\t" + fmt(prof.iota_at_h_zero) + "\n";
  }
  if (k == 1) {
    j["oracle_deviation"] = deviation;
    table += "# oracle deviation\t" + fmt(deviation) + "\n";
  }
  emit(as_json, j, table);
  return k == 1 && deviation > 1e-9 ? kMismatch : kOk;
}

struct RayArgs {
  std::string angle;
  std::string kind = "parameter";
  std::string c;
  int d = 2;
  double pot_min = -8.0;
  int steps = 16;
  bool wiggle = false;
  bool json = false;
};

int cmd_ray(const RayArgs& a) {
  const RationalAngle angle = parse_angle(a.angle);
  RayOptions opt;
  opt.log_pot_min = std::log(10.0) * a.pot_min;
  opt.steps = a.steps;
  RayPolyline ray;
  if (a.kind == "parameter") {
    ray = parameter_ray(angle, a.d, opt);
  } else if (a.kind == "dynamic") {
    if (a.c.empty()) throw Error(ErrorKind::invalid_argument, "dynamic rays need --c");
    ray = dynamic_ray(MapSpec(a.d, parse_complex(a.c)), angle, opt);
  } else {
    throw Error(ErrorKind::invalid_argument, "--kind must be parameter or dynamic");
  }
  json j = ray_json(ray);
  j["period"] = angle_period(angle, a.d);
  std::string table = ray_tsv(ray) + "# status\t" + to_string(ray.status) + "\n";
  if (a.wiggle) {
    const int k = angle_period(angle, a.d);
    if (a.kind != "parameter" || k % 2 == 0)
      throw Error(ErrorKind::invalid_argument, "wiggle report needs a parameter ray of odd period");
    TraceOptions to;
    to.sample.with_height = false;
    const WiggleReport w = accumulation_diagnostic(ray, arc_facing(a.d, k, ray.points.back().z, to));
    j["wiggle"] = {{"count", w.wiggle_count}, {"span", w.span}, {"final_distance", w.final_distance}};
    table += "# wiggles\t" + std::to_string(w.wiggle_count) + "\n# span\t" + fmt(w.span) + "\n# final distance\t" +
             fmt(w.final_distance) + "\n";
  }
  emit(a.json, j, table);
  return kOk;
}

struct TransitArgs {
  int d = 2;
  int k = 1;
  int seed = 0;
  double s_max = 1e-3;
  double s_min = 1e-9;
  double r = 1e-2;
  int budget = 1 << 22;
  bool json = false;
};

int cmd_transit(const TransitArgs& a) {
  if (!(a.s_max >= a.s_min && a.s_min > 0.0)) throw Error(ErrorKind::invalid_argument, "need s_max >= s_min > 0");
  const ArcSample base = seed_arc(a.d, a.k, a.seed);
  const Cplx normal = outside_normal(base);
  std::vector<double> s;
  for (double x = a.s_max; x >= a.s_min; x /= 2) s.push_back(x);
  TransitOptions opt;
  opt.r = a.r;
  opt.budget = a.budget;
  const auto recs = transit_phase(a.d, a.k, base.z0, [&](double t) { return base.c + t * normal; }, s, opt);

  bool monotone = true;
  for (std::size_t i = 1; i < recs.size(); ++i) monotone = monotone && recs[i].phase > recs[i - 1].phase;
  std::vector<double> x, y;
  for (const auto& r : recs) {
    if (r.s > 10.0 * recs.back().s) continue;
    x.push_back(pi / r.a_mod);
    y.push_back(r.phase);
  }
  const double slope = x.size() >= 2 ? fit_slope(x, y) : kNaN;
  const double height_gap = std::abs(recs.back().height - base.h);

  json j = transit_json(recs);
  j["slope"] = detail::num(slope);
  j["monotone"] = monotone;
  j["arc_height"] = base.h;
  j["height_gap"] = height_gap;
  std::string table = transit_tsv(recs) + "# slope over last decade\t" + fmt(slope) + "\n# monotone\t" +
                      (monotone ? "true" : "false") + "\n# arc height\t" + fmt(base.h) + "\n# height gap\t" +
                      fmt(height_gap) + "\n";
  emit(a.json, j, table);
  return std::abs(slope - 1.0) <= 0.1 && monotone ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Antiholomorphic unicritical dynamics: multicorns, parabolic arcs, rays"};
  app.require_subcommand(1);

  RenderArgs ra;
  auto* render = app.add_subcommand("render", "Render the multicorn or a Julia set to PPM");
  render->add_option("--d", ra.d, "Degree")->check(CLI::Range(2, 64));
  render->add_option("--center", ra.center, "Viewport center as re,im");
  render->add_option("--width", ra.width, "Viewport width")->check(CLI::PositiveNumber);
  render->add_option("--px", ra.px, "Pixels across")->check(CLI::Range(1, 16384));
  render->add_option("--py", ra.py, "Pixels down (default: --px)")->check(CLI::Range(0, 16384));
  render->add_option("--max-iter", ra.max_iter, "Iteration budget")->check(CLI::Range(1, 10000000));
  render->add_option("--out", ra.out, "Output PPM path");
  render->add_option("--julia", ra.julia, "Render the filled Julia set of this c (re,im)");
  render->add_option("--ray", ra.rays, "External ray angle p/q to overlay (repeatable)");
  render->add_option("--ray-pot-min", ra.ray_pot_min, "log10 of the smallest ray potential");
  render->add_option("--overlay", ra.overlay, "Write overlay JSON here");
  render->add_flag("--grayscale", ra.grayscale, "Grayscale palette");
  render->add_flag("--json", ra.json, "JSON summary");

  int census_d = 2, n_max = 4;
  bool census_json_flag = false;
  auto* census = app.add_subcommand("census", "Count hyperbolic components and verify their centers");
  census->add_option("--d", census_d, "Degree")->check(CLI::Range(2, 64));
  census->add_option("--n-max", n_max, "Largest period")->check(CLI::Range(1, 16));
  census->add_flag("--json", census_json_flag, "JSON output");

  int arc_d = 2, arc_k = 1, arc_seed = 0, arc_steps = 400;
  bool arc_no_height = false, arc_json_flag = false;
  auto* arc = app.add_subcommand("arc", "Trace a parabolic arc with heights and indices");
  arc->add_option("--d", arc_d, "Degree")->check(CLI::Range(2, 64));
  arc->add_option("--k", arc_k, "Odd period of the arc")->check(CLI::Range(1, 15));
  arc->add_option("--seed-center", arc_seed, "Seed index (mid-arc for k=1, census center for k>1)")
      ->check(CLI::NonNegativeNumber);
  arc->add_option("--steps", arc_steps, "Continuation steps per direction")->check(CLI::Range(1, 100000));
  arc->add_flag("--no-height", arc_no_height, "Skip Ecalle heights");
  arc->add_flag("--json", arc_json_flag, "JSON output");

  RayArgs ya;
  auto* ray = app.add_subcommand("ray", "Trace a dynamic or parameter ray");
  ray->add_option("--angle", ya.angle, "Angle p/q")->required();
  ray->add_option("--kind", ya.kind, "parameter or dynamic")->check(CLI::IsMember({"parameter", "dynamic"}));
  ray->add_option("--c", ya.c, "Parameter re,im for dynamic rays");
  ray->add_option("--d", ya.d, "Degree")->check(CLI::Range(2, 64));
  ray->add_option("--pot-min", ya.pot_min, "log10 of the smallest potential")->check(CLI::Range(-300.0, 1.0));
  ray->add_option("--steps", ya.steps, "Samples per factor d of potential")->check(CLI::Range(1, 1000));
  ray->add_flag("--wiggle", ya.wiggle, "Report oscillation against the arc the ray approaches");
  ray->add_flag("--json", ya.json, "JSON output");

  TransitArgs ta;
  auto* transit = app.add_subcommand("transit", "Ecalle phase through the gate along a transversal path");
  transit->add_option("--d", ta.d, "Degree")->check(CLI::Range(2, 64));
  transit->add_option("--k", ta.k, "Odd period of the arc")->check(CLI::Range(1, 15));
  transit->add_option("--seed-center", ta.seed, "Seed index")->check(CLI::NonNegativeNumber);
  transit->add_option("--s-max", ta.s_max, "Largest distance from the arc")->check(CLI::PositiveNumber);
  transit->add_option("--s-min", ta.s_min, "Smallest distance from the arc")->check(CLI::PositiveNumber);
  transit->add_option("--r", ta.r, "Phase base point in gate coordinates")->check(CLI::PositiveNumber);
  transit->add_option("--budget", ta.budget, "Iterations per record")->check(CLI::Range(1, 1 << 30));
  transit->add_flag("--json", ta.json, "JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*render) return cmd_render(ra);
    if (*census) return cmd_census(census_d, n_max, census_json_flag);
    if (*arc) return cmd_arc(arc_d, arc_k, arc_seed, arc_steps, !arc_no_height, arc_json_flag);
    if (*ray) return cmd_ray(ya);
    if (*transit) return cmd_transit(ta);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::invalid_argument ? 1 : kNumerical;
  }
  return kOk;
}
