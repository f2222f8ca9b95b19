#pragma once

// Transit of the critical orbit through the gate between the two fixed points
// of p^{2k} that appear just outside a parabolic arc.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multicorn/complex.hpp"
#include "multicorn/core.hpp"
#include "multicorn/error.hpp"
#include "multicorn/fatou.hpp"
#include "multicorn/parabolic.hpp"
#include "multicorn/parallel.hpp"
#include "multicorn/periodic.hpp"

namespace multicorn {

/// zeta = scale * (z - center) sends the fixed pair to +-a and the return
/// map to zeta + (zeta^2 - a^2) h(zeta) with h(0) close to 1.
struct GateNormalForm {
  Cplx c;
  int k = 1;
  Cplx a_sq;
  Cplx a;  // root with Im a >= 0
  std::pair<Cplx, Cplx> fixed_points;
  Cplx center;
  Cplx scale;
  Cplx shift;  // center minus the reference parabolic point
  bool degenerate = false;
  PerturbationCase split = PerturbationCase::unresolved;

  Cplx to_gate(Cplx z) const { return scale * (z - center); }
  Cplx from_gate(Cplx zeta) const { return center + zeta / scale; }
};

inline GateNormalForm gate_fit(const MapSpec& m, int k, Cplx z0_ref) {
  GateNormalForm g;
  g.c = m.c;
  g.k = k;
  const Trichotomy t = perturbation_trichotomy(m, k, z0_ref);
  g.split = t.tag;
  if (t.tag == PerturbationCase::parabolic) {
    g.degenerate = true;
    g.fixed_points = {t.z1, t.z1};
    g.center = t.z1;
    g.scale = 0.5 * return_map_jet(m, t.z1, k).d2;
    g.shift = g.center - z0_ref;
    return g;
  }
  // Newton stops near sqrt(eps) of a close pair; polish z1 and, outside the
  // arc where the pair is one p-orbit, take the partner as its image
  Cplx z1 = t.z1, z2 = t.z2;
  for (int it = 0; it < 8; ++it) {
    const Jet2 j = return_map_jet(m, z1, k);
    if (std::abs(j.d1 - 1.0) < 1e-300) break;
    z1 -= (j.value - z1) / (j.d1 - 1.0);
  }
  const Cplx image = iterate(m, z1, k);
  const double scale = 1.0 + std::abs(z1);
  if (std::abs(image - z1) > 1e-7 * std::abs(z1 - t.z2) && std::abs(image - z1) > kDedupTolerance * scale) {
    g.split = PerturbationCase::one_period_2k;
    z2 = image;
  } else if (t.tag == PerturbationCase::unresolved) {
    throw Error(ErrorKind::unresolved, "fixed points not separable at double precision");
  }
  g.center = 0.5 * (z1 + z2);
  g.scale = 0.5 * return_map_jet(m, g.center, k).d2;
  if (std::abs(g.scale) < 1e-12) throw Error(ErrorKind::domain, "gate has no quadratic term");
  g.a = 0.5 * g.scale * (z1 - z2);
  g.a_sq = g.a * g.a;
  if (g.a.imag() < 0.0) {
    g.a = -g.a;
    std::swap(z1, z2);
  }
  g.fixed_points = {z1, z2};
  g.shift = g.center - z0_ref;
  return g;
}

struct TransitRecord {
  double s = 0.0;
  double a_mod = 0.0;
  double phase = kNaN;
  double height = kNaN;
  int iterations = 0;
};

struct TransitOptions {
  double r = 1e-2;        // gate-normal radius of the phase base point
  int budget = 1 << 22;   // return-map iterations per record
  double approach = 0.1;  // the orbit counts as incoming once |zeta| < approach
};

namespace detail {

struct Crossing {
  double phase;
  Cplx exit_point;
  int iterations;
};

// First passage of Re zeta from -r to +r, interpolated at both ends.
inline Crossing gate_crossing(const MapSpec& m, const GateNormalForm& g, const TransitOptions& opt) {
  Cplx z = m.c;
  Cplx prev_zeta = g.to_gate(z);
  double entry = kNaN;
  bool incoming = false;
  const double escape = escape_radius(m);
  for (int n = 1; n <= opt.budget; ++n) {
    z = return_map(m, z, g.k);
    if (!is_finite(z) || std::abs(z) > escape) throw Error(ErrorKind::divergence, "orbit escaped before transit");
    const Cplx zeta = g.to_gate(z);
    if (!incoming && std::abs(zeta) < opt.approach && zeta.real() < -opt.r) incoming = true;
    if (incoming) {
      const double x0 = prev_zeta.real(), x1 = zeta.real();
      if (std::isnan(entry) && x0 < -opt.r && x1 >= -opt.r) entry = (n - 1) + (-opt.r - x0) / (x1 - x0);
      if (!std::isnan(entry) && x0 < opt.r && x1 >= opt.r) {
        const double exit = (n - 1) + (opt.r - x0) / (x1 - x0);
        return {exit - entry, z, n};
      }
    }
    prev_zeta = zeta;
  }
  throw Error(ErrorKind::convergence, "transit budget of " + std::to_string(opt.budget) + " iterations exceeded");
}

}  // namespace detail

/// Phase and outgoing height of the critical orbit for each s on the path;
/// c(0) must be the parabolic parameter, z0_ref its parabolic point.
inline std::vector<TransitRecord> transit_phase(int d, int k, Cplx z0_ref, const std::function<Cplx(double)>& path,
                                                const std::vector<double>& s_values,
                                                const TransitOptions& opt = {}) {
  const MapSpec m0(d, path(0.0));
  const Cplx zc = k == 1 ? z0_ref : characteristic_point(m0, z0_ref, k);
  std::optional<Cplx> iota;
  try {
    iota = fixed_point_index(m0, zc, k).iota;
  } catch (const Error&) {
  }
  const FatouChart out = parabolic_chart(m0, k, zc, ChartDirection::outgoing, iota);
  std::vector<TransitRecord> recs(s_values.size());
  parallel_for(s_values.size(), [&](std::size_t i) {
    const double s = s_values[i];
    if (!(s > 0.0)) throw Error(ErrorKind::invalid_argument, "path parameter must be positive");
    const MapSpec m(d, path(s));
    const GateNormalForm g = gate_fit(m, k, zc);
    if (g.degenerate) throw Error(ErrorKind::domain, "path point lies on the arc");
    const detail::Crossing x = detail::gate_crossing(m, g, opt);
    TransitRecord& r = recs[i];
    r.s = s;
    r.a_mod = std::abs(g.a);
    r.phase = x.phase;
    r.iterations = x.iterations;
    r.height = out(x.exit_point).imag();
  });
  std::sort(recs.begin(), recs.end(), [](const TransitRecord& a, const TransitRecord& b) { return a.s > b.s; });
  return recs;
}

/// Unit normal to the arc at `s` pointing to the side where the p-orbit of
/// period 2k appears.
inline Cplx outside_normal(const ArcSample& s, double probe_offset = 1e-6) {
  using namespace detail;
  const ProbeReport rep = bifurcation_probe(s, {probe_offset});
  if (rep.outside_side == 0) throw Error(ErrorKind::unresolved, "probe found no period-doubling side");
  const Vec4 t = arc_tangent(arc_jacobian(s.d, s.k, pack(s.c, s.z0)), Vec4::Zero());
  const Cplx tc(t[0], t[1]);
  return static_cast<double>(rep.outside_side) * I * tc / std::abs(tc);
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace multicorn
