#pragma once

// Parabolic arcs of odd period k: the curve of (c, z) in R^4 where
// p_c^k(z) = z and the multiplier of p_c^{2k} at z has modulus one.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multicorn/complex.hpp"
#include "multicorn/core.hpp"
#include "multicorn/error.hpp"
#include "multicorn/fatou.hpp"
#include "multicorn/periodic.hpp"

namespace multicorn {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ArcSample {
  int d = 2;
  Cplx c;
  int k = 1;
  Cplx z0;
  double h = kNaN;
  double iota = kNaN;
  double iota_imag = kNaN;
  double arclen = 0.0;
  Cplx a2;           // quadratic coefficient of p^{2k} at z0
  bool cusp = false;  // multiplicity 2 reached
  double chart_residual = kNaN;
  double equator_defect = kNaN;
};

/// Period-1 arcs in closed form: z0 = r e^{i theta}, r = d^{-1/(d-1)}.
inline std::pair<Cplx, Cplx> main_arc_closed_form(int d, double theta) {
  if (d < 2) throw Error(ErrorKind::invalid_argument, "degree must be >= 2");
  const Cplx z0 = std::polar(std::pow(static_cast<double>(d), -1.0 / (d - 1)), theta);
  return {z0 - ipow(std::conj(z0), d), z0};
}

/// Distance from (c, z0) to the closed-form period-1 arc at angle arg z0.
inline double main_arc_deviation(int d, Cplx c, Cplx z0) {
  const auto [cc, zz] = main_arc_closed_form(d, std::arg(z0));
  return std::max(std::abs(c - cc), std::abs(z0 - zz));
}

/// Germ p^{2k} at z0 with p^k as the half map; the inverse is Newton on the
/// holomorphic return map started from the series inverse.
inline ParabolicGerm polynomial_germ(const MapSpec& m, Cplx z0, int k, std::size_t order = 28) {
  ParabolicGerm g;
  g.z0 = z0;
  g.taylor = return_map_taylor(m, z0, k, order);
  g.forward = [m, k](Cplx z) { return return_map(m, z, k); };
  g.half = [m, k](Cplx z) { return iterate(m, z, k); };
  Series<Cplx> s = g.taylor;
  s[0] = 0.0;
  s[1] = 1.0;
  Series<Cplx> rev(std::min<std::size_t>(order, 10));
  for (std::size_t i = 0; i <= rev.order(); ++i) rev[i] = s[i];
  rev = rev.reversion();
  g.inverse = [m, k, z0, rev](Cplx w) {
    Cplx y = z0 + rev(w - z0);
    for (int it = 0; it < 60; ++it) {
      const Jet2 j = return_map_jet(m, y, k);
      const Cplx delta = (j.value - w) / j.d1;
      y -= delta;
      if (std::abs(delta) < 1e-16 * (1.0 + std::abs(y))) break;
    }
    if (std::abs(return_map(m, y, k) - w) > 1e-12 * (1.0 + std::abs(w)))
      throw Error(ErrorKind::convergence, "inverse branch did not converge");
    return y;
  };
  return g;
}

/// Point of the p-cycle of z0 whose basin under p^{2k} holds the critical value.
inline Cplx characteristic_point(const MapSpec& m, Cplx z0, int k, int iterations = 4000) {
  std::vector<Cplx> cycle{z0};
  for (int j = 1; j < k; ++j) cycle.push_back(multicorn::apply(m, cycle.back()));
  Cplx v = m.c;
  for (int j = 0; j < iterations; ++j) {
    v = return_map(m, v, k);
    if (!is_finite(v)) throw Error(ErrorKind::domain, "critical orbit escaped");
  }
  return *std::min_element(cycle.begin(), cycle.end(),
                           [&](Cplx a, Cplx b) { return std::abs(a - v) < std::abs(b - v); });
}

/// Equator-normalized chart at z0; for simple parabolics the log term is
/// tied to the contour index (b = 1 - iota).
inline FatouChart parabolic_chart(const MapSpec& m, int k, Cplx z0, ChartDirection dir,
                                  std::optional<Cplx> iota = std::nullopt) {
  const ParabolicGerm g = polynomial_germ(m, z0, k);
  ChartOptions opt;
  std::optional<Cplx> log_coeff;
  if (iota) {
    log_coeff = 1.0 - *iota;
    // the expansion is good on a disk shrinking like 1/iota near a cusp
    opt.depth = std::min(opt.depth, 0.2 / std::max(1.0, std::abs(*iota)));
  }
  return fatou_chart(g, dir, log_coeff, opt);
}

struct HeightResult {
  double h = kNaN;
  Cplx phi;
  Cplx characteristic;
  double functional_residual = kNaN;
  double equator_defect = kNaN;
};

/// Imaginary part of the incoming coordinate of the critical value.
inline HeightResult ecalle_height(const MapSpec& m, int k, Cplx z0,
                                  std::optional<Cplx> iota = std::nullopt) {
  HeightResult r;
  r.characteristic = k == 1 ? z0 : characteristic_point(m, z0, k);
  if (!iota || std::abs(r.characteristic - z0) > 1e-12) {
    try {
      iota = fixed_point_index(m, r.characteristic, k).iota;
    } catch (const Error&) {
      iota.reset();
    }
  }
  const FatouChart ch = parabolic_chart(m, k, r.characteristic, ChartDirection::incoming, iota);
  r.phi = ch(m.c);
  r.h = r.phi.imag();
  r.functional_residual = ch.functional_residual;
  r.equator_defect = ch.equator_defect;
  return r;
}

namespace detail {

using Vec4 = Eigen::Vector4d;
using Vec3 = Eigen::Vector3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

inline Vec4 pack(Cplx c, Cplx z) { return {c.real(), c.imag(), z.real(), z.imag()}; }
inline Cplx c_of(const Vec4& x) { return {x[0], x[1]}; }
inline Cplx z_of(const Vec4& x) { return {x[2], x[3]}; }

inline Vec3 arc_residual(int d, int k, const Vec4& x) {
  const MapSpec m(d, c_of(x));
  const Cplx z = z_of(x);
  const Cplx r = iterate(m, z, k) - z;
  const Cplx rho = return_map_jet(m, z, k).d1;
  return {r.real(), r.imag(), std::abs(rho) - 1.0};
}

inline Mat34 arc_jacobian(int d, int k, const Vec4& x) {
  Mat34 J;
  for (int i = 0; i < 4; ++i) {
    const double h = 1e-7 * std::max(1.0, std::abs(x[i]));
    Vec4 xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    J.col(i) = (arc_residual(d, k, xp) - arc_residual(d, k, xm)) / (2.0 * h);
  }
  return J;
}

inline Vec4 arc_tangent(const Mat34& J, const Vec4& prev) {
  Eigen::FullPivLU<Mat34> lu(J);
  Eigen::MatrixXd ker = lu.kernel();
  Vec4 t = ker.col(0);
  t.normalize();
  if (t.dot(prev) < 0.0) t = -t;
  return t;
}

/// Minimum-norm Newton onto the arc.
inline std::optional<Vec4> project_to_arc(int d, int k, Vec4 x, int max_steps = 40) {
  for (int it = 0; it < max_steps; ++it) {
    const Vec3 F = arc_residual(d, k, x);
    if (!F.allFinite()) return std::nullopt;
    if (F.norm() < 1e-14 * (1.0 + x.norm())) return x;
    const Mat34 J = arc_jacobian(d, k, x);
    const Eigen::Matrix3d JJt = J * J.transpose();
    const Vec3 y = JJt.fullPivLu().solve(F);
    const Vec4 step = J.transpose() * y;
    if (!step.allFinite()) return std::nullopt;
    x -= step;
    if (step.norm() < 1e-16 * (1.0 + x.norm())) {
      if (arc_residual(d, k, x).norm() < 1e-11) return x;
      return std::nullopt;
    }
  }
  if (arc_residual(d, k, x).norm() < 1e-11) return x;
  return std::nullopt;
}

inline Cplx arc_a2(int d, int k, const Vec4& x) {
  return 0.5 * return_map_jet(MapSpec(d, c_of(x)), z_of(x), k).d2;
}

}  // namespace detail

struct SampleOptions {
  bool with_height = true;
};

/// Fills index, quadratic coefficient and (optionally) height for a point on
/// the arc. Failures of the height computation leave h as NaN.
inline ArcSample make_sample(int d, int k, Cplx c, Cplx z0, double arclen, const SampleOptions& opt = {}) {
  ArcSample s;
  s.d = d;
  s.k = k;
  s.c = c;
  s.z0 = z0;
  s.arclen = arclen;
  const MapSpec m(d, c);
  s.a2 = 0.5 * return_map_jet(m, z0, k).d2;
  s.cusp = std::abs(s.a2) < kCuspQuadraticThreshold;
  std::optional<Cplx> iota;
  try {
    const IndexValue v = fixed_point_index(m, z0, k);
    iota = v.iota;
    s.iota = v.iota.real();
    s.iota_imag = v.iota.imag();
  } catch (const Error&) {
  }
  if (opt.with_height) {
    try {
      const HeightResult h = ecalle_height(m, k, z0, s.cusp ? std::nullopt : iota);
      s.h = h.h;
      s.chart_residual = h.functional_residual;
      s.equator_defect = h.equator_defect;
    } catch (const Error&) {
    }
  }
  return s;
}

/// Marches from a hyperbolic center along `direction` while the tracked
/// cycle stays attracting with p-period k, then bisects to |multiplier| = 1.
/// Returns (c, z) close to a parabolic parameter.
inline std::pair<Cplx, Cplx> seed_from_center(int d, int k, Cplx center, Cplx direction,
                                              double max_distance = 4.0) {
  direction /= std::abs(direction);
  auto track = [&](double t, Cplx z_prev) -> std::optional<Cplx> {
    const MapSpec m(d, center + t * direction);
    try {
      const Cplx z = newton_refine(m, z_prev, k, 200);
      if (std::abs(z - z_prev) > 0.25) return std::nullopt;
      if (std::abs(iterate(m, z, k) - z) > 1e-8 * (1.0 + std::abs(z))) return std::nullopt;
      if (std::abs(return_map_jet(m, z, k).d1) >= 1.0) return std::nullopt;
      return z;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  Cplx z = 0.0;
  if (!track(0.0, z)) throw Error(ErrorKind::domain, "seed center has no attracting k-cycle at 0");
  double lo = 0.0, hi = -1.0, step = 1e-3;
  while (lo < max_distance) {
    const double t = lo + step;
    if (auto zt = track(t, z)) {
      lo = t;
      z = *zt;
      step = std::min(step * 2.0, 2e-2);
    } else {
      hi = t;
      break;
    }
  }
  if (hi < 0.0) throw Error(ErrorKind::domain, "no boundary found along the seed direction");
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (auto zt = track(mid, z)) {
      lo = mid;
      z = *zt;
    } else {
      hi = mid;
    }
  }
  return {center + lo * direction, z};
}

/// Projects a seed onto the arc and fills the sample.
inline ArcSample solve_parabolic(const MapSpec& seed, int k, Cplx z_seed, const SampleOptions& opt = {}) {
  if (k < 1 || k % 2 == 0) throw Error(ErrorKind::invalid_argument, "arc period must be odd");
  const auto x = detail::project_to_arc(seed.d, k, detail::pack(seed.c, z_seed), 80);
  if (!x) throw Error(ErrorKind::convergence, "parabolic system did not converge");
  return make_sample(seed.d, k, detail::c_of(*x), detail::z_of(*x), 0.0, opt);
}

struct TraceOptions {
  int max_steps = 400;
  double initial_step = 1e-3;
  double max_step = 2e-2;
  double min_step = 1e-12;
  SampleOptions sample;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Pseudo-arclength continuation from `start` in direction sign (+1 or -1).
/// Stops at the step budget or when the quadratic coefficient vanishes (cusp).
inline std::vector<ArcSample> trace_arc(const ArcSample& start, int sign, const TraceOptions& opt = {}) {
  using namespace detail;
  const int d = start.d, k = start.k;
  std::vector<ArcSample> out;
  Vec4 x = pack(start.c, start.z0);
  Mat34 J = arc_jacobian(d, k, x);
  Vec4 tau = arc_tangent(J, Vec4::Zero());
  // orient: sign +1 follows increasing arg z0 for period 1
  {
    const Cplx dz(tau[2], tau[3]);
    const double turn = (dz / (start.z0 == Cplx(0.0, 0.0) ? Cplx(1.0, 0.0) : start.z0)).imag();
    if ((turn < 0.0) == (sign > 0)) tau = -tau;
  }
  Cplx a2_prev = arc_a2(d, k, x);
  double s = opt.initial_step;
  double arclen = start.arclen;
  for (int step = 0; step < opt.max_steps; ++step) {
    if (opt.deadline && std::chrono::steady_clock::now() > *opt.deadline)
      throw Error(ErrorKind::time_budget, "arc tracing exceeded its time budget");
    bool accepted = false;
    while (!accepted) {
      if (s < opt.min_step) {
        if (!out.empty()) out.back().cusp = out.back().cusp || std::abs(out.back().a2) < 1e-3;
        return out;
      }
      Vec4 y = x + s * tau;
      bool ok = false;
      for (int it = 0; it < 12; ++it) {
        const Vec3 F = arc_residual(d, k, y);
        Eigen::Matrix4d G;
        G.topRows<3>() = arc_jacobian(d, k, y);
        G.row(3) = tau.transpose();
        Eigen::Vector4d rhs;
        rhs.head<3>() = F;
        rhs[3] = tau.dot(y - x) - s;
        if (!rhs.allFinite()) break;
        if (F.norm() < 1e-14 * (1.0 + y.norm()) && std::abs(rhs[3]) < 1e-14) {
          ok = true;
          break;
        }
        const Eigen::Vector4d delta = G.fullPivLu().solve(rhs);
        if (!delta.allFinite() || delta.norm() > 0.5 * s + 1e-12) break;
        y -= delta;
        if (delta.norm() < 1e-15 * (1.0 + y.norm())) {
          ok = arc_residual(d, k, y).norm() < 1e-12;
          break;
        }
      }
      if (!ok) {
        s *= 0.5;
        continue;
      }
      const Cplx a2 = arc_a2(d, k, y);
      if ((a2 * std::conj(a2_prev)).real() < 0.0) {
        // stepped over the cusp
        s *= 0.5;
        continue;
      }
      accepted = true;
      arclen += sign * (y - x).norm();
      const Vec4 prev = x;
      x = y;
      J = arc_jacobian(d, k, x);
      tau = arc_tangent(J, x - prev);
      a2_prev = a2;
      ArcSample smp = make_sample(d, k, c_of(x), z_of(x), arclen, opt.sample);
      out.push_back(smp);
      if (smp.cusp) return out;
      s = std::min(opt.max_step, s * 1.5);
    }
  }
  return out;
}

/// Both directions from `start`, ordered by arclen.
inline std::vector<ArcSample> trace_full_arc(const ArcSample& start, const TraceOptions& opt = {}) {
  auto back = trace_arc(start, -1, opt);
  auto fwd = trace_arc(start, +1, opt);
  std::vector<ArcSample> arc(back.rbegin(), back.rend());
  arc.push_back(start);
  arc.insert(arc.end(), fwd.begin(), fwd.end());
  return arc;
}

struct IndexCrossing {
  double arclen;
  Cplx c;
  double h;
};

struct IndexProfile {
  std::vector<std::pair<double, double>> points;  // (h, iota)
  std::vector<IndexCrossing> crossings;
  bool h_monotone = true;
  int h_zero_crossings = 0;
  double iota_at_h_zero = kNaN;
  // largest index on each side of the seed, cusp samples excluded
  double iota_peak_before = kNaN;
  double iota_peak_after = kNaN;
};

inline IndexProfile index_profile(const std::vector<ArcSample>& arc) {
  using namespace detail;
  IndexProfile p;
  const ArcSample* last = nullptr;
  double dir = 0.0;
  for (const auto& s : arc) {
    p.points.emplace_back(s.h, s.iota);
    if (!s.cusp && !std::isnan(s.iota)) {
      double& peak = s.arclen < 0.0 ? p.iota_peak_before : p.iota_peak_after;
      if (std::isnan(peak) || s.iota > peak) peak = s.iota;
    }
    if (std::isnan(s.h)) continue;
    if (last) {
      const double dh = s.h - last->h;
      if (dir == 0.0) dir = dh > 0 ? 1.0 : -1.0;
      if (dh * dir <= 0.0) p.h_monotone = false;
      if ((last->h < 0.0) != (s.h < 0.0)) {
        ++p.h_zero_crossings;
        const double t = last->h / (last->h - s.h);
        p.iota_at_h_zero = last->iota + t * (s.iota - last->iota);
      }
    }
    if (s.h == 0.0) p.iota_at_h_zero = s.iota;
    last = &s;
  }
  for (std::size_t i = 1; i < arc.size(); ++i) {
    const ArcSample& a = arc[i - 1];
    const ArcSample& b = arc[i];
    if (std::isnan(a.iota) || std::isnan(b.iota) || (a.iota - 1.0) * (b.iota - 1.0) > 0.0) continue;
    const Vec4 xa = pack(a.c, a.z0), xb = pack(b.c, b.z0);
    double lo = 0.0, hi = 1.0;
    Vec4 at = xa;
    const double sign_lo = a.iota - 1.0;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      const auto y = project_to_arc(a.d, a.k, xa + mid * (xb - xa));
      if (!y) break;
      at = *y;
      double iota;
      try {
        iota = fixed_point_index(MapSpec(a.d, c_of(*y)), z_of(*y), a.k).iota.real();
      } catch (const Error&) {
        break;
      }
      ((iota - 1.0) * sign_lo > 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    double h = kNaN;
    if (!std::isnan(a.h) && !std::isnan(b.h)) h = a.h + t * (b.h - a.h);
    p.crossings.push_back({a.arclen + t * (b.arclen - a.arclen), c_of(at), h});
  }
  return p;
}

struct ProbeEntry {
  double offset;
  int side;  // +1 along i * tangent, -1 opposite
  Trichotomy result;
  bool attracting_2k = false;
};

struct ProbeReport {
  std::vector<ProbeEntry> entries;
  int outside_side = 0;  // side producing the period-2k orbit
  bool consistent = true;  // outside attraction agrees with iota > 1, inside pair is attracting/repelling
};

/// Runs the perturbation trichotomy on both sides of the arc at `sample`.
inline ProbeReport bifurcation_probe(const ArcSample& sample, const std::vector<double>& offsets) {
  using namespace detail;
  const Vec4 x = pack(sample.c, sample.z0);
  const Vec4 t = arc_tangent(arc_jacobian(sample.d, sample.k, x), Vec4::Zero());
  Cplx tc(t[0], t[1]);
  if (std::abs(tc) < 1e-12) throw Error(ErrorKind::domain, "arc tangent has no parameter component");
  const Cplx normal = I * tc / std::abs(tc);
  ProbeReport rep;
  for (double off : offsets) {
    for (int side : {+1, -1}) {
      ProbeEntry e;
      e.offset = off;
      e.side = side;
      const MapSpec m(sample.d, sample.c + static_cast<double>(side) * off * normal);
      e.result = perturbation_trichotomy(m, sample.k, sample.z0);
      if (e.result.tag == PerturbationCase::one_period_2k) {
        e.attracting_2k = std::abs(e.result.rho1) < 1.0;
        if (rep.outside_side == 0) rep.outside_side = side;
        if (rep.outside_side != side) rep.consistent = false;
        if (!std::isnan(sample.iota) && e.attracting_2k != (sample.iota > 1.0)) rep.consistent = false;
      } else if (e.result.tag == PerturbationCase::two_period_k) {
        const double r1 = std::abs(e.result.rho1), r2 = std::abs(e.result.rho2);
        if (!(std::min(r1, r2) < 1.0 && std::max(r1, r2) > 1.0)) rep.consistent = false;
      } else {
        rep.consistent = false;
      }
      rep.entries.push_back(e);
    }
  }
  return rep;
}

}  // namespace multicorn
