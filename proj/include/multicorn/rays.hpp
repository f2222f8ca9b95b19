#pragma once

// External rays of p_c(z) = conj(z)^d + c. The Boettcher coordinate satisfies
// phi(p(z)) = conj(phi(z))^d, so angles move by theta -> -d theta (mod 1).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "multicorn/complex.hpp"
#include "multicorn/core.hpp"
#include "multicorn/error.hpp"
#include "multicorn/parabolic.hpp"

namespace multicorn {

struct RationalAngle {
  std::int64_t num = 0;
  std::int64_t den = 1;

  RationalAngle() = default;
  RationalAngle(std::int64_t n, std::int64_t d) {
    if (d <= 0) throw Error(ErrorKind::invalid_argument, "angle denominator must be positive");
    n %= d;
    if (n < 0) n += d;
    const std::int64_t g = std::gcd(n, d);
    num = n / g;
    den = d / g;
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  bool operator==(const RationalAngle&) const = default;
  bool operator<(const RationalAngle& o) const { return num * o.den < o.num * den; }
};

/// Parses "p/q" (or a bare integer); anything else is invalid_argument.
inline RationalAngle parse_angle(const std::string& s) {
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const long long n = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {n, 1};
    }
    const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    const long long n = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    const long long d = std::stoll(b, &used);
    if (used != b.size()) throw std::invalid_argument(s);
    return {n, d};
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_argument, "bad angle '" + s + "', expected p/q");
  }
}

inline RationalAngle angle_map(const RationalAngle& a, int d) {
  // den < 2^62 / d keeps the product exact
  return {-static_cast<std::int64_t>(d) * a.num, a.den};
}

/// Exact period under angle_map, 0 when strictly preperiodic.
inline int angle_period(const RationalAngle& a, int d) {
  std::map<RationalAngle, int> seen;
  RationalAngle x = a;
  for (int n = 0;; ++n) {
    const auto [it, fresh] = seen.emplace(x, n);
    if (!fresh) return it->second == 0 ? n : 0;
    x = angle_map(x, d);
  }
}

enum class RayKind { dynamic, parameter };
enum class RayStatus { ok, truncated_precision, escaped_budget };

inline const char* to_string(RayKind k) { return k == RayKind::dynamic ? "dynamic" : "parameter"; }
inline const char* to_string(RayStatus s) {
  switch (s) {
    case RayStatus::ok: return "ok";
    case RayStatus::truncated_precision: return "truncated_precision";
    case RayStatus::escaped_budget: return "escaped_budget";
  }
  return "?";
}

struct RayPoint {
  Cplx z;
  double log_potential;  // potentials far below the double range stay representable
  double residual = 0.0;

  double potential() const { return std::exp(log_potential); }
};

struct RayPolyline {
  RationalAngle angle;
  RayKind kind = RayKind::dynamic;
  std::optional<MapSpec> base;
  std::vector<RayPoint> points;
  RayStatus status = RayStatus::ok;
};

struct RayOptions {
  double log_pot_max = std::log(30.0);  // |z| ~ e^30, where phi is the identity to double precision
  double log_pot_min = std::log(1e-8);
  int steps = 16;                       // samples per factor d of potential
  int budget = 200000;                  // samples
  double branch_ratio = 0.4;
  double escape_log_radius = std::log(1e6);  // where the orbit is read off the circle
};

namespace detail {

inline double log_pot_at(const RayOptions& opt, int j, int d) {
  return opt.log_pot_max - j * std::log(static_cast<double>(d)) / opt.steps;
}

}  // namespace detail

/// Pullback tracing of R_c(theta): every angle of the forward orbit is traced
/// at once, level j of angle i being a preimage of level j - steps of angle i+1.
inline RayPolyline dynamic_ray(const MapSpec& m, const RationalAngle& a, const RayOptions& opt = {}) {
  RayPolyline ray;
  ray.angle = a;
  ray.kind = RayKind::dynamic;
  ray.base = m;
  std::vector<RationalAngle> orbit{a};
  std::vector<std::size_t> next;
  for (;;) {
    const RationalAngle b = angle_map(orbit.back(), m.d);
    const auto it = std::find(orbit.begin(), orbit.end(), b);
    next.push_back(static_cast<std::size_t>(it - orbit.begin()));
    if (it != orbit.end()) break;
    orbit.push_back(b);
  }
  const std::size_t L = orbit.size();
  const int S = opt.steps;
  std::vector<std::vector<Cplx>> levels;  // levels[j][i]
  const double inv_d = 1.0 / m.d;
  for (int j = 0;; ++j) {
    const double lp = detail::log_pot_at(opt, j, m.d);
    if (lp < opt.log_pot_min - 1e-12) break;
    if (j >= opt.budget) {
      ray.status = RayStatus::escaped_budget;
      break;
    }
    std::vector<Cplx> level(L);
    if (j < S) {
      for (std::size_t i = 0; i < L; ++i) level[i] = std::exp(Cplx(std::exp(lp), 2.0 * pi * orbit[i].value()));
    } else {
      bool ambiguous = false;
      for (std::size_t i = 0; i < L; ++i) {
        const Cplx w = levels[static_cast<std::size_t>(j - S)][next[i]];
        const Cplx root = std::conj(std::pow(w - m.c, inv_d));
        const Cplx prev = levels.back()[i];
        double best = 1e300, second = 1e300;
        Cplx pick;
        for (int r = 0; r < m.d; ++r) {
          const Cplx cand = root * std::polar(1.0, -2.0 * pi * r / m.d);
          const double dist = std::abs(cand - prev);
          if (dist < best) {
            second = best;
            best = dist;
            pick = cand;
          } else if (dist < second) {
            second = dist;
          }
        }
        if (best > opt.branch_ratio * second) ambiguous = true;
        level[i] = pick;
      }
      if (ambiguous) {
        ray.status = RayStatus::truncated_precision;
        break;
      }
    }
    levels.push_back(level);
    ray.points.push_back({level[0], lp, 0.0});
  }
  return ray;
}

namespace detail {

// z_n = p_c^n(c) with Wirtinger derivatives in c.
struct CriticalJet {
  Cplx z, dz, dzbar;
  bool escaped = false;
};

inline CriticalJet critical_jet(int d, Cplx c, int n) {
  CriticalJet j{c, 1.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const Cplx zb = std::conj(j.z);
    const Cplx zb1 = static_cast<double>(d) * ipow(zb, d - 1);
    const Cplx dz = zb1 * std::conj(j.dzbar) + 1.0;
    const Cplx dzbar = zb1 * std::conj(j.dz);
    j.z = zb * ipow(zb, d - 1) + c;
    j.dz = dz;
    j.dzbar = dzbar;
    if (!is_finite(j.z) || std::abs(j.z) > 1e100) {
      j.escaped = true;
      return j;
    }
  }
  return j;
}

}  // namespace detail

/// Continuation in c of phi_c(c) = exp(t + 2 pi i theta): at each potential t
/// solve p_c^n(c) = exp(d^n t) e^{2 pi i (-d)^n theta} with n chosen so that the
/// right side sits on a large circle.
inline RayPolyline parameter_ray(const RationalAngle& a, int d, const RayOptions& opt = {}) {
  RayPolyline ray;
  ray.angle = a;
  ray.kind = RayKind::parameter;
  const double log_d = std::log(static_cast<double>(d));
  const double log_log_r = std::log(opt.escape_log_radius);

  // root of p_c^n(c) = target at log-potential lp from the guess x; the
  // correction must stay small next to the predicted move away from `from`
  auto solve_at = [&](double lp, Cplx x, Cplx from) -> std::optional<std::pair<Cplx, double>> {
    const int n = std::max(0, static_cast<int>(std::ceil((log_log_r - lp) / log_d)));
    RationalAngle theta_n = a;
    for (int i = 0; i < n; ++i) theta_n = angle_map(theta_n, d);
    const Cplx target = std::exp(Cplx(std::exp(lp + n * log_d), 2.0 * pi * theta_n.value()));
    const Cplx start = x;
    double residual = 1e300;
    for (int it = 0; it < 30; ++it) {
      const detail::CriticalJet jet = detail::critical_jet(d, x, n);
      if (jet.escaped) return std::nullopt;
      const Cplx F = jet.z - target;
      residual = std::abs(F) / std::abs(target);
      if (residual < 1e-13) break;
      // F + A dc + B conj(dc) = 0 as a real 2x2 system
      const Cplx A = jet.dz, B = jet.dzbar;
      Eigen::Matrix2d M;
      M << A.real() + B.real(), -A.imag() + B.imag(), A.imag() + B.imag(), A.real() - B.real();
      const Eigen::Vector2d dx = M.fullPivLu().solve(Eigen::Vector2d(-F.real(), -F.imag()));
      if (!dx.allFinite()) return std::nullopt;
      const Cplx step(dx[0], dx[1]);
      x += step;
      if (std::abs(step) < 1e-12 * (1.0 + std::abs(x))) {
        residual = std::abs(detail::critical_jet(d, x, n).z - target) / std::abs(target);
        break;
      }
    }
    // p^n amplifies roundoff near the locus, so the attainable residual grows
    // with depth; 1e-6 keeps the potential within 1e-7 relative
    if (!(residual < 1e-6)) return std::nullopt;
    const double move = std::abs(start - from);
    const double allowed = move > 0.0 ? 0.5 * move : 0.5 * (std::abs(start) + 1.0);
    if (std::abs(x - start) > allowed + 1e-12 * (1.0 + std::abs(x))) return std::nullopt;
    return std::make_pair(x, residual);
  };

  Cplx c = std::exp(Cplx(std::exp(opt.log_pot_max), 2.0 * pi * a.value()));
  Cplx velocity = 0.0;  // d(log c) / d(log potential); c is exponential in t far out
  double prev_lp = opt.log_pot_max;
  for (int j = 0;; ++j) {
    const double lp = detail::log_pot_at(opt, j, d);
    if (lp < opt.log_pot_min - 1e-12) break;
    if (j >= opt.budget) {
      ray.status = RayStatus::escaped_budget;
      break;
    }
    // bisect the potential step when the predictor lands outside the basin
    std::vector<double> pending{lp};
    double at = prev_lp;
    Cplx x = c;
    double residual = 0.0;
    int splits = 0;
    while (!pending.empty()) {
      const double to = pending.back();
      const auto r = solve_at(to, x * std::exp(velocity * (to - at)), x);
      if (!r) {
        if (++splits > 40) break;
        pending.push_back(0.5 * (at + to));
        continue;
      }
      if (to != at) velocity = std::log(r->first / x) / (to - at);
      x = r->first;
      residual = r->second;
      at = to;
      pending.pop_back();
    }
    if (!pending.empty()) {
      ray.status = RayStatus::truncated_precision;
      break;
    }
    c = x;
    prev_lp = lp;
    ray.points.push_back({c, lp, residual});
  }
  return ray;
}

/// Point of the arc polyline nearest to c: along-arc coordinate and signed
/// transverse offset (positive to the left of increasing arclength).
struct ArcProjection {
  double along = 0.0;
  double transverse = 0.0;
  double distance = 0.0;
  bool interior = false;  // foot away from both ends of the arc
  Cplx foot;
};

inline ArcProjection project_onto_arc(Cplx c, const std::vector<ArcSample>& arc) {
  if (arc.size() < 2) throw Error(ErrorKind::invalid_argument, "arc needs at least two samples");
  ArcProjection best;
  best.distance = 1e300;
  for (std::size_t i = 1; i < arc.size(); ++i) {
    const Cplx p = arc[i - 1].c, q = arc[i].c;
    const Cplx e = q - p;
    const double len2 = std::norm(e);
    double t = len2 > 0 ? std::real((c - p) * std::conj(e)) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Cplx foot = p + t * e;
    const double dist = std::abs(c - foot);
    if (dist < best.distance) {
      best.distance = dist;
      best.along = arc[i - 1].arclen + t * (arc[i].arclen - arc[i - 1].arclen);
      const double cross = std::imag(std::conj(e) * (c - p));
      best.transverse = cross >= 0 ? dist : -dist;
      best.foot = foot;
    }
  }
  // near a cusp the samples pile up in c, so "at the end" is judged in c
  double length = 0.0;
  for (std::size_t i = 1; i < arc.size(); ++i) length += std::abs(arc[i].c - arc[i - 1].c);
  const double tol = 1e-3 * length;
  best.interior = std::abs(best.foot - arc.front().c) > tol && std::abs(best.foot - arc.back().c) > tol;
  return best;
}

struct WiggleReport {
  int wiggle_count = 0;
  double span = 0.0;  // range of the along-arc coordinate over the final decade
  std::vector<double> log10_potential;
  std::vector<double> along;
  std::vector<double> transverse;
  double final_distance = 0.0;  // of the last ray point, whether or not it was counted
};

struct WiggleOptions {
  double decades = 1e9;       // trailing part of the ray that is projected
  double hysteresis = 1e-9;   // reversal threshold on the along-arc coordinate
  double near = 0.02;         // only points this close to the arc, relative to its length
};

inline WiggleReport accumulation_diagnostic(const RayPolyline& ray, const std::vector<ArcSample>& arc,
                                            const WiggleOptions& opt = {}) {
  WiggleReport rep;
  if (ray.points.empty()) return rep;
  const double ln10 = std::log(10.0);
  const double last = ray.points.back().log_potential / ln10;
  double length = 0.0;
  for (std::size_t i = 1; i < arc.size(); ++i) length += std::abs(arc[i].c - arc[i - 1].c);
  for (const auto& p : ray.points) {
    const double lp = p.log_potential / ln10;
    if (lp > last + opt.decades) continue;
    const ArcProjection pr = project_onto_arc(p.z, arc);
    // beyond the ends of the arc the along coordinate is clamped and says nothing
    if (!pr.interior || pr.distance > opt.near * length) continue;
    rep.log10_potential.push_back(lp);
    rep.along.push_back(pr.along);
    rep.transverse.push_back(pr.transverse);
  }
  rep.final_distance = project_onto_arc(ray.points.back().z, arc).distance;
  int dir = 0;
  double extreme = rep.along.empty() ? 0.0 : rep.along.front();
  for (double u : rep.along) {
    if (dir >= 0 && u > extreme) {
      extreme = u;
      if (dir == 0 && u > rep.along.front() + opt.hysteresis) dir = 1;
    } else if (dir <= 0 && u < extreme) {
      extreme = u;
      if (dir == 0 && u < rep.along.front() - opt.hysteresis) dir = -1;
    }
    if (dir == 1 && u < extreme - opt.hysteresis) {
      ++rep.wiggle_count;
      dir = -1;
      extreme = u;
    } else if (dir == -1 && u > extreme + opt.hysteresis) {
      ++rep.wiggle_count;
      dir = 1;
      extreme = u;
    }
  }
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < rep.along.size(); ++i) {
    if (rep.log10_potential[i] > last + 1.0) continue;
    lo = std::min(lo, rep.along[i]);
    hi = std::max(hi, rep.along[i]);
  }
  rep.span = hi >= lo ? hi - lo : 0.0;
  return rep;
}

}  // namespace multicorn
