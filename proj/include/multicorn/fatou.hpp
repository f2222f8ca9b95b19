#pragma once

// Fatou coordinates at a parabolic fixed point of a holomorphic germ
// f(z0 + u) = z0 + u + a_{q+1} u^{q+1} + ...
//
// Deep in a petal the coordinate has the asymptotic form
//   Phi(u) = sum_{j=-q}^{-1} c_j u^j + b log u + sum_{j=1}^{M} c_j u^j,
// whose coefficients solve Phi(f(u)) = Phi(u) + 1 term by term. A point is
// pushed along its orbit until it is deep enough for the truncated expansion,
// and the iteration count is subtracted. For q = 1 the leading terms are
// w - b log w with w = -1/(a2 u), so b is the log correction 1 - iota.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "multicorn/complex.hpp"
#include "multicorn/error.hpp"
#include "multicorn/series.hpp"

namespace multicorn {

enum class ChartDirection { incoming, outgoing };

inline const char* to_string(ChartDirection d) {
  return d == ChartDirection::incoming ? "incoming" : "outgoing";
}

/// A holomorphic germ with a parabolic fixed point. `inverse` is only needed
/// for outgoing charts; `half` is the antiholomorphic square root of forward
/// used by the equator normalization.
struct ParabolicGerm {
  Cplx z0;
  std::function<Cplx(Cplx)> forward;
  std::function<Cplx(Cplx)> inverse;
  std::function<Cplx(Cplx)> half;
  Series<Cplx> taylor;  // of forward(z0 + u) - z0
};

struct FatouExpansion {
  int q = 1;
  Cplx lead;                 // a_{q+1}
  std::vector<Cplx> negative;  // c_{-q} .. c_{-1}
  Cplx log_coeff;            // b
  std::vector<Cplx> positive;  // c_1 .. c_M

  Cplx operator()(Cplx u, Cplx dir) const {
    Cplx acc{0.0, 0.0};
    for (int j = 0; j < q; ++j) acc += negative[j] / ipow(u, q - j);
    Cplx pos{0.0, 0.0};
    for (std::size_t j = positive.size(); j-- > 0;) pos = (pos + positive[j]) * u;
    return acc + pos + log_coeff * std::log(u / dir);
  }
};

/// Formal Fatou expansion of a germ with multiplicity q+1 at 0. When
/// `fixed_log` is given it replaces the log coefficient the recursion would
/// produce (used to tie b to an independently computed index).
inline FatouExpansion fatou_expansion(const Series<Cplx>& taylor, int q, int terms,
                                      std::optional<Cplx> fixed_log = std::nullopt) {
  const std::size_t order = static_cast<std::size_t>(2 * q + terms + 2);
  if (taylor.order() < order + 1)
    throw Error(ErrorKind::invalid_argument, "germ series too short for the expansion");
  Series<Cplx> base(order);
  base[0] = 1.0;
  for (std::size_t i = 1; i <= order; ++i) base[i] = taylor[i + 1];
  const Cplx lead = base[static_cast<std::size_t>(q)];
  if (std::abs(lead) == 0.0) throw Error(ErrorKind::domain, "vanishing leading coefficient");
  for (int i = 1; i < q; ++i)
    if (std::abs(base[static_cast<std::size_t>(i)]) > 1e-9 * std::abs(lead))
      throw Error(ErrorKind::domain, "germ has lower multiplicity than requested");
  // the lower terms are zero in theory; drop the rounding noise
  for (int i = 1; i < q; ++i) base[static_cast<std::size_t>(i)] = 0.0;

  const Series<Cplx> inv = base.reciprocal();
  const Series<Cplx> logb = base.log1p_of_tail();
  auto power = [&](int j) {
    Series<Cplx> s = j >= 0 ? base.pow(j) : inv.pow(-j);
    s[0] -= 1.0;
    return s;
  };

  FatouExpansion e;
  e.q = q;
  e.lead = lead;
  e.negative.assign(static_cast<std::size_t>(q), 0.0);
  e.positive.assign(static_cast<std::size_t>(terms), 0.0);
  std::vector<std::pair<int, Series<Cplx>>> known;  // (j, c_j * D_j)
  bool have_log = false;
  Cplx log_coeff{0.0, 0.0};

  for (int mdeg = 0; mdeg <= q + terms; ++mdeg) {
    Cplx sum = mdeg == 0 ? Cplx{-1.0, 0.0} : Cplx{0.0, 0.0};
    for (const auto& [j, s] : known) {
      const int idx = mdeg - j;
      if (idx >= 0 && idx <= static_cast<int>(s.order())) sum += s[static_cast<std::size_t>(idx)];
    }
    if (have_log) sum += log_coeff * logb[static_cast<std::size_t>(mdeg)];
    if (mdeg == q) {
      log_coeff = fixed_log.value_or(-sum / logb[static_cast<std::size_t>(q)]);
      have_log = true;
      continue;
    }
    const int j = mdeg - q;
    Series<Cplx> dj = power(j);
    const Cplx cj = -sum / dj[static_cast<std::size_t>(q)];
    if (j < 0)
      e.negative[static_cast<std::size_t>(j + q)] = cj;
    else
      e.positive[static_cast<std::size_t>(j - 1)] = cj;
    known.emplace_back(j, dj * cj);
  }
  e.log_coeff = log_coeff;
  return e;
}

struct ChartOptions {
  int terms = 12;
  double base_radius = 1e-2;   // normal-form radius of the phase base point
  double depth = 2e-2;         // normal-form radius at which the expansion is used
  int budget = 1 << 20;        // iteration cap per evaluation
  int probes = 24;
  double residual_target = 1e-6;
  int max_refinements = 6;
};

struct FatouChart {
  ChartDirection direction = ChartDirection::incoming;
  Cplx z0;
  int q = 1;
  Cplx A;        // leading coefficient of the germ, a_{q+1}
  Cplx b;        // log coefficient
  FatouExpansion expansion;  // of the germ that is iterated (inverse for outgoing)
  std::vector<Cplx> petals;  // attracting directions of the iterated germ
  std::vector<Cplx> offsets;  // one per petal
  double scale = 1.0;  // |u| per unit of normal-form radius
  double depth = 2e-2;
  int budget = 1 << 20;
  std::function<Cplx(Cplx)> step;  // germ iterated toward z0
  double functional_residual = 0.0;
  double equator_defect = 0.0;
  double equator_shift = 0.0;
  int last_iterations = 0;

  struct Value {
    Cplx phi;
    int petal;
    int iterations;
  };

  int nearest_petal(Cplx u) const {
    int best = 0;
    double best_d = 1e300;
    for (std::size_t j = 0; j < petals.size(); ++j) {
      const double dist = std::abs(std::arg(u / petals[j]));
      if (dist < best_d) {
        best_d = dist;
        best = static_cast<int>(j);
      }
    }
    return best;
  }

  /// Coordinate without offsets, evaluated with the given normal-form depth.
  Value raw(Cplx z, double at_depth) const {
    const double deep = at_depth * scale;
    Cplx u = z - z0;
    int n = 0;
    while (std::abs(u) > deep || std::abs(std::arg(u / petals[nearest_petal(u)])) > 0.25 * pi / q) {
      if (n >= budget) throw Error(ErrorKind::domain, "point not absorbed by a petal within budget");
      z = step(z);
      require_finite(z, "Fatou iteration");
      u = z - z0;
      ++n;
      if (std::abs(u) > 1e3 * (1.0 + scale)) throw Error(ErrorKind::domain, "orbit left the petal");
    }
    const int petal = nearest_petal(u);
    Cplx v = expansion(u, petals[static_cast<std::size_t>(petal)]) - static_cast<double>(n);
    if (direction == ChartDirection::outgoing) v = -v;
    return {v, petal, n};
  }

  Value evaluate(Cplx z, double at_depth) const {
    Value v = raw(z, at_depth);
    v.phi += offsets[static_cast<std::size_t>(v.petal)];
    return v;
  }

  Cplx operator()(Cplx z) const { return evaluate(z, depth).phi; }
  int petal_of(Cplx z) const { return evaluate(z, depth).petal; }
};

namespace detail {

inline std::vector<Cplx> petal_directions(Cplx lead, int q) {
  // lead u^q real negative
  std::vector<Cplx> dirs;
  const double base = (pi - std::arg(lead)) / q;
  for (int j = 0; j < q; ++j) dirs.push_back(std::polar(1.0, base + 2.0 * pi * j / q));
  return dirs;
}

inline std::vector<std::pair<int, Cplx>> chart_probes(const FatouChart& ch, int count,
                                                      double radius) {
  std::vector<std::pair<int, Cplx>> out;
  const int per = std::max(4, count / static_cast<int>(ch.petals.size()));
  for (std::size_t j = 0; j < ch.petals.size(); ++j) {
    for (int i = 0; i < per; ++i) {
      const double r = radius * (1.0 + 1.5 * (i % 3) / 2.0);
      const double phi = (0.25 * pi / ch.q) * (2.0 * (i + 0.5) / per - 1.0);
      out.emplace_back(static_cast<int>(j), ch.z0 + ch.petals[j] * std::polar(r * ch.scale, phi));
    }
  }
  return out;
}

}  // namespace detail

/// Builds a Fatou coordinate for germ.forward (incoming) or for the outgoing
/// side via the attracting coordinate of the inverse germ, negated.
/// The multiplicity q is read from the Taylor series (1 or 2 supported).
inline FatouChart fatou_chart(const ParabolicGerm& germ, ChartDirection dir,
                              std::optional<Cplx> log_coeff = std::nullopt,
                              const ChartOptions& opt = {}) {
  const Series<Cplx>& t = germ.taylor;
  if (t.order() < static_cast<std::size_t>(opt.terms + 8))
    throw Error(ErrorKind::invalid_argument, "germ series too short");
  if (std::abs(t[1] - 1.0) > 1e-6) throw Error(ErrorKind::domain, "germ is not parabolic");
  const double size = std::abs(t[2]) + std::abs(t[3]) + 1e-300;
  int q = std::abs(t[2]) > 1e-6 * std::max(1.0, size) ? 1 : 2;
  if (q == 2 && std::abs(t[3]) < 1e-9) throw Error(ErrorKind::domain, "parabolic multiplicity above 3");

  Series<Cplx> g = t;
  g[0] = 0.0;
  g[1] = 1.0;
  if (q == 2) g[2] = 0.0;
  if (dir == ChartDirection::outgoing) {
    if (!germ.inverse) throw Error(ErrorKind::invalid_argument, "outgoing chart needs the inverse germ");
    g = g.reversion();
  }

  FatouChart ch;
  ch.direction = dir;
  ch.z0 = germ.z0;
  ch.q = q;
  ch.A = t[static_cast<std::size_t>(q + 1)];
  std::optional<Cplx> fixed;
  if (log_coeff) fixed = dir == ChartDirection::outgoing ? -*log_coeff : *log_coeff;
  ch.expansion = fatou_expansion(g, q, opt.terms, q == 1 ? fixed : std::nullopt);
  ch.b = dir == ChartDirection::outgoing ? -ch.expansion.log_coeff : ch.expansion.log_coeff;
  ch.petals = detail::petal_directions(ch.expansion.lead, q);
  ch.scale = std::pow(std::abs(ch.expansion.lead), -1.0 / q);
  ch.budget = opt.budget;
  ch.step = dir == ChartDirection::incoming ? germ.forward : germ.inverse;
  ch.offsets.assign(ch.petals.size(), 0.0);

  // the half map permutes petals; petals in a swapped pair take their real
  // offset from the equator relation instead of a base point
  std::vector<int> partner(ch.petals.size());
  for (std::size_t j = 0; j < ch.petals.size(); ++j) {
    const Cplx probe = ch.z0 + ch.petals[j] * (0.5 * opt.base_radius * ch.scale);
    partner[j] = germ.half ? ch.nearest_petal(germ.half(probe) - ch.z0) : static_cast<int>(j);
  }

  for (int attempt = 0; attempt <= opt.max_refinements; ++attempt) {
    ch.depth = opt.depth * std::pow(0.5, attempt);
    std::vector<bool> anchored(ch.petals.size(), false);
    for (std::size_t j = 0; j < ch.petals.size(); ++j) {
      if (static_cast<int>(j) > partner[j] && partner[j] != static_cast<int>(j)) continue;
      const Cplx zb = ch.z0 + ch.petals[j] * (opt.base_radius * ch.scale);
      ch.offsets[j] = -ch.raw(zb, ch.depth).phi.real();
      anchored[j] = true;
    }

    const auto probes = detail::chart_probes(ch, opt.probes, opt.base_radius);
    if (germ.half) {
      for (std::size_t j = 0; j < ch.petals.size(); ++j) {
        if (anchored[j]) continue;
        // real offset of the partner from Re(Phi(h z) - conj Phi(z)) = 1/2
        double acc = 0.0;
        int cnt = 0;
        for (const auto& [pj, z] : probes) {
          if (partner[static_cast<std::size_t>(pj)] != static_cast<int>(j)) continue;
          const auto img = ch.raw(germ.half(z), ch.depth);
          if (img.petal != static_cast<int>(j)) continue;
          acc += img.phi.real() - (ch.offsets[static_cast<std::size_t>(pj)] + ch.raw(z, ch.depth).phi).real() - 0.5;
          ++cnt;
        }
        if (cnt == 0) throw Error(ErrorKind::domain, "half map does not reach the partner petal");
        ch.offsets[j] = -acc / cnt;
      }
      // imaginary normalization: shifting every offset by i s moves the
      // defect by 2 s (for a swapped pair, s0 + s1 split evenly)
      double tsum = 0.0, tmin = 1e300, tmax = -1e300;
      for (const auto& [pj, z] : probes) {
        const Cplx d = ch(germ.half(z)) - std::conj(ch(z)) - 0.5;
        tsum += d.imag();
        tmin = std::min(tmin, d.imag());
        tmax = std::max(tmax, d.imag());
      }
      const double tmean = tsum / probes.size();
      if (tmax - tmin > 1e-5) {
        if (attempt < opt.max_refinements) continue;
        throw Error(ErrorKind::convergence, "equator defect spread too large");
      }
      ch.equator_shift = -tmean / 2.0;
      for (auto& o : ch.offsets) o += Cplx(0.0, ch.equator_shift);
      double worst = 0.0;
      for (const auto& [pj, z] : probes)
        worst = std::max(worst, std::abs(ch(germ.half(z)) - std::conj(ch(z)) - 0.5));
      ch.equator_defect = worst;
    }

    // functional equation, with the image evaluated at a different depth so
    // the two sides do not share their deep point
    double worst = 0.0;
    for (const auto& [pj, z] : probes) {
      const Cplx fz = germ.forward(z);
      const Cplx lhs = ch.evaluate(fz, 0.5 * ch.depth).phi;
      const Cplx rhs = ch.evaluate(z, ch.depth).phi + 1.0;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    ch.functional_residual = worst;
    if (worst < opt.residual_target && (!germ.half || ch.equator_defect < opt.residual_target)) return ch;
  }
  throw Error(ErrorKind::convergence, "Fatou chart residual above target after refinement");
}

/// Shifts the chart's imaginary normalization so the half-map relation
/// Phi(h z) = conj(Phi(z)) + 1/2 holds on the probe set. Returns the shift.
inline double equator_normalize(FatouChart& ch, const std::function<Cplx(Cplx)>& half,
                                int probes = 24, double radius = 1e-2) {
  const auto pts = detail::chart_probes(ch, probes, radius);
  double tsum = 0.0, tmin = 1e300, tmax = -1e300;
  for (const auto& [pj, z] : pts) {
    const double t = (ch(half(z)) - std::conj(ch(z)) - 0.5).imag();
    tsum += t;
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  if (tmax - tmin > 1e-5) throw Error(ErrorKind::convergence, "equator defect spread too large");
  const double shift = -tsum / pts.size() / 2.0;
  for (auto& o : ch.offsets) o += Cplx(0.0, shift);
  double worst = 0.0;
  for (const auto& [pj, z] : pts) worst = std::max(worst, std::abs(ch(half(z)) - std::conj(ch(z)) - 0.5));
  ch.equator_defect = worst;
  return shift;
}

}  // namespace multicorn
