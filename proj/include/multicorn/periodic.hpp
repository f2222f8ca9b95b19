#pragma once

// Periodic orbits of p_c found through the holomorphic second iterate, their
// classification, and the holomorphic fixed point index.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "multicorn/complex.hpp"
#include "multicorn/core.hpp"
#include "multicorn/error.hpp"
#include "multicorn/series.hpp"

namespace multicorn {

inline constexpr double kDedupTolerance = 1e-9;
inline constexpr double kParabolicBand = 1e-7;
inline constexpr double kCuspQuadraticThreshold = 1e-6;

enum class OrbitType { attracting, repelling, parabolic, indifferent_unresolved };

inline const char* to_string(OrbitType t) {
  switch (t) {
    case OrbitType::attracting: return "attracting";
    case OrbitType::repelling: return "repelling";
    case OrbitType::parabolic: return "parabolic";
    case OrbitType::indifferent_unresolved: return "indifferent-unresolved";
  }
  return "?";
}

struct Classification {
  OrbitType type = OrbitType::repelling;
  int multiplicity = 0;  // q in {1, 2} when parabolic

  friend bool operator==(const Classification&, const Classification&) = default;
};

struct PeriodicOrbit {
  Cplx base_point;
  int period_under_p = 0;
  int holo_period = 0;
  Cplx rho;
  Classification classification;
};

enum class IndexMethod { formula, contour };

struct IndexValue {
  Cplx iota;
  IndexMethod method = IndexMethod::formula;
};

// ---------------------------------------------------------------------------
// Return map of the second iterate

/// Value and first two derivatives of (p^{2})^{n} at z.
inline Jet2 return_map_jet(const MapSpec& m, Cplx z, int n) {
  Jet2 acc{z, {1.0, 0.0}, {0.0, 0.0}};
  for (int j = 0; j < n; ++j) {
    const Jet2 g = second_iterate_jet(m, acc.value);
    // (g o h)'' = g''(h) h'^2 + g'(h) h''
    acc = {g.value, g.d1 * acc.d1, g.d2 * acc.d1 * acc.d1 + g.d1 * acc.d2};
  }
  return acc;
}

inline Cplx return_map(const MapSpec& m, Cplx z, int n) {
  for (int j = 0; j < n; ++j) z = apply_second(m, z);
  return z;
}

inline Cplx iterate(const MapSpec& m, Cplx z, int n) {
  for (int j = 0; j < n; ++j) z = multicorn::apply(m, z);
  return z;
}

/// Taylor coefficients of u -> (p^2)^n(z0 + u) - z0 up to the given order.
inline Series<Cplx> return_map_taylor(const MapSpec& m, Cplx z0, int n, std::size_t order) {
  Series<Cplx> s(order, {z0, Cplx{1.0, 0.0}});
  const Cplx cbar = std::conj(m.c);
  for (int j = 0; j < n; ++j) s = (s.pow(m.d) + cbar).pow(m.d) + m.c;
  s[0] -= z0;
  return s;
}

// ---------------------------------------------------------------------------
// Newton

/// Refines a root of F(z) = (p^2)^n(z) - z. Large steps are damped.
inline Cplx newton_refine(const MapSpec& m, Cplx z0, int n, int max_steps = 60) {
  Cplx z = z0;
  const double cap = 0.5 * escape_radius(m);
  for (int step = 0; step < max_steps; ++step) {
    const Jet2 j = return_map_jet(m, z, n);
    const Cplx f = j.value - z;
    const double scale = std::max(1.0, std::abs(z));
    if (std::abs(f) < 1e-12 * scale) return z;
    const Cplx fp = j.d1 - 1.0;
    if (std::abs(fp) < 1e-300) throw Error(ErrorKind::divergence, "vanishing derivative in Newton");
    Cplx delta = f / fp;
    if (std::abs(delta) > cap) delta *= cap / std::abs(delta);
    z -= delta;
    if (!is_finite(z)) throw Error(ErrorKind::divergence, "Newton iterate not finite");
    // round-off floor: the step no longer moves the point
    if (std::abs(delta) < 4e-16 * scale) {
      const Cplx f2 = return_map(m, z, n) - z;
      if (std::abs(f2) < 1e-9 * scale) return z;
    }
  }
  throw Error(ErrorKind::divergence, "Newton did not converge within step budget");
}

/// Newton on F'(z) = 0 near a nearly multiple root; returns the critical point
/// of F, which is the multiple root when one exists.
inline std::optional<Cplx> refine_multiple_root(const MapSpec& m, Cplx z0, int n) {
  Cplx z = z0;
  for (int step = 0; step < 60; ++step) {
    const Jet2 j = return_map_jet(m, z, n);
    const Cplx g = j.d1 - 1.0;
    if (std::abs(j.d2) < 1e-300) return std::nullopt;
    const Cplx delta = g / j.d2;
    z -= delta;
    if (!is_finite(z) || std::abs(z - z0) > 1e-2) return std::nullopt;
    if (std::abs(delta) < 1e-16 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

// ---------------------------------------------------------------------------
// Classification

/// Classifies from the return-map multiplier and its centered quadratic
/// Taylor coefficient.
inline Classification classify(Cplx rho, Cplx quadratic_coeff, double band = kParabolicBand) {
  const double mod = std::abs(rho);
  if (mod < 1.0 - band) return {OrbitType::attracting, 0};
  if (mod > 1.0 + band) return {OrbitType::repelling, 0};
  if (std::abs(rho - 1.0) > 10.0 * band) return {OrbitType::indifferent_unresolved, 0};
  const int q = std::abs(quadratic_coeff) > kCuspQuadraticThreshold ? 1 : 2;
  return {OrbitType::parabolic, q};
}

inline Classification classify(const MapSpec& m, const PeriodicOrbit& orbit) {
  const Jet2 j = return_map_jet(m, orbit.base_point, orbit.holo_period);
  return classify(j.d1, 0.5 * j.d2);
}

/// Smallest m in [1, max_period] with p^m(z) = z to tolerance; 0 if none.
inline int exact_period_under_p(const MapSpec& m, Cplx z, int max_period, double tol = 1e-8) {
  Cplx w = z;
  for (int j = 1; j <= max_period; ++j) {
    w = multicorn::apply(m, w);
    if (std::abs(w - z) < tol * (1.0 + std::abs(z))) return j;
  }
  return 0;
}

inline int exact_holo_period(const MapSpec& m, Cplx z, int n, double tol = 1e-8) {
  for (int j = 1; j <= n; ++j) {
    if (n % j) continue;
    if (std::abs(return_map(m, z, j) - z) < tol * (1.0 + std::abs(z))) return j;
  }
  return 0;
}

/// Labels a refined root of (p^2)^n(z) = z.
inline PeriodicOrbit label_orbit(const MapSpec& m, Cplx z, int n) {
  PeriodicOrbit o;
  o.base_point = z;
  o.holo_period = exact_holo_period(m, z, n);
  if (o.holo_period == 0) o.holo_period = n;
  o.period_under_p = exact_period_under_p(m, z, 2 * o.holo_period);
  if (o.period_under_p == 0) o.period_under_p = 2 * o.holo_period;
  const Jet2 j = return_map_jet(m, z, o.holo_period);
  o.rho = j.d1;
  o.classification = classify(j.d1, 0.5 * j.d2);
  return o;
}

// ---------------------------------------------------------------------------
// Multi-start search

struct Disk {
  Cplx center{0.0, 0.0};
  double radius = 0.0;
};

struct PeriodicSearch {
  std::vector<PeriodicOrbit> orbits;
  int expected_roots = 0;     // d^{2n}
  int found_with_multiplicity = 0;
  bool complete = false;      // false means a missed-root warning
};

namespace detail {

inline void sort_and_dedup(std::vector<Cplx>& roots, double tol) {
  std::sort(roots.begin(), roots.end(), [](Cplx a, Cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  std::vector<Cplx> out;
  for (Cplx r : roots) {
    bool dup = false;
    for (Cplx q : out)
      if (std::abs(q - r) < tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(r);
  }
  roots = std::move(out);
}

/// Newton with implicit deflation of known roots (Maehly's correction).
inline std::optional<Cplx> deflated_newton(const MapSpec& m, Cplx z, int n,
                                           const std::vector<Cplx>& known) {
  const double cap = 0.5 * escape_radius(m);
  for (int step = 0; step < 200; ++step) {
    const Jet2 j = return_map_jet(m, z, n);
    const Cplx f = j.value - z;
    const double scale = std::max(1.0, std::abs(z));
    if (std::abs(f) < 1e-12 * scale) return z;
    Cplx sum{0.0, 0.0};
    for (Cplx r : known) {
      const Cplx diff = z - r;
      if (std::abs(diff) < 1e-14) return std::nullopt;
      sum += 1.0 / diff;
    }
    const Cplx denom = (j.d1 - 1.0) - f * sum;
    if (std::abs(denom) < 1e-300) return std::nullopt;
    Cplx delta = f / denom;
    if (std::abs(delta) > cap) delta *= cap / std::abs(delta);
    z -= delta;
    if (!is_finite(z)) return std::nullopt;
  }
  return std::nullopt;
}

inline int root_multiplicity(const PeriodicOrbit& o) {
  if (o.classification.type != OrbitType::parabolic) return 1;
  // a parabolic point of (p^2)^n with return period j < n is still a simple
  // parabolic of the higher iterate only when the multiplier is exactly 1
  return o.classification.multiplicity + 1;
}

}  // namespace detail

/// All roots of (p^2)^n(z) = z inside region, found by a deterministic grid of
/// Newton starts with about `starts_per_root` starts per expected root.
inline PeriodicSearch find_periodic_points(const MapSpec& m, int n, std::optional<Disk> region = {},
                                           int starts_per_root = 20) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "period must be >= 1");
  if (2 * n > 24) throw Error(ErrorKind::invalid_argument, "period beyond desk scale");
  const Disk disk = region.value_or(Disk{{0.0, 0.0}, escape_radius(m)});
  PeriodicSearch out;
  double expected = 1.0;
  for (int j = 0; j < 2 * n; ++j) expected *= m.d;
  out.expected_roots = static_cast<int>(expected);

  const double starts = std::max(64.0, expected * starts_per_root);
  // square lattice clipped to the disk: area pi r^2 / h^2 = starts
  const double h = disk.radius * std::sqrt(pi / starts);
  const int half = static_cast<int>(std::ceil(disk.radius / h));
  std::vector<Cplx> roots;
  for (int iy = -half; iy <= half; ++iy) {
    for (int ix = -half; ix <= half; ++ix) {
      // half-cell offset keeps starts off symmetry lines
      const Cplx s = disk.center + Cplx((ix + 0.37) * h, (iy + 0.21) * h);
      if (std::abs(s - disk.center) > disk.radius) continue;
      try {
        roots.push_back(newton_refine(m, s, n, 80));
      } catch (const Error&) {
      }
    }
  }
  auto inside = [&](Cplx z) { return std::abs(z - disk.center) <= disk.radius * (1.0 + 1e-12); };
  roots.erase(std::remove_if(roots.begin(), roots.end(), [&](Cplx z) { return !inside(z); }),
              roots.end());
  detail::sort_and_dedup(roots, kDedupTolerance);

  // A multiple root comes back from Newton as a cloud of approximations
  // roughly sqrt(tolerance) wide. Merge a cloud into the critical point of F
  // when that point is itself a root; genuinely close simple roots fail that
  // test and are kept.
  auto merge_clusters = [&](std::vector<Cplx>& rs) {
    std::vector<Cplx> out;
    std::vector<bool> used(rs.size(), false);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      const double scale = std::max(1.0, std::abs(rs[i]));
      if (std::abs(return_map_jet(m, rs[i], n).d1 - 1.0) > 1e-2) {
        out.push_back(rs[i]);
        continue;
      }
      std::vector<std::size_t> members{i};
      Cplx mean = rs[i];
      for (std::size_t j = i + 1; j < rs.size(); ++j) {
        if (used[j] || std::abs(rs[j] - rs[i]) > 1e-4 * scale) continue;
        members.push_back(j);
        mean += rs[j];
      }
      mean /= static_cast<double>(members.size());
      const auto zm = refine_multiple_root(m, mean, n);
      if (zm && std::abs(*zm - mean) < 1e-4 * scale &&
          std::abs(return_map(m, *zm, n) - *zm) < 1e-12 * scale) {
        for (std::size_t j : members) used[j] = true;
        out.push_back(*zm);
      } else {
        out.push_back(rs[i]);
      }
    }
    detail::sort_and_dedup(out, kDedupTolerance);
    rs = std::move(out);
  };

  auto polish_and_label = [&](std::vector<Cplx>& rs) {
    merge_clusters(rs);
    std::vector<PeriodicOrbit> orbits;
    for (Cplx z : rs) orbits.push_back(label_orbit(m, z, n));
    return orbits;
  };

  auto count = [&](const std::vector<PeriodicOrbit>& os) {
    int total = 0;
    for (const auto& o : os) total += detail::root_multiplicity(o);
    return total;
  };

  out.orbits = polish_and_label(roots);
  out.found_with_multiplicity = count(out.orbits);

  if (out.found_with_multiplicity < out.expected_roots) {
    // resample with deflation against the roots already found
    for (int iy = -half; iy <= half && count(out.orbits) < out.expected_roots; ++iy) {
      for (int ix = -half; ix <= half; ++ix) {
        const Cplx s = disk.center + Cplx((ix + 0.61) * h, (iy + 0.73) * h);
        if (std::abs(s - disk.center) > disk.radius) continue;
        if (auto r = detail::deflated_newton(m, s, n, roots)) {
          if (!inside(*r)) continue;
          const bool dup = std::any_of(roots.begin(), roots.end(),
                                       [&](Cplx q) { return std::abs(q - *r) < kDedupTolerance; });
          if (!dup) {
            roots.push_back(newton_refine(m, *r, n));
            detail::sort_and_dedup(roots, kDedupTolerance);
            out.orbits = polish_and_label(roots);
            if (count(out.orbits) >= out.expected_roots) break;
          }
        }
      }
    }
    out.found_with_multiplicity = count(out.orbits);
  }
  out.complete = out.found_with_multiplicity == out.expected_roots;
  return out;
}

// ---------------------------------------------------------------------------
// Fixed point index

/// Winding number of z - f(z) around the circle |z - z0| = r.
template <typename F>
int fixed_point_winding(F&& f, Cplx z0, double r, int nodes = 512) {
  double total = 0.0;
  Cplx prev = z0 + r - f(z0 + r);
  for (int j = 1; j <= nodes; ++j) {
    const Cplx z = z0 + r * std::polar(1.0, 2.0 * pi * j / nodes);
    const Cplx g = z - f(z);
    total += std::arg(g / prev);
    prev = g;
  }
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

/// (1/2 pi i) closed integral of dz / (z - f(z)) over |z - z0| = r, uniform
/// trapezoid rule.
template <typename F>
Cplx contour_index(F&& f, Cplx z0, double r, int nodes = 512) {
  Cplx sum{0.0, 0.0};
  for (int j = 0; j < nodes; ++j) {
    const Cplx e = std::polar(1.0, 2.0 * pi * j / nodes);
    const Cplx z = z0 + r * e;
    // dz = i r e dt, and (1/2 pi i) * i r e * (2 pi / nodes) = r e / nodes
    sum += r * e / (z - f(z));
  }
  return sum / static_cast<double>(nodes);
}

struct ContourOptions {
  double max_radius = 1e-2;
  int nodes = 512;
  int max_shrinks = 5;
  double richardson_tol = 1e-8;
};

/// Index of the fixed point z0 of a holomorphic map f by the residue
/// integral. `multiplicity` is the number of fixed points (with multiplicity)
/// that z0 carries: 1 simple, q+1 parabolic.
template <typename F>
Cplx contour_fixed_point_index(F&& f, Cplx z0, int multiplicity, double start_radius,
                               const ContourOptions& opt = {}) {
  double r = std::min(opt.max_radius, start_radius);
  for (int attempt = 0; attempt <= opt.max_shrinks; ++attempt, r *= 0.5) {
    if (fixed_point_winding(f, z0, 2.0 * r, opt.nodes) != multiplicity) continue;
    if (fixed_point_winding(f, z0, r, opt.nodes) != multiplicity) continue;
    const Cplx coarse = contour_index(f, z0, r, opt.nodes);
    const Cplx fine = contour_index(f, z0, r, 2 * opt.nodes);
    if (std::abs(coarse - fine) > opt.richardson_tol * std::max(1.0, std::abs(fine)))
      throw Error(ErrorKind::contour_failure, "quadrature refinement disagrees");
    return fine;
  }
  throw Error(ErrorKind::contour_failure, "could not isolate the fixed point");
}

/// Fixed point index of z0 for f = (p^2)^n: 1/(1 - rho) away from rho = 1,
/// the residue integral otherwise.
inline IndexValue fixed_point_index(const MapSpec& m, Cplx z0, int n) {
  const Jet2 j = return_map_jet(m, z0, n);
  if (std::abs(j.value - z0) > 1e-8 * (1.0 + std::abs(z0)))
    throw Error(ErrorKind::not_periodic, "fixed_point_index at a non-fixed point");
  const Cplx rho = j.d1;
  if (std::abs(rho - 1.0) > 1e-4) return {1.0 / (1.0 - rho), IndexMethod::formula};
  const Cplx a2 = 0.5 * j.d2;
  int mult = 1;
  double start = 1e-2;
  if (std::abs(rho - 1.0) < 1e-6) {
    mult = std::abs(a2) > kCuspQuadraticThreshold ? 2 : 3;
  } else if (std::abs(a2) > 0.0) {
    start = 0.25 * std::abs(rho - 1.0) / std::abs(a2);
  }
  auto f = [&](Cplx z) { return return_map(m, z, n); };
  return {contour_fixed_point_index(f, z0, mult, start), IndexMethod::contour};
}

// ---------------------------------------------------------------------------
// Perturbation of a simple parabolic orbit of odd period k

enum class PerturbationCase { two_period_k, parabolic, one_period_2k, unresolved };

inline const char* to_string(PerturbationCase c) {
  switch (c) {
    case PerturbationCase::two_period_k: return "a";
    case PerturbationCase::parabolic: return "b";
    case PerturbationCase::one_period_2k: return "c";
    case PerturbationCase::unresolved: return "unresolved";
  }
  return "?";
}

struct Trichotomy {
  PerturbationCase tag = PerturbationCase::unresolved;
  Cplx z1, z2;
  Cplx rho1, rho2;
};

/// The two fixed points of (p^2)^k near a seed: the nearest root, then the
/// nearest root of the deflated function.
inline std::optional<std::pair<Cplx, Cplx>> nearby_fixed_pair(const MapSpec& m, int k,
                                                              Cplx z_seed) {
  // the seed may sit exactly on a critical point of F (a real parabolic point
  // moved off the cusp), so start from a small ring as well
  std::vector<Cplx> roots;
  auto add = [&](Cplx z) {
    for (Cplx r : roots)
      if (std::abs(r - z) <= kDedupTolerance * (1.0 + std::abs(z))) return;
    roots.push_back(z);
  };
  for (double radius : {0.0, 1e-4, 1e-3, 1e-2}) {
    const int spokes = radius == 0.0 ? 1 : 6;
    for (int j = 0; j < spokes; ++j) {
      const Cplx start = z_seed + std::polar(radius, 2.0 * pi * (j + 0.25) / spokes);
      try {
        add(newton_refine(m, start, k, 200));
      } catch (const Error&) {
      }
    }
    if (roots.size() >= 2) break;
  }
  if (roots.empty()) return std::nullopt;
  std::sort(roots.begin(), roots.end(),
            [&](Cplx a, Cplx b) { return std::abs(a - z_seed) < std::abs(b - z_seed); });
  const Cplx z1 = roots[0];
  if (roots.size() >= 2) return std::make_pair(z1, roots[1]);
  const double dist = std::max(std::abs(z1 - z_seed), 1e-6);
  for (double offset : {2.0, -2.0, 1.0}) {
    for (Cplx dir : {Cplx{0.0, 1.0}, Cplx{1.0, 0.0}, Cplx{0.0, -1.0}}) {
      auto z2 = detail::deflated_newton(m, z_seed + offset * dist * dir, k, {z1});
      if (!z2) continue;
      try {
        const Cplx r2 = newton_refine(m, *z2, k);
        if (std::abs(r2 - z1) > 0.0) return std::make_pair(z1, r2);
      } catch (const Error&) {
      }
    }
  }
  return std::make_pair(z1, z1);
}

inline Trichotomy perturbation_trichotomy(const MapSpec& m, int k, Cplx z_seed) {
  Trichotomy t;
  auto pair = nearby_fixed_pair(m, k, z_seed);
  if (!pair) return t;
  t.z1 = pair->first;
  t.z2 = pair->second;
  t.rho1 = return_map_jet(m, t.z1, k).d1;
  t.rho2 = return_map_jet(m, t.z2, k).d1;
  const double sep = std::abs(t.z1 - t.z2);
  const double scale = 1.0 + std::abs(t.z1);
  // a double root is only resolved to about sqrt(eps) by Newton; test the
  // critical point of F between the pair instead
  if (sep < 1e-4 * scale && std::abs(t.rho1 - 1.0) < 1e-3) {
    const auto zm = refine_multiple_root(m, 0.5 * (t.z1 + t.z2), k);
    if (zm && std::abs(return_map(m, *zm, k) - *zm) < 1e-12 * scale) {
      const Cplx rho = return_map_jet(m, *zm, k).d1;
      if (std::abs(rho - 1.0) < 1e-6) {
        t.z1 = t.z2 = *zm;
        t.rho1 = t.rho2 = rho;
        t.tag = PerturbationCase::parabolic;
        return t;
      }
    }
  }
  if (sep < kDedupTolerance * scale) return t;
  // the image under p^k separates the cases
  const Cplx image = iterate(m, t.z1, k);
  const double tol = std::max(1e-10, 1e-4 * sep);
  if (std::abs(image - t.z1) < tol) {
    t.tag = PerturbationCase::two_period_k;
  } else if (std::abs(image - t.z2) < tol) {
    t.tag = PerturbationCase::one_period_2k;
  }
  return t;
}

}  // namespace multicorn
