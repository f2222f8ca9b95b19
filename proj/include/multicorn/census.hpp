#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "multicorn/complex.hpp"
#include "multicorn/core.hpp"
#include "multicorn/error.hpp"
#include "multicorn/parallel.hpp"

namespace multicorn {

struct CensusReport {
  int d = 2;
  int n = 1;
  std::int64_t predicted = 0;
  std::vector<Cplx> found_centers;
  bool match = false;
  // filled when the numerical count disagrees with the recursion
  std::string note;
};

/// Multibrot-style count of period-n solutions of the critical relation.
inline std::int64_t multibrot_count(int d, int n) {
  if (d < 2 || n < 1) throw Error(ErrorKind::invalid_argument, "need d >= 2 and n >= 1");
  static thread_local std::map<std::pair<int, int>, std::int64_t> memo;
  if (auto it = memo.find({d, n}); it != memo.end()) return it->second;
  std::int64_t s = 1;
  for (int j = 1; j < n; ++j) s *= d;
  for (int k = 1; k < n; ++k)
    if (n % k == 0) s -= multibrot_count(d, k);
  memo[{d, n}] = s;
  return s;
}

/// Hyperbolic components of period n: the recursion plus the correction for
/// periods that are twice an odd number.
inline std::int64_t component_count(int d, int n) {
  std::int64_t s = multibrot_count(d, n);
  if (n % 2 == 0 && (n / 2) % 2 == 1) s += 2 * multibrot_count(d, n / 2);
  return s;
}

inline Cplx critical_orbit_point(int d, Cplx c, int n) {
  const MapSpec m(d, c);
  Cplx z = 0.0;
  for (int j = 0; j < n; ++j) {
    z = multicorn::apply(m, z);
    if (!is_finite(z)) return z;
  }
  return z;
}

namespace detail {

// c -> p_c^n(0) is only real-analytic, so Newton runs on R^2 with a
// finite-difference Jacobian.
inline std::optional<Cplx> center_newton(int d, int n, Cplx c) {
  auto G = [&](Cplx x) { return critical_orbit_point(d, x, n); };
  const double bound = 4.0 * std::pow(2.0, 1.0 / (d - 1)) + 4.0;
  for (int step = 0; step < 80; ++step) {
    const Cplx g = G(c);
    if (!is_finite(g)) return std::nullopt;
    if (std::abs(g) < 1e-14) return c;
    const double h = 1e-6 * std::max(1.0, std::abs(c));
    const Cplx gx = (G(c + h) - G(c - h)) / (2.0 * h);
    const Cplx gy = (G(c + I * h) - G(c - I * h)) / (2.0 * h);
    const double det = gx.real() * gy.imag() - gy.real() * gx.imag();
    if (!std::isfinite(det) || std::abs(det) < 1e-300) return std::nullopt;
    // solve [gx gy] (dx, dy) = -g
    const double dx = (-g.real() * gy.imag() + g.imag() * gy.real()) / det;
    const double dy = (-gx.real() * g.imag() + gx.imag() * g.real()) / det;
    Cplx delta(dx, dy);
    if (std::abs(delta) > 0.5) delta *= 0.5 / std::abs(delta);
    c += delta;
    if (std::abs(c) > bound) return std::nullopt;
    if (std::abs(delta) < 1e-15 * std::max(1.0, std::abs(c))) break;
  }
  const Cplx g = G(c);
  if (is_finite(g) && std::abs(g) < 1e-10) return c;
  return std::nullopt;
}

}  // namespace detail

inline bool has_exact_period(int d, Cplx c, int n, double tol = 1e-8) {
  for (int m = 1; m < n; ++m)
    if (n % m == 0 && std::abs(critical_orbit_point(d, c, m)) < tol) return false;
  return true;
}

inline std::vector<Cplx> find_centers(int d, int n) {
  if (d < 2 || n < 1) throw Error(ErrorKind::invalid_argument, "need d >= 2 and n >= 1");
  if (n * std::log2(static_cast<double>(d)) > 16.0)
    throw Error(ErrorKind::invalid_argument, "period too large for the start grid");
  double dn = 1.0;
  for (int j = 0; j < n; ++j) dn *= d;
  const double radius = std::pow(2.0, 1.0 / (d - 1)) + 0.5;
  // polar grid with about 40 d^n starts; ring count ~ sqrt of the total
  const int total = static_cast<int>(40.0 * dn);
  const int rings = std::max(4, static_cast<int>(std::sqrt(total / 4.0)));
  std::vector<Cplx> starts;
  starts.push_back(Cplx(1e-3, 2e-3));
  for (int r = 1; r <= rings; ++r) {
    const double rad = radius * r / rings;
    const int spokes = std::max(8, static_cast<int>(std::ceil(static_cast<double>(total) * (2 * r - 1) / (rings * rings))));
    for (int s = 0; s < spokes; ++s)
      starts.push_back(std::polar(rad, 2.0 * pi * (s + 0.5 * (r % 2) + 0.1) / spokes));
  }

  std::vector<std::optional<Cplx>> hits(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { hits[i] = detail::center_newton(d, n, starts[i]); });

  std::vector<Cplx> centers;
  for (const auto& h : hits) {
    if (!h || !has_exact_period(d, *h, n)) continue;
    const bool dup = std::any_of(centers.begin(), centers.end(),
                                 [&](Cplx q) { return std::abs(q - *h) < 1e-9; });
    if (!dup) centers.push_back(*h);
  }
  std::sort(centers.begin(), centers.end(), [](Cplx a, Cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return centers;
}

inline CensusReport census_verify(int d, int n) {
  CensusReport r;
  r.d = d;
  r.n = n;
  r.predicted = component_count(d, n);
  r.found_centers = find_centers(d, n);
  const auto found = static_cast<std::int64_t>(r.found_centers.size());
  r.match = found == r.predicted;
  if (!r.match) {
    r.note = "recursion predicts " + std::to_string(r.predicted) + ", Newton found " +
             std::to_string(found);
    if (n % 2 == 0 && (n / 2) % 2 == 1) {
      const auto plain = multibrot_count(d, n);
      r.note += found == plain ? "; count matches the recursion without the twice-odd term"
                               : "; neither count matches";
    }
  }
  return r;
}

}  // namespace multicorn
