#pragma once

// Iteration primitives for the unicritical antipolynomial p_c(z) = conj(z)^d + c.
// The second iterate (z^d + conj(c))^d + c is holomorphic in z; every
// multiplier and index computation in the library goes through it.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "multicorn/complex.hpp"
#include "multicorn/error.hpp"

namespace multicorn {

struct MapSpec {
  int d = 2;
  Cplx c{0.0, 0.0};

  MapSpec() = default;
  MapSpec(int degree, Cplx parameter) : d(degree), c(parameter) {
    if (d < 2) throw Error(ErrorKind::invalid_argument, "degree must be >= 2");
    require_finite(c, "MapSpec parameter");
  }
};

struct OrbitRecord {
  std::vector<Cplx> points;
  bool escaped = false;
  std::optional<int> escape_iteration;
};

struct EscapeResult {
  int iterations = 0;
  bool escaped = false;
};

/// R(m) = max(|c|, 2^{1/(d-1)}) + 1. Outside this disk |p(z)| > |z|.
inline double escape_radius(const MapSpec& m) {
  return std::max(std::abs(m.c), std::pow(2.0, 1.0 / (m.d - 1))) + 1.0;
}

inline Cplx apply(const MapSpec& m, Cplx z) {
  return require_finite(ipow(std::conj(z), m.d) + m.c, "apply");
}

inline Cplx apply_second(const MapSpec& m, Cplx z) {
  return require_finite(ipow(ipow(z, m.d) + std::conj(m.c), m.d) + m.c, "apply_second");
}

/// Holomorphic derivative of apply_second: d^2 (z^d + conj c)^{d-1} z^{d-1}.
inline Cplx second_iterate_derivative(const MapSpec& m, Cplx z) {
  const double dd = static_cast<double>(m.d);
  const Cplx inner = ipow(z, m.d) + std::conj(m.c);
  return dd * dd * ipow(inner, m.d - 1) * ipow(z, m.d - 1);
}

/// Value and first two derivatives of the holomorphic second iterate.
struct Jet2 {
  Cplx value;
  Cplx d1;
  Cplx d2;
};

inline Jet2 second_iterate_jet(const MapSpec& m, Cplx z) {
  const int d = m.d;
  const double dd = d;
  const Cplx zd1 = ipow(z, d - 1);
  const Cplx inner = zd1 * z + std::conj(m.c);
  const Cplx inner_d1 = ipow(inner, d - 1);
  const Cplx value = inner_d1 * inner + m.c;
  // g = u^d with u = z^d + conj c, u' = d z^{d-1}, u'' = d(d-1) z^{d-2}
  const Cplx du = dd * zd1;
  const Cplx ddu = (d >= 2) ? dd * (dd - 1.0) * ipow(z, d - 2) : Cplx{0.0, 0.0};
  const Cplx g1 = dd * inner_d1;
  const Cplx g2 = (d >= 2) ? dd * (dd - 1.0) * ipow(inner, d - 2) : Cplx{0.0, 0.0};
  return {value, g1 * du, g2 * du * du + g1 * ddu};
}

/// Multiplier of the holomorphic return map p^{2k} at a point of period k
/// under the second iterate.
inline Cplx multiplier_of_return_map(const MapSpec& m, Cplx orbit_point, int k,
                                     double tol = 1e-8) {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "period must be >= 1");
  Cplx z = orbit_point;
  Cplx rho{1.0, 0.0};
  for (int j = 0; j < k; ++j) {
    rho *= second_iterate_derivative(m, z);
    z = apply_second(m, z);
  }
  if (std::abs(z - orbit_point) > tol * (1.0 + std::abs(orbit_point)))
    throw Error(ErrorKind::not_periodic, "orbit drifted by " + std::to_string(std::abs(z - orbit_point)));
  return require_finite(rho, "multiplier_of_return_map");
}

inline EscapeResult escape_time(const MapSpec& m, Cplx z, int max_iter, double radius) {
  const double r2 = radius * radius;
  for (int n = 0; n <= max_iter; ++n) {
    if (std::norm(z) > r2) return {n, true};
    if (n == max_iter) break;
    z = ipow(std::conj(z), m.d) + m.c;
  }
  return {max_iter, false};
}

inline EscapeResult escape_time(const MapSpec& m, Cplx z, int max_iter) {
  return escape_time(m, z, max_iter, escape_radius(m));
}

inline OrbitRecord orbit(const MapSpec& m, Cplx z, int n, double radius) {
  OrbitRecord rec;
  rec.points.reserve(static_cast<std::size_t>(n) + 1);
  rec.points.push_back(z);
  for (int j = 0; j < n; ++j) {
    if (std::abs(z) > radius) {
      rec.escaped = true;
      rec.escape_iteration = j;
      break;
    }
    z = multicorn::apply(m, z);
    rec.points.push_back(z);
  }
  if (!rec.escaped && std::abs(z) > radius) {
    rec.escaped = true;
    rec.escape_iteration = n;
  }
  return rec;
}

/// Bailout modulus for potential evaluation; |z|^d stays far from overflow.
inline double potential_bailout(int d) { return std::min(1e40, std::pow(1e300, 1.0 / d)); }

/// log of the Green's potential, log G(z). Usable where G itself underflows.
inline double log_green_potential(const MapSpec& m, Cplx z, int max_iter) {
  const double bailout = potential_bailout(m.d);
  const double log_d = std::log(static_cast<double>(m.d));
  for (int n = 0; n <= max_iter; ++n) {
    const double r = std::abs(z);
    if (r > bailout) return std::log(std::log(r)) - n * log_d;
    if (n == max_iter) break;
    z = multicorn::apply(m, z);
  }
  throw Error(ErrorKind::not_escaping, "orbit bounded within iteration budget");
}

/// G(z) = lim d^{-n} log |p^n(z)|.
inline double green_potential(const MapSpec& m, Cplx z, int max_iter) {
  const double bailout = potential_bailout(m.d);
  double scale = 1.0;
  for (int n = 0; n <= max_iter; ++n) {
    const double r = std::abs(z);
    if (r > bailout) return std::log(r) * scale;
    if (n == max_iter) break;
    z = multicorn::apply(m, z);
    scale /= m.d;
  }
  throw Error(ErrorKind::not_escaping, "orbit bounded within iteration budget");
}

}  // namespace multicorn
