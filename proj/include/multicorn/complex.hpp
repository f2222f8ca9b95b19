#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "multicorn/error.hpp"

namespace multicorn {

using Cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr Cplx I{0.0, 1.0};

inline bool is_finite(Cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline Cplx require_finite(Cplx z, const char* where) {
  if (!is_finite(z)) throw Error(ErrorKind::non_finite, where);
  return z;
}

/// Integer power by repeated squaring. Only +,-,* are used, so conj(ipow(z,n))
/// == ipow(conj(z),n) bit for bit.
inline Cplx ipow(Cplx z, int n) {
  Cplx result{1.0, 0.0};
  Cplx base = z;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

inline double ipow(double x, int n) {
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= x;
    n >>= 1;
    if (n) x *= x;
  }
  return result;
}

/// Wraps a real number to (-1/2, 1/2].
inline double wrap_half(double x) {
  double r = x - std::round(x);
  if (r <= -0.5) r += 1.0;
  return r;
}

}  // namespace multicorn
