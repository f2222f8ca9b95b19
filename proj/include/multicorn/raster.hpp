#pragma once

// Escape-time rasters of the parameter plane and of filled Julia sets, with
// attracting-period detection, binary PPM output and polyline overlays.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "multicorn/complex.hpp"
#include "multicorn/core.hpp"
#include "multicorn/error.hpp"
#include "multicorn/palette.hpp"
#include "multicorn/parallel.hpp"

namespace multicorn {

struct Viewport {
  Cplx center{0.0, 0.0};
  double width = 4.0;
  int pixels_x = 512;
  int pixels_y = 512;

  double pixel_size() const { return width / pixels_x; }
  double height() const { return pixel_size() * pixels_y; }

  void validate() const {
    if (!(width > 0.0) || !std::isfinite(width)) throw Error(ErrorKind::invalid_argument, "viewport width must be positive");
    if (pixels_x < 1 || pixels_y < 1) throw Error(ErrorKind::invalid_argument, "viewport needs at least one pixel");
    require_finite(center, "viewport center");
  }

  // Offsets from the center are exact half-integers times the pixel size,
  // so rows j and pixels_y - 1 - j of a real-centered view are conjugate.
  Cplx pixel(int i, int j) const {
    const double s = pixel_size();
    return {center.real() + (i - 0.5 * (pixels_x - 1)) * s, center.imag() + (0.5 * (pixels_y - 1) - j) * s};
  }

  /// Continuous pixel coordinates; the center of pixel (i, j) is (i + 0.5, j + 0.5).
  std::array<double, 2> to_pixel(Cplx c) const {
    const double s = pixel_size();
    return {(c.real() - center.real()) / s + 0.5 * pixels_x, (center.imag() - c.imag()) / s + 0.5 * pixels_y};
  }
};

struct PointClass {
  int iterations = 0;  // escape iteration, or the budget when bounded
  bool escaped = false;
  int period = 0;      // attracting period under p, 0 when escaped or not detected
};

inline constexpr double kCycleTolerance = 1e-9;

/// Escape test with Brent cycle detection on the same orbit.
inline PointClass classify_orbit(const MapSpec& m, Cplx z, int max_iter, double radius) {
  const double r2 = radius * radius;
  Cplx saved = z;
  int power = 1, lam = 0;
  for (int n = 0; n <= max_iter; ++n) {
    if (std::norm(z) > r2) return {n, true, 0};
    if (n == max_iter) break;
    z = ipow(std::conj(z), m.d) + m.c;
    ++lam;
    if (std::abs(z - saved) < kCycleTolerance) return {max_iter, false, lam};
    if (lam == power) {
      saved = z;
      power *= 2;
      lam = 0;
    }
  }
  return {max_iter, false, 0};
}

inline PointClass classify_parameter(int d, Cplx c, int max_iter) {
  const MapSpec m(d, c);
  return classify_orbit(m, 0.0, max_iter, escape_radius(m));
}

struct PixelGrid {
  Viewport viewport;
  std::vector<std::int32_t> iterations;  // row-major from the top-left
  std::vector<std::uint8_t> escaped;
  std::vector<std::int32_t> period;

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * viewport.pixels_x + i; }
  PointClass at(int i, int j) const {
    const std::size_t k = index(i, j);
    return {iterations[k], escaped[k] != 0, period[k]};
  }
};

namespace detail {

template <typename PerPixel>
PixelGrid render(const Viewport& vp, PerPixel&& f) {
  vp.validate();
  PixelGrid g;
  g.viewport = vp;
  const std::size_t n = static_cast<std::size_t>(vp.pixels_x) * vp.pixels_y;
  g.iterations.assign(n, 0);
  g.escaped.assign(n, 0);
  g.period.assign(n, 0);
  parallel_for(static_cast<std::size_t>(vp.pixels_y), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    for (int i = 0; i < vp.pixels_x; ++i) {
      const PointClass p = f(vp.pixel(i, j));
      const std::size_t k = g.index(i, j);
      g.iterations[k] = p.iterations;
      g.escaped[k] = p.escaped ? 1 : 0;
      g.period[k] = p.period;
    }
  });
  return g;
}

}  // namespace detail

inline PixelGrid render_multicorn(int d, const Viewport& vp, int max_iter) {
  if (max_iter < 1) throw Error(ErrorKind::invalid_argument, "max_iter must be >= 1");
  return detail::render(vp, [&](Cplx c) { return classify_parameter(d, c, max_iter); });
}

inline PixelGrid render_julia(const MapSpec& m, const Viewport& vp, int max_iter) {
  if (max_iter < 1) throw Error(ErrorKind::invalid_argument, "max_iter must be >= 1");
  const double radius = escape_radius(m);
  return detail::render(vp, [&](Cplx z) { return classify_orbit(m, z, max_iter, radius); });
}

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

struct Palette {
  std::array<Rgb, 256> escape{};
  std::array<Rgb, 12> period{};
  Rgb bounded{};  // interior without a detected period

  static Palette standard() {
    Palette p;
    for (std::size_t i = 0; i < 256; ++i)
      p.escape[i] = {kEscapePalette[3 * i], kEscapePalette[3 * i + 1], kEscapePalette[3 * i + 2]};
    for (std::size_t i = 0; i < 12; ++i)
      p.period[i] = {kPeriodPalette[3 * i], kPeriodPalette[3 * i + 1], kPeriodPalette[3 * i + 2]};
    return p;
  }

  static Palette grayscale() {
    Palette p;
    for (std::size_t i = 0; i < 256; ++i) {
      const auto v = static_cast<std::uint8_t>(i);
      p.escape[i] = {v, v, v};
    }
    p.period.fill({255, 255, 255});
    return p;
  }

  Rgb color(const PointClass& c) const {
    if (c.escaped) return escape[static_cast<std::size_t>(c.iterations) % escape.size()];
    if (c.period > 0) return period[static_cast<std::size_t>(c.period - 1) % period.size()];
    return bounded;
  }
};

/// Raw RGB payload, row-major from the top-left.
inline std::string rgb_bytes(const PixelGrid& g, const Palette& pal) {
  const int w = g.viewport.pixels_x, h = g.viewport.pixels_y;
  std::string out;
  out.reserve(static_cast<std::size_t>(w) * h * 3);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const Rgb c = pal.color(g.at(i, j));
      out.push_back(static_cast<char>(c.r));
      out.push_back(static_cast<char>(c.g));
      out.push_back(static_cast<char>(c.b));
    }
  }
  return out;
}

inline std::string ppm_bytes(const PixelGrid& g, const Palette& pal) {
  return "P6\n" + std::to_string(g.viewport.pixels_x) + " " + std::to_string(g.viewport.pixels_y) + "\n255\n" +
         rgb_bytes(g, pal);
}

inline void write_ppm(const PixelGrid& g, const Palette& pal, std::ostream& os) {
  const std::string bytes = ppm_bytes(g, pal);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorKind::invalid_argument, "could not write image");
}

inline void write_ppm(const PixelGrid& g, const Palette& pal, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::invalid_argument, "cannot open " + path);
  write_ppm(g, pal, f);
}

struct OverlayItem {
  std::string kind;  // "ray", "arc", "centers", ...
  std::string label;
  std::vector<Cplx> points;
};

inline nlohmann::json viewport_json(const Viewport& vp) {
  return {{"center", {vp.center.real(), vp.center.imag()}},
          {"width", vp.width},
          {"pixels_x", vp.pixels_x},
          {"pixels_y", vp.pixels_y}};
}

inline nlohmann::json export_overlay(const std::vector<OverlayItem>& items, const Viewport& vp) {
  vp.validate();
  nlohmann::json doc;
  doc["viewport"] = viewport_json(vp);
  doc["items"] = nlohmann::json::array();
  for (const auto& it : items) {
    nlohmann::json pts = nlohmann::json::array();
    for (Cplx c : it.points) {
      const auto p = vp.to_pixel(c);
      pts.push_back({p[0], p[1]});
    }
    doc["items"].push_back({{"kind", it.kind}, {"label", it.label}, {"points", pts}});
  }
  return doc;
}

}  // namespace multicorn
