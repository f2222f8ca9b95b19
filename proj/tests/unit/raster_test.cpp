#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "multicorn/census.hpp"
#include "multicorn/parabolic.hpp"
#include "multicorn/raster.hpp"

using namespace multicorn;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Viewport, PixelCentersRoundTrip) {
  const Viewport vp{Cplx(-0.5, 0.25), 3.0, 40, 30};
  for (int j : {0, 7, 29}) {
    for (int i : {0, 13, 39}) {
      const auto p = vp.to_pixel(vp.pixel(i, j));
      EXPECT_NEAR(p[0], i + 0.5, 1e-9);
      EXPECT_NEAR(p[1], j + 0.5, 1e-9);
    }
  }
  EXPECT_THROW((Viewport{0.0, -1.0, 4, 4}.validate()), Error);
  EXPECT_THROW((Viewport{0.0, 1.0, 0, 4}.validate()), Error);
}

TEST(Classify, ParameterExamples) {
  const PointClass inside = classify_parameter(2, 0.249, 5000);
  EXPECT_FALSE(inside.escaped);
  EXPECT_EQ(inside.period, 1);
  EXPECT_TRUE(classify_parameter(2, 0.251, 5000).escaped);
  const PointClass far = classify_parameter(2, 2.0, 5000);
  EXPECT_TRUE(far.escaped);
  EXPECT_LE(far.iterations, 3);
  for (double y : {1e-3, -1e-3}) EXPECT_FALSE(classify_parameter(2, Cplx(-0.75, y), 5000).escaped);
  EXPECT_EQ(classify_parameter(2, -0.7, 5000).period, 1);
}

TEST(Classify, CentersHaveTheirPeriod) {
  for (int n = 1; n <= 3; ++n) {
    for (Cplx c : find_centers(2, n)) {
      const PointClass p = classify_parameter(2, c, 5000);
      EXPECT_FALSE(p.escaped) << c;
      EXPECT_EQ(p.period, n) << c;
    }
  }
}

TEST(RenderJulia, ZeroParameterIsTheUnitDisk) {
  const Viewport vp{0.0, 3.0, 96, 96};
  const PixelGrid g = render_julia(MapSpec(2, 0.0), vp, 500);
  for (int j = 0; j < 96; ++j) {
    for (int i = 0; i < 96; ++i) {
      const double r = std::abs(vp.pixel(i, j));
      if (std::abs(r - 1.0) < 0.05) continue;
      EXPECT_EQ(g.at(i, j).escaped, r > 1.0) << i << "," << j;
    }
  }
}

TEST(RenderJulia, ParabolicParameterKeepsItsFixedPoint) {
  EXPECT_FALSE(classify_orbit(MapSpec(2, 0.25), 0.5, 2000, escape_radius(MapSpec(2, 0.25))).escaped);
}

TEST(RenderJulia, CantorDustHasNoInterior) {
  const PixelGrid g = render_julia(MapSpec(2, 2.0), Viewport{0.0, 4.0, 512, 512}, 200);
  for (auto e : g.escaped) ASSERT_EQ(e, 1);
}

TEST(RenderMulticorn, RealAxisMirrorIsExact) {
  for (int d : {2, 3}) {
    const Viewport vp{Cplx(-0.3, 0.0), 3.5, 61, 48};
    const PixelGrid g = render_multicorn(d, vp, 300);
    for (int j = 0; j < vp.pixels_y; ++j)
      for (int i = 0; i < vp.pixels_x; ++i) {
        const PointClass a = g.at(i, j), b = g.at(i, vp.pixels_y - 1 - j);
        ASSERT_EQ(a.iterations, b.iterations);
        ASSERT_EQ(a.escaped, b.escaped);
        ASSERT_EQ(a.period, b.period);
      }
  }
}

TEST(RenderMulticorn, ThreeFoldSymmetryOfTheTricorn) {
  // c -> e^{2 pi i/3} c preserves escape counts
  const Cplx w = std::polar(1.0, 2.0 * pi / 3.0);
  for (Cplx c : {Cplx(0.3, 0.1), Cplx(-1.2, 0.4), Cplx(0.1, 0.9), Cplx(-0.2, -0.3)}) {
    const PointClass a = classify_parameter(2, c, 1000), b = classify_parameter(2, w * c, 1000);
    EXPECT_EQ(a.escaped, b.escaped) << c;
    if (a.escaped) {
      EXPECT_NEAR(a.iterations, b.iterations, 1) << c;
    }
  }
}

TEST(Ppm, GoldenTricornIsByteExact) {
  const PixelGrid g = render_multicorn(2, Viewport{0.0, 4.0, 64, 64}, 256);
  const std::string expected = slurp(MULTICORN_GOLDEN_DIR "/tricorn64.ppm");
  ASSERT_FALSE(expected.empty());
  EXPECT_EQ(ppm_bytes(g, Palette::standard()), expected);
}

TEST(Ppm, SizesAndHeader) {
  const PixelGrid one = render_julia(MapSpec(2, 0.0), Viewport{Cplx(5.0, 0.0), 1.0, 1, 1}, 10);
  ASSERT_TRUE(one.at(0, 0).escaped);
  EXPECT_EQ(one.at(0, 0).iterations, 0);
  const std::string b = ppm_bytes(one, Palette::grayscale());
  EXPECT_EQ(b.size(), 14u);
  EXPECT_EQ(b.substr(0, 11), "P6\n1 1\n255\n");
  EXPECT_EQ(b.substr(11), std::string(3, '\0'));

  const PixelGrid two = render_multicorn(2, Viewport{Cplx(5.0, 0.0), 1.0, 2, 1}, 10);
  EXPECT_EQ(ppm_bytes(two, Palette::standard()).size(), std::string("P6\n2 1\n255\n").size() + 6);

  std::ostringstream os;
  write_ppm(two, Palette::standard(), os);
  EXPECT_EQ(os.str(), ppm_bytes(two, Palette::standard()));
}

TEST(Palette, PeriodColorsCycle) {
  const Palette p = Palette::standard();
  const Rgb a = p.color({0, false, 1}), b = p.color({0, false, 13});
  EXPECT_EQ(a.r, b.r);
  EXPECT_EQ(a.g, b.g);
  EXPECT_EQ(a.b, b.b);
  const Rgb e = p.color({300, true, 0}), f = p.color({44, true, 0});
  EXPECT_EQ(e.r, f.r);
  const Rgb z = p.color({5000, false, 0});
  EXPECT_EQ(z.r + z.g + z.b, 0);
}

TEST(Overlay, MapsToPixelCoordinates) {
  const Viewport vp{0.0, 4.0, 400, 400};
  std::vector<Cplx> pts;
  for (int i = 0; i <= 60; ++i) pts.push_back(main_arc_closed_form(2, -pi / 3 + i * (2 * pi / 3) / 60).first);
  const auto doc = export_overlay({{"arc", "deltoid", pts}, {"centers", "origin", {Cplx(0.0, 0.0)}}}, vp);
  ASSERT_EQ(doc["items"].size(), 2u);
  EXPECT_EQ(doc["items"][0]["kind"], "arc");
  EXPECT_EQ(doc["items"][0]["points"].size(), pts.size());
  for (const auto& p : doc["items"][0]["points"]) {
    EXPECT_GE(p[0].get<double>(), 0.0);
    EXPECT_LE(p[0].get<double>(), 400.0);
    EXPECT_GE(p[1].get<double>(), 0.0);
    EXPECT_LE(p[1].get<double>(), 400.0);
  }
  EXPECT_DOUBLE_EQ(doc["items"][1]["points"][0][0].get<double>(), 200.0);
  EXPECT_DOUBLE_EQ(doc["items"][1]["points"][0][1].get<double>(), 200.0);
  // upper half-plane maps to the top half of the image
  const auto up = vp.to_pixel(Cplx(0.0, 1.0));
  EXPECT_LT(up[1], 200.0);
  EXPECT_EQ(doc["viewport"]["pixels_x"], 400);
}
