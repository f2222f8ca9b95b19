#include <gtest/gtest.h>

#include "multicorn/census.hpp"
#include "multicorn/parabolic.hpp"

using namespace multicorn;

namespace {

const std::vector<ArcSample>& main_arc() {
  static const std::vector<ArcSample> arc = [] {
    const ArcSample mid = solve_parabolic(MapSpec(2, 0.25), 1, 0.5);
    return trace_full_arc(mid);
  }();
  return arc;
}

double iota_oracle(double theta) { return 1.0 / (2.0 * std::pow(std::cos(1.5 * theta), 2)); }

}  // namespace

TEST(MainArcClosedForm, Examples) {
  auto [c0, z0] = main_arc_closed_form(2, 0.0);
  EXPECT_NEAR(std::abs(c0 - 0.25), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(z0 - 0.5), 0.0, 1e-16);
  auto [c1, z1] = main_arc_closed_form(2, pi);
  EXPECT_NEAR(std::abs(c1 + 0.75), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(z1 + 0.5), 0.0, 1e-15);
  for (int d : {2, 3, 5}) {
    for (double theta : {2.0 * pi / 3.0, 0.4, -1.1}) {
      auto [c, z] = main_arc_closed_form(d, theta);
      const MapSpec m(d, c);
      EXPECT_NEAR(std::abs(multicorn::apply(m, z) - z), 0.0, 1e-15);
      EXPECT_NEAR(std::abs(multiplier_of_return_map(m, z, 1) - 1.0), 0.0, 1e-14);
    }
  }
}

TEST(SolveParabolic, SeedTowardMinusOneEndsAtTheCusp) {
  const auto [c, z] = seed_from_center(2, 1, 0.0, -1.0);
  const ArcSample s = solve_parabolic(MapSpec(2, c), 1, z);
  EXPECT_NEAR(std::abs(s.c + 0.75), 0.0, 1e-7);
  EXPECT_TRUE(s.cusp);
}

TEST(SolveParabolic, SeedOffTheAxisLandsOnTheDeltoid) {
  const auto [c, z] = seed_from_center(2, 1, 0.0, std::polar(1.0, pi / 5));
  const ArcSample s = solve_parabolic(MapSpec(2, c), 1, z);
  EXPECT_LT(main_arc_deviation(2, s.c, s.z0), 1e-10);
  EXPECT_FALSE(s.cusp);
  EXPECT_NEAR(s.iota, iota_oracle(std::arg(s.z0)), 1e-9);
}

TEST(SolveParabolic, PeriodThreeSeedIsSimpleParabolic) {
  const auto centers = find_centers(2, 3);
  ASSERT_EQ(centers.size(), 3u);
  for (Cplx c0 : centers) {
    const auto [c, z] = seed_from_center(2, 3, c0, Cplx(0.0, 1.0));
    const ArcSample s = solve_parabolic(MapSpec(2, c), 3, z);
    const MapSpec m(2, s.c);
    EXPECT_NEAR(std::abs(return_map_jet(m, s.z0, 3).d1 - 1.0), 0.0, 1e-8);
    const PeriodicOrbit o = label_orbit(m, s.z0, 3);
    EXPECT_EQ(o.classification.type, OrbitType::parabolic);
    EXPECT_EQ(o.classification.multiplicity, 1);
    EXPECT_EQ(o.period_under_p, 3);
    EXPECT_LT(std::abs(s.iota_imag), 1e-6);
    EXPECT_FALSE(std::isnan(s.h));
  }
}

TEST(SolveParabolic, EvenPeriodIsRejected) {
  EXPECT_THROW(solve_parabolic(MapSpec(2, 0.25), 2, 0.5), Error);
}

TEST(TraceArc, FollowsTheDeltoidBetweenCusps) {
  const auto& arc = main_arc();
  ASSERT_GT(arc.size(), 60u);
  for (const auto& s : arc) EXPECT_LT(main_arc_deviation(2, s.c, s.z0), 1e-9);
  EXPECT_TRUE(arc.front().cusp);
  EXPECT_TRUE(arc.back().cusp);
  EXPECT_NEAR(std::arg(arc.front().z0), -pi / 3, 1e-5);
  EXPECT_NEAR(std::arg(arc.back().z0), pi / 3, 1e-5);
  for (std::size_t i = 1; i < arc.size(); ++i) EXPECT_GT(arc[i].arclen, arc[i - 1].arclen);
}

TEST(TraceArc, IndexIsRealMatchesTheOracleAndBlowsUpAtBothEnds) {
  const auto& arc = main_arc();
  double left = 0.0, right = 0.0;
  for (const auto& s : arc) {
    if (std::isnan(s.iota) || s.cusp) continue;
    EXPECT_LT(std::abs(s.iota_imag), 1e-6);
    EXPECT_NEAR(s.iota, iota_oracle(std::arg(s.z0)), 1e-7 * std::max(1.0, s.iota));
    (s.arclen < 0 ? left : right) = std::max(s.arclen < 0 ? left : right, s.iota);
  }
  EXPECT_GT(left, 10.0);
  EXPECT_GT(right, 10.0);
}

TEST(TraceArc, ChartsBuiltAlongTheArcAreNormalized) {
  for (const auto& s : main_arc()) {
    if (std::isnan(s.h)) continue;
    EXPECT_LT(s.chart_residual, 1e-6);
    EXPECT_LT(s.equator_defect, 1e-6);
  }
}

TEST(IndexProfile, OneZeroOneCrossingPerEnd) {
  const IndexProfile p = index_profile(main_arc());
  EXPECT_TRUE(p.h_monotone);
  EXPECT_EQ(p.h_zero_crossings, 1);
  EXPECT_LT(p.iota_at_h_zero, 1.0);
  EXPECT_NEAR(p.iota_at_h_zero, 0.5, 1e-6);
  ASSERT_EQ(p.crossings.size(), 2u);
  // iota = 1 where cos^2(3 theta / 2) = 1/2, theta = +-pi/6
  for (const auto& x : p.crossings) {
    const double theta = x.arclen < 0 ? -pi / 6 : pi / 6;
    EXPECT_NEAR(std::abs(x.c - main_arc_closed_form(2, theta).first), 0.0, 1e-8);
  }
  EXPECT_LT(p.crossings[0].h, 0.0);
  EXPECT_GT(p.crossings[1].h, 0.0);
}

TEST(BifurcationProbe, SidesAgreeWithTheIndexCriterion) {
  for (double theta : {0.0, 0.3, 0.8, -0.8}) {
    const auto [c, z] = main_arc_closed_form(2, theta);
    const ArcSample s = solve_parabolic(MapSpec(2, c), 1, z);
    const ProbeReport r = bifurcation_probe(s, {1e-6, 1e-5});
    EXPECT_TRUE(r.consistent) << theta;
    EXPECT_NE(r.outside_side, 0);
    for (const auto& e : r.entries) {
      if (e.side == r.outside_side) {
        EXPECT_EQ(e.result.tag, PerturbationCase::one_period_2k);
        EXPECT_EQ(e.attracting_2k, s.iota > 1.0) << theta;
      } else {
        EXPECT_EQ(e.result.tag, PerturbationCase::two_period_k);
      }
    }
  }
}

TEST(TraceArc, DegreeThreeMainArc) {
  const auto [c, z] = main_arc_closed_form(3, 0.1);
  const ArcSample s = solve_parabolic(MapSpec(3, c * 1.0001), 1, z);
  TraceOptions opt;
  opt.sample.with_height = false;
  const auto arc = trace_full_arc(s, opt);
  ASSERT_GT(arc.size(), 50u);
  for (const auto& a : arc) EXPECT_LT(main_arc_deviation(3, a.c, a.z0), 1e-9);
  EXPECT_TRUE(arc.front().cusp);
  EXPECT_TRUE(arc.back().cusp);
}
