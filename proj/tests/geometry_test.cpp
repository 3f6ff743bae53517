#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "lbnm/geometry.hpp"

using namespace lbnm;
using namespace lbnm::geometry;

namespace {

constexpr double pi = std::numbers::pi;

// Composite Simpson rule with many panels, independent of the Gauss-Legendre path.
double simpson_length(const BoundaryCurve& c, int panels = 200000) {
  const double h = two_pi / panels;
  double sum = c.speed(0.0) + c.speed(two_pi);
  for (int i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * c.speed(i * h);
  return sum * h / 3.0;
}

}  // namespace

TEST(FlowerCurve, PointAtZeroAndPetalTip) {
  const auto c = flower_curve(0.5, 0.1, 6);
  EXPECT_NEAR(c.point(0.0).x, 0.4, 1e-15);
  EXPECT_NEAR(c.point(0.0).y, 0.0, 1e-15);
  const Point2 tip = c.point(pi / 6);
  EXPECT_NEAR(c.radius(pi / 6), 0.6, 1e-15);
  EXPECT_NEAR(tip.x, 0.6 * std::cos(pi / 6), 1e-15);
  EXPECT_NEAR(tip.y, 0.6 * std::sin(pi / 6), 1e-15);
}

TEST(FlowerCurve, ZeroAmplitudeIsCircle) {
  const auto c = flower_curve(0.5, 0.0, 1);
  for (double t : {0.0, 0.3, 2.0, 5.5}) {
    EXPECT_NEAR(c.point(t).x, 0.5 * std::cos(t), 1e-15);
    EXPECT_NEAR(c.point(t).y, 0.5 * std::sin(t), 1e-15);
  }
}

TEST(FlowerCurve, RejectsNonStarShapedParameters) {
  EXPECT_THROW(flower_curve(0.1, 0.1, 6), std::invalid_argument);
  EXPECT_THROW(flower_curve(0.1, 0.5, 6), std::invalid_argument);
  EXPECT_THROW(flower_curve(0.5, -0.1, 6), std::invalid_argument);
  EXPECT_THROW(flower_curve(0.5, 0.1, 0), std::invalid_argument);
}

TEST(BoundaryCurve, ClosedAndLengthMatchesIndependentQuadrature) {
  const auto c = flower_curve(0.5, 0.1, 6);
  EXPECT_NEAR(c.point(0.0).x, c.point(two_pi).x, 1e-15);
  EXPECT_NEAR(c.point(0.0).y, c.point(two_pi).y, 1e-15);
  EXPECT_NEAR(c.length(), simpson_length(c), 1e-10);
  EXPECT_NEAR(c.length(), 4.078568879831230732, 1e-12);
  EXPECT_NEAR(BoundaryCurve::circle(2.0).length(), 4.0 * pi, 1e-13);
}

TEST(BoundaryCurve, AreaOfFlower) {
  // (1/2) int (a - b cos nt)^2 dt = pi (a^2 + b^2 / 2)
  EXPECT_NEAR(flower_curve(0.5, 0.1, 6).area(), pi * (0.25 + 0.005), 1e-13);
}

TEST(BoundaryCurve, ArcLengthInverse) {
  const auto c = flower_curve(0.5, 0.1, 6);
  for (double s : {0.0, 0.1, 1.3, 2.9, 4.0}) {
    const double t = c.parameter_at_arc_length(s);
    EXPECT_NEAR(c.arc_length(0.0, t, 256), s, 1e-12) << "s=" << s;
  }
}

TEST(CollocationPoints, CircleOfFourPoints) {
  const auto set = collocation_points(BoundaryCurve::circle(1.0), 4);
  ASSERT_EQ(set.size(), 4u);
  const Point2 want[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(set[i].x, want[i].x, 1e-15);
    EXPECT_NEAR(set[i].y, want[i].y, 1e-15);
    EXPECT_NEAR(set.weights[i], pi / 2, 1e-14);
  }
  EXPECT_EQ(set.role, PointRole::collocation);
}

TEST(CollocationPoints, FlowerWeightsSumToLength) {
  const auto c = flower_curve(0.5, 0.1, 6);
  const double oracle = simpson_length(c);
  for (Spacing sp : {Spacing::parameter, Spacing::arclength}) {
    const auto set = collocation_points(c, 288, sp);
    ASSERT_EQ(set.size(), 288u);
    double sum = 0.0;
    for (double w : set.weights) {
      EXPECT_GT(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum, oracle, 1e-6 * oracle);
  }
}

TEST(CollocationPoints, FirstPointIsGammaZero) {
  const auto c = flower_curve(0.5, 0.1, 6);
  for (Spacing sp : {Spacing::parameter, Spacing::arclength}) {
    const auto set = collocation_points(c, 8, sp);
    EXPECT_EQ(set[0].x, c.point(0.0).x);
    EXPECT_EQ(set[0].y, c.point(0.0).y);
  }
}

TEST(CollocationPoints, PointsLieOnCurve) {
  const auto c = flower_curve(0.5, 0.1, 6);
  for (Spacing sp : {Spacing::parameter, Spacing::arclength}) {
    for (const auto& p : collocation_points(c, 288, sp).points) {
      const double theta = std::atan2(p.y, p.x);
      EXPECT_NEAR(std::hypot(p.x, p.y), c.radius(theta), 1e-13);
    }
  }
}

TEST(CollocationPoints, ParameterSpacingUsesEqualAngles) {
  const auto c = flower_curve(0.5, 0.1, 6);
  const auto set = collocation_points(c, 16, Spacing::parameter);
  for (std::size_t j = 0; j < 16; ++j) {
    const Point2 want = c.point(two_pi * static_cast<double>(j) / 16.0);
    EXPECT_EQ(set[j].x, want.x);
    EXPECT_EQ(set[j].y, want.y);
  }
}

TEST(CollocationPoints, ArclengthSpacingHasEqualGaps) {
  const auto c = flower_curve(0.5, 0.1, 6);
  const auto set = collocation_points(c, 64, Spacing::arclength);
  for (double w : set.weights) EXPECT_NEAR(w, c.length() / 64.0, 1e-9);
}

TEST(CollocationPoints, WeightsInvariantUnderIndexRotation) {
  // A flower with 6 petals and N = 288 repeats every 48 points.
  const auto set = collocation_points(flower_curve(0.5, 0.1, 6), 288, Spacing::parameter);
  for (std::size_t j = 0; j < 288; ++j) EXPECT_NEAR(set.weights[j], set.weights[(j + 48) % 288], 1e-14);
}

TEST(CollocationPoints, RejectsTooFewPoints) {
  EXPECT_THROW(collocation_points(BoundaryCurve::circle(1.0), 3), std::invalid_argument);
}

TEST(SourcePoints, Layout) {
  const auto four = source_points(2.0, 4);
  const Point2 want[] = {{2, 0}, {0, 2}, {-2, 0}, {0, -2}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(four[i].x, want[i].x, 1e-15);
    EXPECT_NEAR(four[i].y, want[i].y, 1e-15);
  }
  const auto many = source_points(1.07, 288);
  ASSERT_EQ(many.size(), 288u);
  EXPECT_EQ(many.role, PointRole::source);
  for (const auto& p : many.points) EXPECT_NEAR(std::hypot(p.x, p.y), 1.07, 1e-12);
}

TEST(SourcePoints, RejectsBadInput) {
  EXPECT_THROW(source_points(2.0, 1), std::invalid_argument);
  EXPECT_THROW(source_points(0.0, 8), std::invalid_argument);
}

TEST(InteriorGrid, UnitDiskPointsInside) {
  const auto grid = interior_grid(BoundaryCurve::circle(1.0), 100, 0.0);
  EXPECT_GT(grid.size(), 0u);
  for (const auto& p : grid.points) EXPECT_LT(p.x * p.x + p.y * p.y, 1.0);
}

TEST(InteriorGrid, MarginShrinksRegion) {
  const auto grid = interior_grid(BoundaryCurve::circle(1.0), 500, 0.5);
  for (const auto& p : grid.points) EXPECT_LT(std::hypot(p.x, p.y), 0.5);
}

TEST(InteriorGrid, FlowerCountNearTargetAndStrictlyInside) {
  const auto c = flower_curve(0.5, 0.1, 6);
  const auto grid = interior_grid(c, 37500, 0.0);
  EXPECT_NEAR(static_cast<double>(grid.size()), 37500.0, 0.05 * 37500.0);
  double min_gap = 1.0;
  for (const auto& p : grid.points) {
    min_gap = std::min(min_gap, c.radius(std::atan2(p.y, p.x)) - std::hypot(p.x, p.y));
  }
  EXPECT_GT(min_gap, 0.0);
}

TEST(InteriorGrid, RejectsDegenerateRequests) {
  const auto c = BoundaryCurve::circle(1.0);
  EXPECT_THROW(interior_grid(c, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(interior_grid(c, 10, 1.0), std::invalid_argument);
  EXPECT_THROW(interior_grid(c, 10, -0.1), std::invalid_argument);
}

TEST(PointSetCsv, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "lbnm_geometry_test";
  const auto set = collocation_points(flower_curve(0.5, 0.1, 6), 32);
  write_point_set_csv(set, dir / "c.csv");
  const auto back = read_point_set_csv(dir / "c.csv", PointRole::collocation);
  ASSERT_EQ(back.size(), set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_EQ(back[i].x, set[i].x);
    EXPECT_EQ(back[i].y, set[i].y);
    EXPECT_EQ(back.weights[i], set.weights[i]);
  }
  std::filesystem::remove_all(dir);
}
