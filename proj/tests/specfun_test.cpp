#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lbnm/specfun.hpp"
#include "oracle/bessel_series.hpp"
#include "oracle/sampling.hpp"

using namespace lbnm;
using specfun::bessel_j;
using specfun::bessel_y;
using specfun::hankel1;
using specfun::phi_2d;
using specfun::phi_3d;

namespace {

void expect_rel(double got, double want, double tol) {
  EXPECT_LE(std::abs(got - want), tol * std::abs(want)) << "got " << got << " want " << want;
}

}  // namespace

TEST(SeriesOracle, MatchesIndependentReferenceValues) {
  // Reference digits from an independent arbitrary-precision package.
  expect_rel(oracle::bessel_series(0, 1.0).j, 0.76519768655796655, 1e-16);
  expect_rel(oracle::bessel_series(0, 1.0).y, 0.088256964215676958, 1e-15);
  expect_rel(oracle::bessel_series(1, 2.5).j, 0.49709410246427404, 1e-15);
  expect_rel(oracle::bessel_series(1, 2.5).y, 0.14591813796678580, 1e-15);
}

TEST(BesselJ, ValuesAtOrigin) {
  EXPECT_EQ(bessel_j(0, 0.0), 1.0);
  EXPECT_EQ(bessel_j(1, 0.0), 0.0);
  EXPECT_EQ(bessel_j(17, 0.0), 0.0);
}

TEST(BesselJ, OrderZeroAtOne) { expect_rel(bessel_j(0, 1.0), 0.7651976865579666, 1e-14); }

TEST(BesselJ, RejectsBadOrderAndArgument) {
  EXPECT_THROW(bessel_j(-1, 1.0), std::out_of_range);
  EXPECT_THROW(bessel_j(201, 1.0), std::out_of_range);
  EXPECT_NO_THROW(bessel_j(200, 1.0));
  EXPECT_THROW(bessel_j(0, -1.0), std::domain_error);
  EXPECT_THROW(bessel_j(0, std::nan("")), std::domain_error);
}

TEST(BesselY, OrderZeroAtOne) { expect_rel(bessel_y(0, 1.0), 0.08825696421567696, 1e-14); }

TEST(BesselY, NearOriginIsLargeNegativeAndFinite) {
  const double y = bessel_y(0, 1e-9);
  EXPECT_TRUE(std::isfinite(y));
  EXPECT_LT(y, -10.0);
  expect_rel(y, oracle::bessel_series(0, 1e-9).y, 1e-13);
}

TEST(BesselY, RejectsNonPositiveArgument) {
  EXPECT_THROW(bessel_y(0, 0.0), std::domain_error);
  EXPECT_THROW(bessel_y(3, -2.0), std::domain_error);
  EXPECT_THROW(bessel_y(201, 2.0), std::out_of_range);
}

TEST(BesselY, OverflowIsReported) { EXPECT_THROW(bessel_y(200, 1e-3), std::overflow_error); }

TEST(BesselY, WronskianAtReferencePoint) {
  const double x = 7.5;
  const double w = bessel_j(4, x) * bessel_y(3, x) - bessel_j(3, x) * bessel_y(4, x);
  EXPECT_NEAR(w, 2.0 / (std::numbers::pi * x), 1e-10);
}

TEST(BesselY, WronskianOnFixedGrid) {
  for (double x : {0.5, 1.0, 5.0, 50.0, 200.0, 500.0}) {
    for (int m = 0; m <= 60; ++m) {
      double y_m = 0.0, y_m1 = 0.0;
      try {
        y_m = bessel_y(m, x);
        y_m1 = bessel_y(m + 1, x);
      } catch (const std::overflow_error&) {
        continue;
      }
      const double w = bessel_j(m + 1, x) * y_m - bessel_j(m, x) * y_m1;
      const double want = 2.0 / (std::numbers::pi * x);
      EXPECT_LE(std::abs(w - want), 1e-10 * std::max(1.0, want)) << "m=" << m << " x=" << x;
    }
  }
}

TEST(BesselJ, ThreeTermRecurrenceOnFixedGrid) {
  for (double x : {0.5, 1.0, 5.0, 50.0, 200.0, 500.0}) {
    for (int m = 1; m <= 60; ++m) {
      const double lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
      const double rhs = (2.0 * m / x) * bessel_j(m, x);
      const double scale = std::abs(bessel_j(m - 1, x)) + std::abs(bessel_j(m + 1, x));
      EXPECT_LE(std::abs(lhs - rhs), 1e-10 * scale) << "m=" << m << " x=" << x;
    }
  }
}

TEST(BesselJY, AsymptoticCrossoverIsContinuous) {
  const double below = std::nextafter(specfun::asymptotic_threshold, 0.0);
  const double at = specfun::asymptotic_threshold;
  for (int m : {0, 1}) {
    expect_rel(bessel_j(m, below), oracle::bessel_series(m, below).j, 1e-13);
    expect_rel(bessel_j(m, at), oracle::bessel_series(m, at).j, 1e-13);
    expect_rel(bessel_y(m, below), oracle::bessel_series(m, below).y, 1e-13);
    expect_rel(bessel_y(m, at), oracle::bessel_series(m, at).y, 1e-13);
  }
}

TEST(BesselJY, RandomisedAgainstSeriesOracle) {
  const auto result = oracle::compare_with_oracle(1000, 7);
  EXPECT_EQ(result.samples, 1000);
  EXPECT_LE(result.max_relative, 1e-12) << "worst at m=" << result.worst_order << " x=" << result.worst_x
                                        << (result.worst_is_y ? " (Y)" : " (J)");
}

TEST(Hankel1, OrderZeroAtOne) {
  const Complex h = hankel1(0, 1.0);
  expect_rel(h.real(), 0.76519768656, 1e-11);
  expect_rel(h.imag(), 0.08825696422, 1e-10);
}

TEST(Hankel1, ImaginaryPartNegativeBelowFirstZeroOfY0) { EXPECT_LT(hankel1(0, 0.5).imag(), 0.0); }

TEST(Hankel1, RealPartIsBesselJExactly) {
  for (int m : {0, 1, 2, 7, 40}) {
    for (double x : {0.3, 4.0, 19.5, 20.0, 123.4}) {
      EXPECT_EQ(hankel1(m, x).real(), bessel_j(m, x));
      EXPECT_EQ(hankel1(m, x).imag(), bessel_y(m, x));
    }
  }
}

TEST(Phi2d, ReferenceValue) {
  const Complex v = phi_2d({0, 0}, {1, 0}, 1.0);
  expect_rel(v.real(), -0.022064241053919239, 1e-14);
  expect_rel(v.imag(), 0.19129942163949164, 1e-14);
}

TEST(Phi2d, SymmetricInItsPoints) {
  const Complex ab = phi_2d({0, 0}, {1, 1}, 3.0);
  const Complex ba = phi_2d({1, 1}, {0, 0}, 3.0);
  EXPECT_EQ(ab, ba);
}

TEST(Phi2d, InvariantUnderRigidMotion) {
  const Point2 a{0.3, -0.2}, b{1.1, 0.7};
  const double th = 0.83;
  auto move = [th](Point2 p) {
    return Point2{std::cos(th) * p.x - std::sin(th) * p.y + 2.5, std::sin(th) * p.x + std::cos(th) * p.y - 1.25};
  };
  for (double k : {0.5, 5.0, 184.8}) {
    const Complex before = phi_2d(a, b, k);
    const Complex after = phi_2d(move(a), move(b), k);
    EXPECT_LE(std::abs(before - after), 1e-13 * std::abs(before) * std::max(1.0, k)) << "k=" << k;
  }
}

TEST(Phi2d, MatchesHankelForm) {
  for (double r : {0.01, 0.7, 3.0, 19.99, 20.0, 87.0, 450.0}) {
    const Complex want = Complex(0.0, 0.25) * hankel1(0, r);
    const Complex got = phi_2d({0, 0}, {r, 0}, 1.0);
    EXPECT_LE(std::abs(got - want), 1e-14 * std::abs(want)) << "r=" << r;
  }
}

TEST(Phi2d, SingularAtSourceAndNeedsPositiveK) {
  EXPECT_THROW(phi_2d({1, 2}, {1, 2}, 1.0), SingularPoint);
  EXPECT_THROW(phi_2d({0, 0}, {1, 0}, 0.0), std::domain_error);
}

TEST(Phi3d, ClosedFormValues) {
  const double inv4pi = 1.0 / (4.0 * std::numbers::pi);
  const Complex static_limit = phi_3d({0, 0, 0}, {1, 0, 0}, 0.0);
  EXPECT_NEAR(static_limit.real(), 0.07957747, 1e-8);
  EXPECT_EQ(static_limit.imag(), 0.0);
  const Complex half_turn = phi_3d({0, 0, 0}, {0, 1, 0}, std::numbers::pi);
  EXPECT_NEAR(half_turn.real(), -inv4pi, 1e-15);
  EXPECT_NEAR(half_turn.imag(), 0.0, 1e-15);
  const Complex far = phi_3d({0, 0, 0}, {1.5, 2.0, 0.0}, 17.0);
  EXPECT_NEAR(std::abs(far), inv4pi / 2.5, 1e-15);
  EXPECT_THROW(phi_3d({1, 1, 1}, {1, 1, 1}, 1.0), SingularPoint);
}
