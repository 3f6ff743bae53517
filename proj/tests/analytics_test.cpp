#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "lbnm/analytics.hpp"
#include "lbnm/operator.hpp"

using namespace lbnm;
using namespace lbnm::analytics;

namespace {

// u(theta_j) = sum_{|m| < n/2} c_m e^{i m theta_j}
ComplexVector from_spectrum(std::size_t n, const std::function<Complex(int)>& coefficient) {
  ComplexVector u(n);
  const int half = static_cast<int>(n / 2);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    Complex s = 0.0;
    for (int m = -half + 1; m < half; ++m) s += coefficient(m) * std::polar(1.0, m * t);
    u[j] = s;
  }
  return u;
}

ComplexVector unit_circle(const op::ExactField& f, std::size_t n) {
  ComplexVector u(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    u[j] = f(Point2{std::cos(t), std::sin(t)});
  }
  return u;
}

}  // namespace

TEST(ErrorReport, IdenticalVectors) {
  const ComplexVector a{1.0, Complex(2.0, -1.0), 3.0};
  const auto r = error_report(a, a);
  EXPECT_EQ(r.two_norm, 0.0);
  EXPECT_EQ(r.inf_norm, 0.0);
  EXPECT_EQ(r.rms, 0.0);
  EXPECT_EQ(r.point_count, 3u);
}

TEST(ErrorReport, UnitErrorVector) {
  const ComplexVector exact{0.0, 0.0, 0.0};
  const ComplexVector numeric{1.0, 0.0, 0.0};
  const auto r = error_report(exact, numeric, {2.5, 0.01});
  EXPECT_DOUBLE_EQ(r.two_norm, 1.0);
  EXPECT_DOUBLE_EQ(r.inf_norm, 1.0);
  EXPECT_DOUBLE_EQ(r.rms, 1.0 / std::sqrt(3.0));
  EXPECT_EQ(r.learn_seconds, 2.5);
  EXPECT_EQ(r.apply_seconds, 0.01);
}

TEST(ErrorReport, NormOrdering) {
  ComplexVector exact(100), numeric(100);
  for (int i = 0; i < 100; ++i) numeric[i] = Complex(std::sin(i * 1.3), std::cos(i * 0.7));
  const auto r = error_report(exact, numeric);
  EXPECT_LE(r.inf_norm, r.two_norm);
  EXPECT_LE(r.two_norm, std::sqrt(100.0) * r.inf_norm);
}

TEST(ErrorReport, LengthMismatch) {
  EXPECT_THROW(error_report(ComplexVector(3), ComplexVector(4)), DimensionMismatch);
}

TEST(WeightedL2, QuadratureOfConstantError) {
  const ComplexVector exact(4, 0.0);
  const ComplexVector numeric(4, Complex(0.0, 2.0));
  const std::vector<double> w(4, std::numbers::pi / 2.0);
  EXPECT_NEAR(weighted_l2(exact, numeric, w), 2.0 * std::sqrt(2.0 * std::numbers::pi), 1e-14);
  EXPECT_THROW(weighted_l2(exact, numeric, std::vector<double>(3)), DimensionMismatch);
}

TEST(FitDecay, ExactGeometricData) {
  std::vector<std::pair<double, double>> s;
  for (int m = 10; m <= 40; m += 5) s.emplace_back(m, 3.0 * std::pow(2.0, -m));
  const auto fit = fit_decay(s);
  EXPECT_NEAR(fit.rate, -std::log10(2.0), 1e-12);
  EXPECT_NEAR(fit.intercept, std::log10(3.0), 1e-11);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_EQ(fit.window.first, 10.0);
  EXPECT_EQ(fit.window.second, 40.0);
}

TEST(FitDecay, ConstantErrors) {
  const std::vector<std::pair<double, double>> s{{1, 0.5}, {2, 0.5}, {3, 0.5}, {4, 0.5}};
  const auto fit = fit_decay(s);
  EXPECT_EQ(fit.rate, 0.0);
  EXPECT_GE(fit.r_squared, 0.0);
  EXPECT_LE(fit.r_squared, 1.0);
}

TEST(FitDecay, FloorAndErrors) {
  const std::vector<std::pair<double, double>> s{{1, 1e-2}, {2, 1e-3}, {3, 1e-4}, {4, 1e-5}, {5, 1e-13}};
  const auto fit = fit_decay(s, 1e-12);
  EXPECT_EQ(fit.used, 4u);
  EXPECT_NEAR(fit.rate, -1.0, 1e-12);
  EXPECT_THROW(fit_decay(s, 1e-3), std::invalid_argument);
  const std::vector<std::pair<double, double>> bad{{1, 1.0}, {2, 0.0}, {3, 1.0}, {4, 1.0}};
  EXPECT_THROW(fit_decay(bad), std::invalid_argument);
}

TEST(EstimateRho, ConstructedSpectrum) {
  const auto u = from_spectrum(256, [](int m) { return Complex(std::pow(2.0, -std::abs(m))); });
  const auto est = estimate_rho(u);
  EXPECT_NEAR(est.rho, 2.0, 1e-3);
  EXPECT_GT(est.fit.r_squared, 0.999);
}

TEST(EstimateRho, PointSourceOutsideUnitCircle) {
  const auto u = unit_circle(op::PointSource{{1.5, 0.0}, 2.0}, 256);
  const auto est = estimate_rho(u);
  EXPECT_NEAR(est.rho, 1.5, 0.15);
}

TEST(EstimateRho, ScaleInvariant) {
  auto u = unit_circle(op::PointSource{{0.0, 1.8}, 3.0}, 128);
  const double base = estimate_rho(u).rho;
  for (auto& z : u) z *= Complex(-3.0, 7.5);
  EXPECT_NEAR(estimate_rho(u).rho, base, 1e-9 * base);
}

TEST(EstimateRho, EntireFieldDecaysTooFast) {
  const auto u = unit_circle(op::PlaneProduct{2.0}, 256);
  EXPECT_THROW(estimate_rho(u), DecayTooFast);
  EXPECT_THROW(estimate_rho(ComplexVector(64)), DecayTooFast);
}

TEST(EstimateRho, RejectsBadSampleCounts) {
  EXPECT_THROW(estimate_rho(ComplexVector(32, 1.0)), std::invalid_argument);
  EXPECT_THROW(estimate_rho(ComplexVector(100, 1.0)), std::invalid_argument);
}

TEST(SpectralS, OrderZeroComposition) {
  const Complex s = spectral_s(0, 1.0, 2.0, 1.0);
  const Complex want{-0.61345610195964192, 0.26910993606653859};
  EXPECT_LT(std::abs(s - want), 1e-14);
}

TEST(SpectralS, EvenInOrder) {
  for (int m : {1, 2, 7, 30}) EXPECT_EQ(spectral_s(m, 1.0, 2.0, 0.8), spectral_s(-m, 1.0, 2.0, 0.8));
}

TEST(SpectralS, DecayBoundedByRhoPower) {
  const double rho = 2.0;
  for (int m = 5; m <= 40; ++m) {
    const double scaled = std::abs(spectral_s(m, 1.0, rho, 1.0)) * std::pow(rho, m);
    EXPECT_LE(scaled, 1.0) << m;
    EXPECT_GE(scaled * m, 0.1) << m;
  }
}

TEST(SpectralS, RejectsBadArguments) {
  EXPECT_THROW(spectral_s(1, 0.0, 2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(spectral_s(1, 1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(spectral_s(1, 1.0, 2.0, 1.5), std::invalid_argument);
}

TEST(HelmholtzResidual, SmallForExactSolution) {
  const op::ExactField f = op::PlaneWave{{1.0, 0.0}, 4.0};
  const Complex r = helmholtz_residual(f, {0.2, 0.1}, 4.0, 1e-3);
  EXPECT_LT(std::abs(r), 1e-3);
}
