#pragma once
// Error norms, log-linear decay fits and the Fourier-decay estimate of the
// analytic-continuation radius of boundary data.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lbnm/specfun.hpp"
#include "lbnm/types.hpp"

namespace lbnm::analytics {

struct Timings {
  double learn_seconds = 0.0;
  double apply_seconds = 0.0;
};

struct ErrorReport {
  double two_norm = 0.0;  // raw Euclidean norm, not RMS
  double inf_norm = 0.0;
  double rms = 0.0;
  std::size_t point_count = 0;
  double learn_seconds = 0.0;
  double apply_seconds = 0.0;
};

inline ErrorReport error_report(std::span<const Complex> exact, std::span<const Complex> numeric,
                                Timings timings = {}) {
  if (exact.size() != numeric.size()) {
    throw DimensionMismatch("exact has " + std::to_string(exact.size()) + " values, numeric has " +
                            std::to_string(numeric.size()));
  }
  ErrorReport r;
  r.point_count = exact.size();
  r.learn_seconds = timings.learn_seconds;
  r.apply_seconds = timings.apply_seconds;
  // Scaled accumulation so huge or tiny errors do not over/underflow.
  double scale = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) scale = std::max(scale, std::abs(numeric[i] - exact[i]));
  r.inf_norm = scale;
  if (scale == 0.0) return r;
  if (!std::isfinite(scale)) {
    r.two_norm = r.rms = scale;
    return r;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double e = std::abs(numeric[i] - exact[i]) / scale;
    sum += e * e;
  }
  r.two_norm = scale * std::sqrt(sum);
  r.rms = r.two_norm / std::sqrt(static_cast<double>(r.point_count));
  return r;
}

/// sqrt(sum_j |Gamma_j| |numeric_j - exact_j|^2), a quadrature of the boundary L2 error.
inline double weighted_l2(std::span<const Complex> exact, std::span<const Complex> numeric,
                          std::span<const double> weights) {
  if (exact.size() != numeric.size() || exact.size() != weights.size()) {
    throw DimensionMismatch("weighted norm needs equal-length exact, numeric and weights");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) sum += weights[i] * std::norm(numeric[i] - exact[i]);
  return std::sqrt(sum);
}

struct DecayFit {
  double rate = 0.0;  // slope of log10(error) per unit of the abscissa
  double intercept = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  std::size_t used = 0;
};

/// Least-squares line through (x, log10 error). Samples with error below
/// `floor` are dropped first.
inline DecayFit fit_decay(std::span<const std::pair<double, double>> samples, double floor = 0.0) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [x, err] : samples) {
    if (!std::isfinite(x) || !std::isfinite(err)) throw std::invalid_argument("decay samples must be finite");
    if (!(err > 0.0)) throw std::invalid_argument("decay samples must have positive errors");
    if (err >= floor) pts.emplace_back(x, std::log10(err));
  }
  if (pts.size() < 4) {
    throw std::invalid_argument("need at least 4 samples above the floor to fit a decay rate, have " +
                                std::to_string(pts.size()));
  }
  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("decay samples need at least two distinct abscissae");
  DecayFit fit;
  fit.rate = sxy / sxx;
  fit.intercept = my - fit.rate * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : pts) {
    const double r = y - (fit.intercept + fit.rate * x);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
  fit.window = {lo->first, hi->first};
  fit.used = pts.size();
  return fit;
}

inline DecayFit fit_decay(const std::vector<std::pair<double, double>>& samples, double floor = 0.0) {
  return fit_decay(std::span<const std::pair<double, double>>(samples), floor);
}

class DecayTooFast : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct RhoEstimate {
  DecayFit fit;
  double rho = 0.0;
};

inline constexpr double coefficient_floor = 1e-14;

/// c_m = (1/n) sum_j u_j e^{-i m theta_j}, theta_j = 2 pi j / n.
inline Complex fourier_coefficient(std::span<const Complex> samples, int m) {
  const std::size_t n = samples.size();
  Complex sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    // Reduce m*j mod n before scaling so the angle stays accurate.
    const long long idx = (static_cast<long long>(m) * static_cast<long long>(j)) % static_cast<long long>(n);
    const double theta = -2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(n);
    sum += samples[j] * Complex(std::cos(theta), std::sin(theta));
  }
  return sum / static_cast<double>(n);
}

/// Fits log10|c_m| against |m| over |m| in [n/8, n/4] and returns
/// rho = 10^{-rate}. Coefficients below coefficient_floor times the largest
/// coefficient are excluded.
inline RhoEstimate estimate_rho(std::span<const Complex> samples) {
  const std::size_t n = samples.size();
  if (n < 64 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("sample count must be a power of two of at least 64, got " + std::to_string(n));
  }
  const int half = static_cast<int>(n / 2);
  double peak = 0.0;
  for (int m = -half + 1; m < half; ++m) peak = std::max(peak, std::abs(fourier_coefficient(samples, m)));
  if (!(peak > 0.0)) throw DecayTooFast("samples are identically zero");
  const int lo = static_cast<int>(n / 8);
  const int hi = static_cast<int>(n / 4);
  std::vector<std::pair<double, double>> band;
  for (int m = lo; m <= hi; ++m) {
    for (int sign : {1, -1}) {
      const double c = std::abs(fourier_coefficient(samples, sign * m)) / peak;
      if (c >= coefficient_floor) band.emplace_back(static_cast<double>(m), c);
    }
  }
  if (band.size() < 4) {
    throw DecayTooFast("Fourier coefficients fall below " + std::to_string(coefficient_floor) +
                       " of the peak across the fitting band; decay too fast to fit");
  }
  RhoEstimate est;
  est.fit = fit_decay(band);
  est.rho = std::pow(10.0, -est.fit.rate);
  return est;
}

/// (pi i / 2) H_m(k rho) J_m(k r); even in m.
inline Complex spectral_s(int m, double k, double rho, double r) {
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  if (!(rho > 1.0)) throw std::invalid_argument("rho must exceed 1");
  if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("r must lie in (0, 1]");
  const int order = std::abs(m);
  return Complex(0.0, std::numbers::pi / 2.0) * specfun::hankel1(order, k * rho) * specfun::bessel_j(order, k * r);
}

/// Five-point approximation of (Laplacian + k^2) u at x.
template <class Field>
Complex helmholtz_residual(const Field& u, const Point2& x, double k, double h) {
  const Complex c = u(x);
  const Complex lap = (u(Point2{x.x + h, x.y}) + u(Point2{x.x - h, x.y}) + u(Point2{x.x, x.y + h}) +
                       u(Point2{x.x, x.y - h}) - 4.0 * c) /
                      (h * h);
  return lap + k * k * c;
}

}  // namespace lbnm::analytics
