#pragma once
/**
 * @file specfun.hpp
 * @brief Bessel functions J_m, Y_m and the Hankel function H_m^{(1)} of
 * integer order and real argument, and the free-space Helmholtz
 * fundamental solutions built on them.
 *
 * Evaluation strategy:
 *  - x >= asymptotic_threshold: Hankel's large-argument expansion for
 *    orders 0 and 1, summed down to its smallest term (at least 8
 *    correction terms).
 *  - x <  asymptotic_threshold: Miller backward recurrence normalised by
 *    J_0 + 2 sum J_2k = 1; Y_0 and Y_1 from the Neumann series over the
 *    same J values.
 *  - J_m for m >= 2 always comes from Miller recurrence, Y_m from upward
 *    recurrence (the stable direction for each).
 *  - Recurrences and expansions run in long double and round once, so
 *    values near a zero keep their relative accuracy. phi_2d uses a
 *    double-precision expansion of H_0 instead.
 *
 * All functions are pure. Errors are reported with exceptions:
 *  - std::out_of_range for orders outside [0, max_order]
 *  - std::domain_error for arguments outside the domain
 *  - std::overflow_error when Y_m overflows a double
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbnm/types.hpp"

namespace lbnm::specfun {

inline constexpr int max_order = 200;
inline constexpr double asymptotic_threshold = 20.0;

namespace detail {

inline void check_order(int order) {
  if (order < 0 || order > max_order) {
    throw std::out_of_range("Bessel order " + std::to_string(order) + " outside [0, " +
                            std::to_string(max_order) + "]");
  }
}

// Internal arithmetic is carried in long double so that values near a zero
// of J_m or Y_m keep their relative accuracy once rounded to double.
using Wide = long double;

template <class T>
struct BesselPairOf {
  T j;
  T y;
};
using BesselPair = BesselPairOf<Wide>;

// Hankel's asymptotic expansion for nu in {0, 1}, carried out in T.
template <class T = Wide>
BesselPairOf<T> hankel_asymptotic(int nu, double x_in) {
  const T x = x_in;
  const T mu = T(4) * nu * nu;
  const T eight_x = T(8) * x;
  const T tiny = std::numeric_limits<T>::epsilon() / T(100);
  T p = 1;
  T q = 0;
  T term = 1;
  T previous = std::numeric_limits<T>::infinity();
  for (int k = 1; k <= 80; ++k) {
    const T odd = T(2) * k - T(1);
    term *= (mu - odd * odd) / (k * eight_x);
    const T magnitude = std::abs(term);
    if (k > 8 && magnitude > previous) break;  // past the smallest term
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (k >= 8 && magnitude < tiny * std::abs(p)) break;
    previous = magnitude;
  }

  const T s = std::sin(x);
  const T c = std::cos(x);
  const T r = std::sqrt(T(0.5));
  // cos/sin of x - (nu/2 + 1/4) pi without subtracting an inexact pi from x
  const T cos_chi = nu == 0 ? (c + s) * r : (s - c) * r;
  const T sin_chi = nu == 0 ? (s - c) * r : -(s + c) * r;
  const T amplitude = std::sqrt(T(2) / (std::numbers::pi_v<T> * x));
  return {amplitude * (p * cos_chi - q * sin_chi), amplitude * (p * sin_chi + q * cos_chi)};
}

// Normalised J_0(x) .. J_top(x) from Miller's backward recurrence. The
// returned vector extends past `order` far enough for the Neumann sums.
inline std::vector<Wide> miller_sequence(int order, double x_in) {
  const double n_top = std::max(static_cast<double>(order), std::ceil(x_in));
  int start = static_cast<int>(n_top + 30.0 + std::sqrt(200.0 * n_top));
  if (start % 2 != 0) ++start;

  const Wide x = x_in;
  std::vector<Wide> j(static_cast<std::size_t>(start) + 2, 0.0L);
  j[start] = 1.0L;
  constexpr Wide big = 1e250L;
  for (int n = start; n >= 1; --n) {
    j[n - 1] = (2.0L * n / x) * j[n] - j[n + 1];
    if (std::abs(j[n - 1]) > big) {
      for (int i = n - 1; i <= start; ++i) j[i] /= big;
    }
  }

  Wide sum = 0.0L;
  for (int k = start; k >= 2; k -= 2) sum += j[k];
  sum = j[0] + 2.0L * sum;
  for (Wide& v : j) v /= sum;
  return j;
}

// Y_0 and Y_1 from the Neumann series over a normalised J sequence.
inline BesselPair neumann_y01(const std::vector<Wide>& j, double x_in) {
  const Wide pi = std::numbers::pi_v<Wide>;
  const Wide gamma = std::numbers::egamma_v<Wide>;
  const Wide x = x_in;
  const std::size_t top = j.size() - 1;

  Wide s0 = 0.0L;
  for (std::size_t k = (top / 2); k >= 1; --k) {
    const Wide t = j[2 * k] / static_cast<Wide>(k);
    s0 += (k % 2 == 0) ? t : -t;
  }
  Wide s1 = 0.0L;
  for (std::size_t k = (top - 1) / 2; k >= 1; --k) {
    const Wide kk = static_cast<Wide>(k);
    const Wide t = (2.0L * kk + 1.0L) * j[2 * k + 1] / (kk * (kk + 1.0L));
    s1 += (k % 2 == 0) ? t : -t;
  }
  const Wide log_term = std::log(x / 2.0L) + gamma;
  const Wide y0 = (2.0L / pi) * log_term * j[0] - (4.0L / pi) * s0;
  const Wide y1 = -(2.0L / (pi * x)) * j[0] + (2.0L / pi) * (log_term - 1.0L) * j[1] - (2.0L / pi) * s1;
  return {y0, y1};
}

inline BesselPair y01(double x) {
  if (x >= asymptotic_threshold) {
    return {hankel_asymptotic(0, x).y, hankel_asymptotic(1, x).y};
  }
  return neumann_y01(miller_sequence(1, x), x);
}

inline double y_upward(int order, Wide y0, Wide y1, double x_in) {
  const Wide x = x_in;
  Wide previous = y0;
  Wide current = order == 0 ? y0 : y1;
  for (int n = 1; n < order; ++n) {
    const Wide next = (2.0L * n / x) * current - previous;
    previous = current;
    current = next;
  }
  if (!(std::abs(current) <= static_cast<Wide>(std::numeric_limits<double>::max()))) {
    throw std::overflow_error("Y_" + std::to_string(order) + "(" + std::to_string(x_in) +
                              ") overflows double precision");
  }
  return static_cast<double>(current);
}

inline void check_positive_argument(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("Bessel Y / Hankel argument must be positive and finite, got " +
                            std::to_string(x));
  }
}

}  // namespace detail

/// J_order(x) for 0 <= order <= max_order and finite x >= 0.
inline double bessel_j(int order, double x) {
  detail::check_order(order);
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::domain_error("bessel_j argument must be finite and nonnegative");
  }
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  if (order <= 1 && x >= asymptotic_threshold) return static_cast<double>(detail::hankel_asymptotic(order, x).j);
  return static_cast<double>(detail::miller_sequence(order, x)[order]);
}

/// Y_order(x) for 0 <= order <= max_order and finite x > 0.
inline double bessel_y(int order, double x) {
  detail::check_order(order);
  detail::check_positive_argument(x);
  const auto [y0, y1] = detail::y01(x);
  return detail::y_upward(order, y0, y1, x);
}

/// H^{(1)}_order(x) = J_order(x) + i Y_order(x).
inline Complex hankel1(int order, double x) {
  detail::check_order(order);
  detail::check_positive_argument(x);
  if (order <= 1 && x >= asymptotic_threshold) {
    const auto [j, y] = detail::hankel_asymptotic(order, x);
    return {static_cast<double>(j), static_cast<double>(y)};
  }
  const std::vector<detail::Wide> seq = detail::miller_sequence(std::max(order, 1), x);
  const auto [y0, y1] = x >= asymptotic_threshold ? detail::y01(x) : detail::neumann_y01(seq, x);
  return {static_cast<double>(seq[order]), detail::y_upward(order, y0, y1, x)};
}

/// 2D fundamental solution (i/4) H_0^{(1)}(k |src - pt|).
inline Complex phi_2d(const Point2& src, const Point2& pt, double k) {
  if (!(k > 0.0)) throw std::domain_error("phi_2d requires a positive wavenumber");
  const double r = std::hypot(src.x - pt.x, src.y - pt.y);
  if (r == 0.0) throw SingularPoint("phi_2d evaluated at its source point");
  const double x = k * r;
  // |H_0| has no zeros, so double-precision asymptotics keep full relative accuracy here.
  Complex h;
  if (x >= asymptotic_threshold) {
    const auto [j, y] = detail::hankel_asymptotic<double>(0, x);
    h = {j, y};
  } else {
    h = hankel1(0, x);
  }
  return {-0.25 * h.imag(), 0.25 * h.real()};
}

/// 3D fundamental solution exp(i k r) / (4 pi r).
inline Complex phi_3d(const Point3& src, const Point3& pt, double k) {
  if (!(k >= 0.0)) throw std::domain_error("phi_3d requires a nonnegative wavenumber");
  const double dx = src.x - pt.x;
  const double dy = src.y - pt.y;
  const double dz = src.z - pt.z;
  const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (r == 0.0) throw SingularPoint("phi_3d evaluated at its source point");
  const double scale = 1.0 / (4.0 * std::numbers::pi * r);
  return {scale * std::cos(k * r), scale * std::sin(k * r)};
}

}  // namespace lbnm::specfun
