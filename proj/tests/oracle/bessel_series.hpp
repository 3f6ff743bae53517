#pragma once
// Extended-precision ascending-series reference values for J_m and Y_m.
// Test-only: independent of the recurrences and asymptotics in specfun.hpp.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>

namespace lbnm::oracle {

using boost::multiprecision::mpfr_float;

struct SeriesValue {
  double j;
  double y;
};

// Working precision: the series terms peak near e^x / sqrt(2 pi x), so the
// cancellation costs about x / ln(10) digits.
inline unsigned digits_for(double x) { return 60u + static_cast<unsigned>(std::ceil(0.4343 * x)); }

inline SeriesValue bessel_series(int m, double x_in) {
  const unsigned digits = digits_for(x_in);
  mpfr_float::default_precision(digits);
  const mpfr_float x(x_in);
  const mpfr_float half = x / 2;
  const mpfr_float q = -half * half;
  const mpfr_float eps = pow(mpfr_float(10), -static_cast<int>(digits) + 5);
  const mpfr_float pi = boost::math::constants::pi<mpfr_float>();
  const mpfr_float gamma = boost::math::constants::euler<mpfr_float>();

  mpfr_float m_factorial = 1;
  for (int i = 2; i <= m; ++i) m_factorial *= i;

  // term_k = (-x^2/4)^k / (k! (m+k)!)
  // J_m = (x/2)^m sum term_k
  // Y_m tail = -(1/pi)(x/2)^m sum [psi(k+1) + psi(m+k+1)] term_k
  mpfr_float term = 1 / m_factorial;
  mpfr_float h_k = 0;  // harmonic number H_k
  mpfr_float h_mk = 0;  // H_{m+k}
  for (int i = 1; i <= m; ++i) h_mk += mpfr_float(1) / i;
  mpfr_float sum_j = 0;
  mpfr_float sum_psi = 0;
  for (int k = 0;; ++k) {
    if (k > 0) {
      term *= q / (mpfr_float(k) * mpfr_float(m + k));
      h_k += mpfr_float(1) / k;
      h_mk += mpfr_float(1) / (m + k);
    }
    sum_j += term;
    sum_psi += (h_k + h_mk - 2 * gamma) * term;
    if (k > x_in && abs(term) < eps * (abs(sum_j) + abs(sum_psi) + 1e-300)) break;
    if (k > 20000) break;
  }
  const mpfr_float power = pow(half, m);
  const mpfr_float j = power * sum_j;

  mpfr_float finite = 0;
  if (m > 0) {
    // sum_{k=0}^{m-1} (m-k-1)!/k! (x/2)^{2k-m}
    mpfr_float fact_ratio = 1;  // (m-1)!/0!
    for (int i = 2; i <= m - 1; ++i) fact_ratio *= i;
    mpfr_float pw = pow(half, -m);
    const mpfr_float half_sq = half * half;
    for (int k = 0; k < m; ++k) {
      finite += fact_ratio * pw;
      if (k + 1 < m) {
        fact_ratio /= mpfr_float(m - k - 1);
        fact_ratio /= mpfr_float(k + 1);
        pw *= half_sq;
      }
    }
  }
  const mpfr_float y = -finite / pi + 2 / pi * log(half) * j - power * sum_psi / pi;
  return {static_cast<double>(j), static_cast<double>(y)};
}

}  // namespace lbnm::oracle
