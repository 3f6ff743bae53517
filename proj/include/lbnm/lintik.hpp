#pragma once
/**
 * @file lintik.hpp
 * @brief Dense complex matrices and Tikhonov-regularised least squares.
 *
 * Gram matrices, Cholesky factorisations and triangular solves are carried
 * out in long double; inputs and results are double. The dual form factors
 * V V^* + alpha I (N x N), the primal form V^* V + alpha I (M x M).
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lbnm/types.hpp"

namespace lbnm::lintik {

/// Dense row-major complex matrix with fixed shape.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols, Complex fill = {})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionMismatch("ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<Complex> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  [[nodiscard]] std::span<const Complex> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  [[nodiscard]] Complex* data() { return data_.data(); }
  [[nodiscard]] const Complex* data() const { return data_.data(); }

  [[nodiscard]] bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// A Cholesky pivot was not positive: the matrix is not (numerically)
/// Hermitian positive definite.
class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs fn(begin, end) over contiguous chunks of [0, count) on the
/// available hardware threads. Each index is handled by exactly one call.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t min_chunk = 64) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, std::max<std::size_t>(1, count / min_chunk));
  if (workers <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  }
  return out;
}

/// Right-hand operand of repeated row-times-matrix products, stored with
/// separated real and imaginary parts so the inner loop vectorises.
class SplitMatrix {
 public:
  explicit SplitMatrix(const ComplexMatrix& m) : rows_(m.rows()), cols_(m.cols()) {
    re_.resize(rows_ * cols_);
    im_.resize(rows_ * cols_);
    for (std::size_t k = 0; k < rows_ * cols_; ++k) {
      re_[k] = m.data()[k].real();
      im_[k] = m.data()[k].imag();
    }
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  /// out = row * M, with scratch buffers of length cols().
  void row_times(std::span<const Complex> row, std::span<Complex> out, std::vector<double>& acc_re,
                 std::vector<double>& acc_im) const {
    acc_re.assign(cols_, 0.0);
    acc_im.assign(cols_, 0.0);
    for (std::size_t l = 0; l < rows_; ++l) {
      const double br = row[l].real();
      const double bi = row[l].imag();
      const double* wr = re_.data() + l * cols_;
      const double* wi = im_.data() + l * cols_;
      double* ar = acc_re.data();
      double* ai = acc_im.data();
      for (std::size_t j = 0; j < cols_; ++j) {
        ar[j] += br * wr[j] - bi * wi[j];
        ai[j] += br * wi[j] + bi * wr[j];
      }
    }
    for (std::size_t j = 0; j < cols_; ++j) out[j] = {acc_re[j], acc_im[j]};
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> re_;
  std::vector<double> im_;
};

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("multiply: " + shape_string(a.rows(), a.cols()) + " times " +
                            shape_string(b.rows(), b.cols()));
  }
  ComplexMatrix out(a.rows(), b.cols());
  const SplitMatrix split(b);
  parallel_for(a.rows(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> acc_re, acc_im;
    for (std::size_t i = begin; i < end; ++i) split.row_times(a.row(i), out.row(i), acc_re, acc_im);
  });
  return out;
}

/// A x
inline ComplexVector multiply(const ComplexMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) {
    throw DimensionMismatch("matvec: " + shape_string(a.rows(), a.cols()) + " times length " +
                            std::to_string(x.size()));
  }
  ComplexVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double re = 0.0, im = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      re += r[j].real() * x[j].real() - r[j].imag() * x[j].imag();
      im += r[j].real() * x[j].imag() + r[j].imag() * x[j].real();
    }
    out[i] = {re, im};
  }
  return out;
}

/// Row vector times matrix, x A.
inline ComplexVector row_times(std::span<const Complex> x, const ComplexMatrix& a) {
  if (a.rows() != x.size()) {
    throw DimensionMismatch("row_times: length " + std::to_string(x.size()) + " times " +
                            shape_string(a.rows(), a.cols()));
  }
  ComplexVector out(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += x[i] * r[j];
  }
  return out;
}

/// Unconjugated dot product sum x_i y_i.
inline Complex dot(std::span<const Complex> x, std::span<const Complex> y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot: length mismatch");
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
  }
  return {re, im};
}

inline double norm2(std::span<const Complex> x) {
  double scale = 0.0;
  for (const auto& z : x) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& z : x) sum += std::norm(z / scale);
  return scale * std::sqrt(sum);
}

inline double frobenius_norm(const ComplexMatrix& a) {
  return norm2(std::span<const Complex>(a.data(), a.rows() * a.cols()));
}

namespace detail {

// Square or rectangular long-double complex array with split storage.
struct WideMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<long double> re;
  std::vector<long double> im;

  WideMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), re(r * c, 0.0L), im(r * c, 0.0L) {}

  static WideMatrix from(const ComplexMatrix& m) {
    WideMatrix w(m.rows(), m.cols());
    for (std::size_t k = 0; k < m.rows() * m.cols(); ++k) {
      w.re[k] = m.data()[k].real();
      w.im[k] = m.data()[k].imag();
    }
    return w;
  }

  [[nodiscard]] ComplexMatrix to_double() const {
    ComplexMatrix m(rows, cols);
    for (std::size_t k = 0; k < rows * cols; ++k) {
      m.data()[k] = {static_cast<double>(re[k]), static_cast<double>(im[k])};
    }
    return m;
  }
};

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("Tikhonov parameter alpha must be positive and finite");
  }
}

// V V^* + alpha I, rows of V paired.
inline WideMatrix gram_outer(const ComplexMatrix& v, double alpha) {
  const std::size_t n = v.rows();
  const std::size_t m = v.cols();
  const WideMatrix w = WideMatrix::from(v);
  WideMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const long double* ar = &w.re[i * m];
    const long double* ai = &w.im[i * m];
    for (std::size_t j = 0; j <= i; ++j) {
      const long double* br = &w.re[j * m];
      const long double* bi = &w.im[j * m];
      long double sr = 0.0L, si = 0.0L;
      for (std::size_t l = 0; l < m; ++l) {
        // a * conj(b)
        sr += ar[l] * br[l] + ai[l] * bi[l];
        si += ai[l] * br[l] - ar[l] * bi[l];
      }
      g.re[i * n + j] = sr;
      g.im[i * n + j] = si;
      g.re[j * n + i] = sr;
      g.im[j * n + i] = -si;
    }
    g.re[i * n + i] += alpha;
    g.im[i * n + i] = 0.0L;
  }
  return g;
}

// V^* V + alpha I.
inline WideMatrix gram_inner(const ComplexMatrix& v, double alpha) {
  return gram_outer(adjoint(v), alpha);
}

// In-place lower Cholesky factor A = L L^* of a Hermitian matrix.
class Cholesky {
 public:
  explicit Cholesky(WideMatrix a) : l_(std::move(a)) {
    const std::size_t n = l_.rows;
    auto& re = l_.re;
    auto& im = l_.im;
    for (std::size_t j = 0; j < n; ++j) {
      long double d = re[j * n + j];
      for (std::size_t k = 0; k < j; ++k) d -= re[j * n + k] * re[j * n + k] + im[j * n + k] * im[j * n + k];
      if (!(d > 0.0L) || !std::isfinite(static_cast<double>(d))) {
        throw NotPositiveDefinite("Cholesky pivot " + std::to_string(j) + " is not positive (" +
                                  std::to_string(static_cast<double>(d)) +
                                  "); regularisation parameter too small or matrix not positive definite");
      }
      const long double djj = std::sqrt(d);
      re[j * n + j] = djj;
      im[j * n + j] = 0.0L;
      for (std::size_t i = j + 1; i < n; ++i) {
        long double sr = re[i * n + j];
        long double si = im[i * n + j];
        for (std::size_t k = 0; k < j; ++k) {
          // L_ik conj(L_jk)
          const long double ar = re[i * n + k], ai = im[i * n + k];
          const long double br = re[j * n + k], bi = im[j * n + k];
          sr -= ar * br + ai * bi;
          si -= ai * br - ar * bi;
        }
        re[i * n + j] = sr / djj;
        im[i * n + j] = si / djj;
      }
      for (std::size_t k = j + 1; k < n; ++k) {
        re[j * n + k] = 0.0L;
        im[j * n + k] = 0.0L;
      }
    }
  }

  // Overwrites b (n x r) with A^{-1} b.
  void solve_in_place(WideMatrix& b) const {
    const std::size_t n = l_.rows;
    const std::size_t r = b.cols;
    const auto& lr = l_.re;
    const auto& li = l_.im;
    // L y = b
    for (std::size_t i = 0; i < n; ++i) {
      long double* yr = &b.re[i * r];
      long double* yi = &b.im[i * r];
      for (std::size_t k = 0; k < i; ++k) {
        const long double cr = lr[i * n + k], ci = li[i * n + k];
        const long double* xr = &b.re[k * r];
        const long double* xi = &b.im[k * r];
        for (std::size_t c = 0; c < r; ++c) {
          yr[c] -= cr * xr[c] - ci * xi[c];
          yi[c] -= cr * xi[c] + ci * xr[c];
        }
      }
      const long double d = lr[i * n + i];
      for (std::size_t c = 0; c < r; ++c) {
        yr[c] /= d;
        yi[c] /= d;
      }
    }
    // L^* x = y
    for (std::size_t ii = n; ii-- > 0;) {
      long double* yr = &b.re[ii * r];
      long double* yi = &b.im[ii * r];
      for (std::size_t k = ii + 1; k < n; ++k) {
        // conj(L_k,ii)
        const long double cr = lr[k * n + ii], ci = -li[k * n + ii];
        const long double* xr = &b.re[k * r];
        const long double* xi = &b.im[k * r];
        for (std::size_t c = 0; c < r; ++c) {
          yr[c] -= cr * xr[c] - ci * xi[c];
          yi[c] -= cr * xi[c] + ci * xr[c];
        }
      }
      const long double d = lr[ii * n + ii];
      for (std::size_t c = 0; c < r; ++c) {
        yr[c] /= d;
        yi[c] /= d;
      }
    }
  }

 private:
  WideMatrix l_;
};

}  // namespace detail

/// Solves A X = B for Hermitian positive definite A.
inline ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols()) throw DimensionMismatch("hermitian_solve: A is " + shape_string(a.rows(), a.cols()));
  if (b.rows() != a.rows()) {
    throw DimensionMismatch("hermitian_solve: A is " + shape_string(a.rows(), a.cols()) + ", B is " +
                            shape_string(b.rows(), b.cols()));
  }
  double scale = 0.0;
  for (std::size_t k = 0; k < a.rows() * a.cols(); ++k) scale = std::max(scale, std::abs(a.data()[k]));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (std::abs(a(i, j) - std::conj(a(j, i))) > 1e-12 * scale) {
        throw std::invalid_argument("hermitian_solve: A is not Hermitian at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      }
    }
  }
  const detail::Cholesky chol(detail::WideMatrix::from(a));
  detail::WideMatrix x = detail::WideMatrix::from(b);
  chol.solve_in_place(x);
  return x.to_double();
}

/// Dual (row) form: a* = b V^* (V V^* + alpha I)^{-1}, the minimiser of
/// ||a V - b||^2 + alpha ||a||^2. V is N x M, b has length M.
inline ComplexVector tikhonov_dual(const ComplexMatrix& v, std::span<const Complex> b, double alpha) {
  detail::check_alpha(alpha);
  if (b.size() != v.cols()) {
    throw DimensionMismatch("tikhonov_dual: V is " + shape_string(v.rows(), v.cols()) + ", b has length " +
                            std::to_string(b.size()));
  }
  // (b V^* G^{-1})^* = G^{-1} V conj(b)
  const std::size_t n = v.rows();
  const std::size_t m = v.cols();
  detail::WideMatrix y(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    long double sr = 0.0L, si = 0.0L;
    for (std::size_t j = 0; j < m; ++j) {
      const long double vr = v(i, j).real(), vi = v(i, j).imag();
      const long double br = b[j].real(), bi = -b[j].imag();
      sr += vr * br - vi * bi;
      si += vr * bi + vi * br;
    }
    y.re[i] = sr;
    y.im[i] = si;
  }
  const detail::Cholesky chol(detail::gram_outer(v, alpha));
  chol.solve_in_place(y);
  ComplexVector a(n);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = {static_cast<double>(y.re[i]), -static_cast<double>(y.im[i])};
  return a;
}

/// Primal (column) form: c* = (V^* V + alpha I)^{-1} V^* f, the minimiser
/// of ||f - V c||^2 + alpha ||c||^2. V is N x M, f has length N.
inline ComplexVector tikhonov_primal(const ComplexMatrix& v, std::span<const Complex> f, double alpha) {
  detail::check_alpha(alpha);
  if (f.size() != v.rows()) {
    throw DimensionMismatch("tikhonov_primal: V is " + shape_string(v.rows(), v.cols()) + ", f has length " +
                            std::to_string(f.size()));
  }
  const std::size_t n = v.rows();
  const std::size_t m = v.cols();
  detail::WideMatrix rhs(m, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const long double fr = f[i].real(), fi = f[i].imag();
    for (std::size_t j = 0; j < m; ++j) {
      // conj(V_ij) f_i
      const long double vr = v(i, j).real(), vi = -v(i, j).imag();
      rhs.re[j] += vr * fr - vi * fi;
      rhs.im[j] += vr * fi + vi * fr;
    }
  }
  const detail::Cholesky chol(detail::gram_inner(v, alpha));
  chol.solve_in_place(rhs);
  ComplexVector c(m);
  for (std::size_t j = 0; j < m; ++j) c[j] = {static_cast<double>(rhs.re[j]), static_cast<double>(rhs.im[j])};
  return c;
}

/// W = V^* (V V^* + alpha I)^{-1}, M x N, so that tikhonov_dual(V, b, alpha) = b W.
inline ComplexMatrix learn_operator_matrix(const ComplexMatrix& v, double alpha) {
  detail::check_alpha(alpha);
  const detail::Cholesky chol(detail::gram_outer(v, alpha));
  detail::WideMatrix x = detail::WideMatrix::from(v);  // G X = V, W = X^*
  chol.solve_in_place(x);
  ComplexMatrix w(v.cols(), v.rows());
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
      w(j, i) = {static_cast<double>(x.re[i * v.cols() + j]), -static_cast<double>(x.im[i * v.cols() + j])};
    }
  }
  return w;
}

/// ||a V - b||^2 + alpha ||a||^2
inline double tikhonov_dual_objective(const ComplexMatrix& v, std::span<const Complex> b,
                                      std::span<const Complex> a, double alpha) {
  if (b.size() != v.cols()) throw DimensionMismatch("tikhonov_dual_objective: b does not match V");
  const ComplexVector av = row_times(a, v);
  double residual = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) residual += std::norm(av[i] - b[i]);
  double penalty = 0.0;
  for (const auto& z : a) penalty += std::norm(z);
  return residual + alpha * penalty;
}

}  // namespace lbnm::lintik
