#pragma once
/**
 * @file operator.hpp
 * @brief Learning the discrete boundary-to-solution operator of the 2D
 * Dirichlet Helmholtz problem from fundamental-solution training data.
 *
 * Training solutions are Phi(x_i^, .) for M sources on a circle of radius R
 * enclosing the domain. With V_{ji} = Phi(x_i^, x_j) over N boundary
 * collocation points, the learned operator is
 *
 *     W = V^* (V V^* + alpha I)^{-1}            (M x N)
 *
 * and the solution for boundary data f is u(x) = b_x W f with
 * b_x = (Phi(x_1^, x), ..., Phi(x_M^, x)).
 *
 * A LearnedOperator may additionally be bound to a fixed query set, in
 * which case the Q x N matrix A = B_q W (the discrete solution operator at
 * those points) is stored and applying it to new boundary data is a single
 * matrix-vector product.
 */

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lbnm/geometry.hpp"
#include "lbnm/io.hpp"
#include "lbnm/lintik.hpp"
#include "lbnm/specfun.hpp"
#include "lbnm/types.hpp"

namespace lbnm::op {

using geometry::BoundaryCurve;
using geometry::PointSet;
using geometry::Spacing;
using lintik::ComplexMatrix;

inline constexpr double alpha_floor = 1e-15;

/// alpha ~ M N R^{-2M}, floored so it never underflows.
inline double default_alpha(std::size_t m, std::size_t n, double radius, double floor = alpha_floor) {
  const double log_alpha = std::log(static_cast<double>(m) * static_cast<double>(n)) -
                           2.0 * static_cast<double>(m) * std::log(radius);
  return std::max(std::exp(log_alpha), floor);
}

struct WaveProblem {
  double k = 1.0;
  BoundaryCurve curve = BoundaryCurve::circle(1.0);
  std::size_t n = 64;  // collocation points
  std::size_t m = 64;  // sources
  double source_radius = 2.0;
  std::optional<double> alpha;  // unset: default_alpha(m, n, R, min_alpha)
  double min_alpha = alpha_floor;
  Spacing spacing = Spacing::arclength;

  [[nodiscard]] double effective_alpha() const {
    return alpha ? *alpha : default_alpha(m, n, source_radius, min_alpha);
  }

  void validate() const {
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("wavenumber k must be positive");
    if (!(effective_alpha() > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (n < 4) throw std::invalid_argument("need at least 4 collocation points");
    if (m < 2) throw std::invalid_argument("need at least 2 source points");
    if (!(source_radius > curve.max_radius())) {
      throw std::invalid_argument("source radius " + io::format_double(source_radius) +
                                  " must exceed the curve's circumscribing radius " +
                                  io::format_double(curve.max_radius()));
    }
  }

  [[nodiscard]] PointSet collocation() const { return geometry::collocation_points(curve, n, spacing); }
  [[nodiscard]] PointSet sources() const { return geometry::source_points(source_radius, m); }
};

// ---------------------------------------------------------------------------
// Closed-form Helmholtz solutions used as reference fields.

/// sin(k x / sqrt2) sin(k y / sqrt2)
struct PlaneProduct {
  double k;
};

/// Phi(source, x)
struct PointSource {
  Point2 source;
  double k;
};

/// Phi(first, x) - Phi(second, x)
struct Dipole {
  Point2 first;
  Point2 second;
  double k;
};

/// exp(i k d.x), d normalised on construction
struct PlaneWave {
  Point2 direction;
  double k;
};

class ExactField {
 public:
  using Variant = std::variant<PlaneProduct, PointSource, Dipole, PlaneWave>;

  template <class T>
    requires std::is_constructible_v<Variant, T>
  ExactField(T field) : v_(std::move(field)) {  // NOLINT(implicit)
    if (auto* pw = std::get_if<PlaneWave>(&v_)) {
      const double len = std::hypot(pw->direction.x, pw->direction.y);
      if (!(len > 0.0)) throw std::invalid_argument("plane wave direction must be nonzero");
      pw->direction = {pw->direction.x / len, pw->direction.y / len};
    }
  }

  [[nodiscard]] const Variant& variant() const { return v_; }

  [[nodiscard]] Complex operator()(const Point2& x) const {
    return std::visit(
        [&x](const auto& f) -> Complex {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PlaneProduct>) {
            const double s = f.k / std::numbers::sqrt2;
            return {std::sin(s * x.x) * std::sin(s * x.y), 0.0};
          } else if constexpr (std::is_same_v<T, PointSource>) {
            return specfun::phi_2d(f.source, x, f.k);
          } else if constexpr (std::is_same_v<T, Dipole>) {
            return specfun::phi_2d(f.first, x, f.k) - specfun::phi_2d(f.second, x, f.k);
          } else {
            const double phase = f.k * (f.direction.x * x.x + f.direction.y * x.y);
            return {std::cos(phase), std::sin(phase)};
          }
        },
        v_);
  }

  [[nodiscard]] std::vector<Point2> singular_points() const {
    if (const auto* ps = std::get_if<PointSource>(&v_)) return {ps->source};
    if (const auto* d = std::get_if<Dipole>(&v_)) return {d->first, d->second};
    return {};
  }

  [[nodiscard]] double wavenumber() const {
    return std::visit([](const auto& f) { return f.k; }, v_);
  }

  [[nodiscard]] std::string name() const {
    switch (v_.index()) {
      case 0: return "plane_product";
      case 1: return "point_source";
      case 2: return "dipole";
      default: return "plane_wave";
    }
  }

 private:
  Variant v_;
};

/// f_j = field(x_j)
inline ComplexVector boundary_trace(const ExactField& field, const PointSet& collocation) {
  const double scale = [&] {
    double s = 0.0;
    for (const auto& p : collocation.points) s = std::max(s, std::hypot(p.x, p.y));
    return s;
  }();
  for (const auto& sp : field.singular_points()) {
    for (const auto& p : collocation.points) {
      if (std::hypot(sp.x - p.x, sp.y - p.y) <= 1e-12 * std::max(scale, 1.0)) {
        throw SingularPoint("exact field is singular on the boundary at (" + io::format_double(p.x) + ", " +
                            io::format_double(p.y) + ")");
      }
    }
  }
  ComplexVector f;
  f.reserve(collocation.size());
  for (const auto& p : collocation.points) f.push_back(field(p));
  return f;
}

// ---------------------------------------------------------------------------
// Training matrix and learned operator.

/// V_{ji} = Phi(source_i, collocation_j), N x M.
inline ComplexMatrix assemble_training_matrix(const PointSet& collocation, const PointSet& sources, double k) {
  ComplexMatrix v(collocation.size(), sources.size());
  lintik::parallel_for(collocation.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      for (std::size_t i = 0; i < sources.size(); ++i) {
        v(j, i) = specfun::phi_2d(sources[i], collocation[j], k);
      }
    }
  }, 8);
  if (!v.all_finite()) throw std::runtime_error("training matrix has non-finite entries");
  return v;
}

inline ComplexMatrix assemble_training_matrix(const WaveProblem& problem) {
  problem.validate();
  return assemble_training_matrix(problem.collocation(), problem.sources(), problem.k);
}

struct QueryBinding {
  PointSet queries;
  ComplexMatrix solution;  // Q x N, row q is b_{x_q} W
  double bind_seconds = 0.0;
};

struct LearnedOperator {
  ComplexMatrix w;  // M x N
  PointSet sources;
  PointSet collocation;
  double k = 0.0;
  double alpha = 0.0;
  double learn_seconds = 0.0;  // assembly + factorisation (+ binding, if bound)
  std::optional<QueryBinding> binding;

  [[nodiscard]] std::size_t source_count() const { return w.rows(); }
  [[nodiscard]] std::size_t collocation_count() const { return w.cols(); }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Radius of the source circle if all sources share one, else 0.
inline double common_source_radius(const PointSet& sources) {
  if (sources.size() == 0) return 0.0;
  const double r0 = std::hypot(sources[0].x, sources[0].y);
  for (const auto& p : sources.points) {
    if (std::abs(std::hypot(p.x, p.y) - r0) > 1e-12 * r0) return 0.0;
  }
  return r0;
}

inline void fill_row(const PointSet& sources, double k, double circle_radius, const Point2& x,
                     std::span<Complex> out) {
  if (circle_radius > 0.0 && std::abs(std::hypot(x.x, x.y) - circle_radius) <= 1e-12 * circle_radius) {
    throw SingularPoint("query point (" + io::format_double(x.x) + ", " + io::format_double(x.y) +
                        ") lies on the source circle");
  }
  for (std::size_t i = 0; i < sources.size(); ++i) out[i] = specfun::phi_2d(sources[i], x, k);
}

}  // namespace detail

inline LearnedOperator learn(const PointSet& collocation, const PointSet& sources, double k, double alpha) {
  const auto start = std::chrono::steady_clock::now();
  LearnedOperator op;
  const ComplexMatrix v = assemble_training_matrix(collocation, sources, k);
  op.w = lintik::learn_operator_matrix(v, alpha);
  op.sources = sources;
  op.collocation = collocation;
  op.k = k;
  op.alpha = alpha;
  op.learn_seconds = detail::seconds_since(start);
  return op;
}

inline LearnedOperator learn(const WaveProblem& problem) {
  problem.validate();
  const auto start = std::chrono::steady_clock::now();
  LearnedOperator op = learn(problem.collocation(), problem.sources(), problem.k, problem.effective_alpha());
  op.learn_seconds = detail::seconds_since(start);
  return op;
}

/// b_x = (Phi(x_1^, x), ..., Phi(x_M^, x))
inline ComplexVector evaluate_row(const LearnedOperator& op, const Point2& x) {
  ComplexVector row(op.source_count());
  detail::fill_row(op.sources, op.k, detail::common_source_radius(op.sources), x, row);
  return row;
}

/// Precomputes b_x W for every query point.
inline QueryBinding bind(const LearnedOperator& op, const PointSet& queries) {
  const auto start = std::chrono::steady_clock::now();
  QueryBinding binding;
  binding.queries = queries;
  binding.solution = ComplexMatrix(queries.size(), op.collocation_count());
  const lintik::SplitMatrix w(op.w);
  const double circle = detail::common_source_radius(op.sources);
  lintik::parallel_for(queries.size(), [&](std::size_t begin, std::size_t end) {
    ComplexVector row(op.source_count());
    std::vector<double> acc_re, acc_im;
    for (std::size_t q = begin; q < end; ++q) {
      detail::fill_row(op.sources, op.k, circle, queries[q], row);
      w.row_times(row, binding.solution.row(q), acc_re, acc_im);
    }
  });
  binding.bind_seconds = detail::seconds_since(start);
  return binding;
}

/// Learns and binds to `queries`; learn_seconds covers both.
inline LearnedOperator learn(const WaveProblem& problem, const PointSet& queries) {
  const auto start = std::chrono::steady_clock::now();
  LearnedOperator op = learn(problem);
  op.binding = bind(op, queries);
  op.learn_seconds = detail::seconds_since(start);
  return op;
}

inline void check_boundary_data(const LearnedOperator& op, std::span<const Complex> f) {
  if (f.size() != op.collocation_count()) {
    throw DimensionMismatch("boundary data has length " + std::to_string(f.size()) +
                            " but the operator has " + std::to_string(op.collocation_count()) +
                            " collocation points");
  }
}

/// u(x) = b_x (W f) at every query point.
inline ComplexVector apply(const LearnedOperator& op, std::span<const Complex> f, const PointSet& queries) {
  check_boundary_data(op, f);
  const ComplexVector wf = lintik::multiply(op.w, f);
  const double circle = detail::common_source_radius(op.sources);
  ComplexVector u(queries.size());
  lintik::parallel_for(queries.size(), [&](std::size_t begin, std::size_t end) {
    ComplexVector row(op.source_count());
    for (std::size_t q = begin; q < end; ++q) {
      detail::fill_row(op.sources, op.k, circle, queries[q], row);
      u[q] = lintik::dot(row, wf);
    }
  });
  return u;
}

/// u = A f on the bound query set.
inline ComplexVector apply_bound(const LearnedOperator& op, std::span<const Complex> f) {
  if (!op.binding) throw std::logic_error("operator is not bound to a query set");
  check_boundary_data(op, f);
  return lintik::multiply(op.binding->solution, f);
}

// ---------------------------------------------------------------------------
// Classical MFS baseline.

/// mu = argmin ||f - V mu||^2 + alpha ||mu||^2
inline ComplexVector mfs_direct_fit(const WaveProblem& problem, std::span<const Complex> f) {
  const ComplexMatrix v = assemble_training_matrix(problem);
  return lintik::tikhonov_primal(v, f, problem.effective_alpha());
}

/// u(x) = sum_i mu_i Phi(x_i^, x)
inline ComplexVector mfs_evaluate(const PointSet& sources, std::span<const Complex> mu, double k,
                                  const PointSet& queries) {
  if (mu.size() != sources.size()) throw DimensionMismatch("MFS coefficients do not match source count");
  const double circle = detail::common_source_radius(sources);
  ComplexVector u(queries.size());
  lintik::parallel_for(queries.size(), [&](std::size_t begin, std::size_t end) {
    ComplexVector row(sources.size());
    for (std::size_t q = begin; q < end; ++q) {
      detail::fill_row(sources, k, circle, queries[q], row);
      u[q] = lintik::dot(row, mu);
    }
  });
  return u;
}

// ---------------------------------------------------------------------------
// Serialisation.
//
// Layout (all integers uint64, all reals IEEE-754 binary64, little-endian):
//   magic "LBNMOP01"
//   N, M, Q (Q = 0 when unbound)
//   k, alpha, learn_seconds
//   M x (x, y)            sources
//   N x (x, y, weight)    collocation
//   M x N x (re, im)      W, row-major
//   if Q > 0: Q x (x, y) queries, Q x N x (re, im) bound matrix, bind_seconds

namespace detail {

inline constexpr char magic[8] = {'L', 'B', 'N', 'M', 'O', 'P', '0', '1'};

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  void u64(std::uint64_t v) { raw(v); }
  void f64(double v) { raw(std::bit_cast<std::uint64_t>(v)); }
  void complex_block(const Complex* data, std::size_t count) {
    buf_.clear();
    buf_.reserve(count * 16);
    for (std::size_t i = 0; i < count; ++i) {
      append(std::bit_cast<std::uint64_t>(data[i].real()));
      append(std::bit_cast<std::uint64_t>(data[i].imag()));
    }
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  }

 private:
  void append(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) v = byteswap(v);
    char bytes[8];
    std::memcpy(bytes, &v, 8);
    buf_.insert(buf_.end(), bytes, bytes + 8);
  }
  void raw(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) v = byteswap(v);
    out_.write(reinterpret_cast<const char*>(&v), 8);
  }
  static std::uint64_t byteswap(std::uint64_t v) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  std::ofstream& out_;
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(std::ifstream& in, std::string name) : in_(in), name_(std::move(name)) {}
  std::uint64_t u64() {
    std::uint64_t v = 0;
    in_.read(reinterpret_cast<char*>(&v), 8);
    if (!in_) throw std::runtime_error(name_ + ": truncated operator file");
    if constexpr (std::endian::native == std::endian::big) v = byteswap(v);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void complex_block(Complex* data, std::size_t count) {
    buf_.resize(count * 2);
    in_.read(reinterpret_cast<char*>(buf_.data()), static_cast<std::streamsize>(count * 16));
    if (!in_) throw std::runtime_error(name_ + ": truncated operator file");
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t re = buf_[2 * i], im = buf_[2 * i + 1];
      if constexpr (std::endian::native == std::endian::big) {
        re = byteswap(re);
        im = byteswap(im);
      }
      data[i] = {std::bit_cast<double>(re), std::bit_cast<double>(im)};
    }
  }

 private:
  static std::uint64_t byteswap(std::uint64_t v) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  std::ifstream& in_;
  std::string name_;
  std::vector<std::uint64_t> buf_;
};

}  // namespace detail

inline void save_operator(const LearnedOperator& op, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    detail::Writer w(out);
    out.write(detail::magic, 8);
    const std::size_t n = op.collocation_count();
    const std::size_t m = op.source_count();
    const std::size_t q = op.binding ? op.binding->queries.size() : 0;
    w.u64(n);
    w.u64(m);
    w.u64(q);
    w.f64(op.k);
    w.f64(op.alpha);
    w.f64(op.learn_seconds);
    for (const auto& p : op.sources.points) {
      w.f64(p.x);
      w.f64(p.y);
    }
    for (std::size_t j = 0; j < n; ++j) {
      w.f64(op.collocation[j].x);
      w.f64(op.collocation[j].y);
      w.f64(op.collocation.weights.empty() ? 0.0 : op.collocation.weights[j]);
    }
    w.complex_block(op.w.data(), m * n);
    if (q > 0) {
      for (const auto& p : op.binding->queries.points) {
        w.f64(p.x);
        w.f64(p.y);
      }
      w.complex_block(op.binding->solution.data(), q * n);
      w.f64(op.binding->bind_seconds);
    }
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline LearnedOperator load_operator(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open operator file " + path.string());
  char head[8];
  in.read(head, 8);
  if (!in || std::memcmp(head, detail::magic, 8) != 0) {
    throw std::runtime_error(path.string() + " is not a serialized operator");
  }
  detail::Reader r(in, path.string());
  const std::size_t n = r.u64();
  const std::size_t m = r.u64();
  const std::size_t q = r.u64();
  constexpr std::size_t limit = std::size_t{1} << 32;
  if (n == 0 || m == 0 || n > limit || m > limit || q > limit) {
    throw std::runtime_error(path.string() + ": implausible operator dimensions");
  }
  LearnedOperator op;
  op.k = r.f64();
  op.alpha = r.f64();
  op.learn_seconds = r.f64();
  op.sources.role = geometry::PointRole::source;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = r.f64();
    op.sources.points.push_back({x, r.f64()});
  }
  op.collocation.role = geometry::PointRole::collocation;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = r.f64();
    const double y = r.f64();
    op.collocation.points.push_back({x, y});
    op.collocation.weights.push_back(r.f64());
  }
  op.w = ComplexMatrix(m, n);
  r.complex_block(op.w.data(), m * n);
  if (q > 0) {
    QueryBinding b;
    b.queries.role = geometry::PointRole::query;
    for (std::size_t i = 0; i < q; ++i) {
      const double x = r.f64();
      b.queries.points.push_back({x, r.f64()});
    }
    b.solution = ComplexMatrix(q, n);
    r.complex_block(b.solution.data(), q * n);
    b.bind_seconds = r.f64();
    op.binding = std::move(b);
  }
  return op;
}

}  // namespace lbnm::op
