#pragma once
/**
 * @file geometry.hpp
 * @brief Star-shaped boundary curves gamma(t) = rho(t) (cos t, sin t),
 * boundary collocation layouts with arc-length weights, source circles and
 * interior query lattices.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lbnm/io.hpp"
#include "lbnm/types.hpp"

namespace lbnm::geometry {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

namespace detail {

// Positive half of the 16-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<std::pair<double, double>, 8> gauss_legendre_16{{
    {0.095012509837637454, 0.18945061045506859},
    {0.28160355077925892, 0.18260341504492361},
    {0.45801677765722737, 0.16915651939500262},
    {0.61787624440264377, 0.14959598881657676},
    {0.755404408355003, 0.12462897125553403},
    {0.86563120238783176, 0.095158511682492591},
    {0.9445750230732326, 0.062253523938647706},
    {0.98940093499164994, 0.027152459411754037},
}};

template <class F>
double gauss_legendre(const F& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (const auto& [node, weight] : gauss_legendre_16) {
    sum += weight * (f(mid - half * node) + f(mid + half * node));
  }
  return sum * half;
}

}  // namespace detail

enum class CurveKind { circle, flower, custom };

enum class Spacing { parameter, arclength };

/// Closed star-shaped curve about the origin, parameterised by polar angle.
class BoundaryCurve {
 public:
  using RadiusFn = std::function<double(double)>;

  static BoundaryCurve circle(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw std::invalid_argument("circle radius must be positive");
    }
    BoundaryCurve c;
    c.kind_ = CurveKind::circle;
    c.a_ = radius;
    c.max_radius_ = radius;
    c.min_radius_ = radius;
    c.build_arc_table();
    return c;
  }

  /// rho(t) = a - b cos(n t).
  static BoundaryCurve flower(double a, double b, int n) {
    if (!(b >= 0.0) || !(a > b) || !std::isfinite(a)) {
      throw std::invalid_argument("flower curve needs a > b >= 0 (got a=" + io::format_double(a) +
                                  ", b=" + io::format_double(b) + ")");
    }
    if (n < 1) throw std::invalid_argument("flower petal count must be positive");
    BoundaryCurve c;
    c.kind_ = CurveKind::flower;
    c.a_ = a;
    c.b_ = b;
    c.n_ = n;
    c.max_radius_ = a + b;
    c.min_radius_ = a - b;
    c.build_arc_table();
    return c;
  }

  /// Arbitrary 2pi-periodic positive radius function and its derivative.
  static BoundaryCurve custom(RadiusFn radius, RadiusFn radius_derivative) {
    BoundaryCurve c;
    c.kind_ = CurveKind::custom;
    c.radius_fn_ = std::move(radius);
    c.radius_derivative_fn_ = std::move(radius_derivative);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    constexpr int samples = 4096;
    for (int i = 0; i < samples; ++i) {
      const double r = c.radius(two_pi * i / samples);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (!(lo > 0.0) || !std::isfinite(hi)) {
      throw std::invalid_argument("custom curve radius must stay positive and finite");
    }
    c.max_radius_ = hi;
    c.min_radius_ = lo;
    c.build_arc_table();
    return c;
  }

  [[nodiscard]] CurveKind kind() const { return kind_; }
  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double b() const { return b_; }
  [[nodiscard]] int petals() const { return n_; }
  [[nodiscard]] double max_radius() const { return max_radius_; }
  [[nodiscard]] double min_radius() const { return min_radius_; }

  [[nodiscard]] double radius(double t) const {
    switch (kind_) {
      case CurveKind::circle: return a_;
      case CurveKind::flower: return a_ - b_ * std::cos(n_ * t);
      case CurveKind::custom: return radius_fn_(t);
    }
    return 0.0;
  }

  [[nodiscard]] double radius_derivative(double t) const {
    switch (kind_) {
      case CurveKind::circle: return 0.0;
      case CurveKind::flower: return b_ * n_ * std::sin(n_ * t);
      case CurveKind::custom: return radius_derivative_fn_(t);
    }
    return 0.0;
  }

  [[nodiscard]] Point2 point(double t) const {
    const double r = radius(t);
    return {r * std::cos(t), r * std::sin(t)};
  }

  /// |gamma'(t)|
  [[nodiscard]] double speed(double t) const { return std::hypot(radius(t), radius_derivative(t)); }

  [[nodiscard]] double arc_length(double t0, double t1, int panels = 1) const {
    const double width = (t1 - t0) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      sum += detail::gauss_legendre([this](double t) { return speed(t); }, t0 + p * width,
                                    t0 + (p + 1) * width);
    }
    return sum;
  }

  [[nodiscard]] double length() const { return arc_table_.back(); }

  /// Enclosed area, 1/2 int rho^2 dt.
  [[nodiscard]] double area() const {
    constexpr int panels = 512;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      sum += detail::gauss_legendre(
          [this](double t) {
            const double r = radius(t);
            return r * r;
          },
          two_pi * p / panels, two_pi * (p + 1) / panels);
    }
    return 0.5 * sum;
  }

  /// Strict star-shape inside test: r < (1 - margin) rho(theta).
  [[nodiscard]] bool contains(const Point2& p, double margin = 0.0) const {
    const double r = std::hypot(p.x, p.y);
    return r < (1.0 - margin) * radius(std::atan2(p.y, p.x));
  }

  /// Parameter t at which the arc length measured from t = 0 equals s.
  /// Any real s is accepted; the result is shifted by whole periods.
  [[nodiscard]] double parameter_at_arc_length(double s) const {
    const double total = arc_table_.back();
    const double periods = std::floor(s / total);
    const double target = s - periods * total;
    const auto it = std::upper_bound(arc_table_.begin(), arc_table_.end(), target);
    std::size_t panel = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - arc_table_.begin() - 1));
    panel = std::min(panel, arc_table_.size() - 2);
    const double width = two_pi / static_cast<double>(arc_table_.size() - 1);
    const double t_lo = width * static_cast<double>(panel);
    double t = t_lo + (target - arc_table_[panel]) / speed(t_lo);
    for (int it_count = 0; it_count < 50; ++it_count) {
      const double g = arc_table_[panel] + arc_length(t_lo, t) - target;
      const double step = g / speed(t);
      t -= step;
      if (std::abs(step) < 4e-16 * (std::abs(t) + 1.0)) break;
    }
    return t + periods * two_pi;
  }

 private:
  BoundaryCurve() = default;

  void build_arc_table() {
    constexpr int panels = 1024;
    arc_table_.resize(panels + 1);
    arc_table_[0] = 0.0;
    for (int p = 0; p < panels; ++p) {
      arc_table_[p + 1] = arc_table_[p] + arc_length(two_pi * p / panels, two_pi * (p + 1) / panels);
    }
  }

  CurveKind kind_ = CurveKind::circle;
  double a_ = 1.0;
  double b_ = 0.0;
  int n_ = 1;
  double max_radius_ = 1.0;
  double min_radius_ = 1.0;
  RadiusFn radius_fn_;
  RadiusFn radius_derivative_fn_;
  std::vector<double> arc_table_;  // cumulative arc length at panel edges
};

inline BoundaryCurve flower_curve(double a, double b, int n) { return BoundaryCurve::flower(a, b, n); }

enum class PointRole { collocation, source, query };

struct PointSet {
  PointRole role = PointRole::query;
  std::vector<Point2> points;
  std::vector<double> weights;  // arc-length weights |Gamma_j|; collocation only

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] const Point2& operator[](std::size_t i) const { return points[i]; }
};

/// N boundary points gamma(t_j) with arc-length cell weights. Cells run
/// between neighbouring midpoints (in parameter or in arc length,
/// matching `spacing`).
inline PointSet collocation_points(const BoundaryCurve& curve, std::size_t count,
                                   Spacing spacing = Spacing::parameter) {
  if (count < 4) throw std::invalid_argument("collocation needs at least 4 points");
  PointSet set;
  set.role = PointRole::collocation;
  set.points.reserve(count);
  set.weights.reserve(count);
  const double n = static_cast<double>(count);
  const double total = spacing == Spacing::arclength ? curve.length() : 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double jj = static_cast<double>(j);
    double t = 0.0, lo = 0.0, hi = 0.0;
    if (spacing == Spacing::parameter) {
      t = two_pi * jj / n;
      lo = two_pi * (jj - 0.5) / n;
      hi = two_pi * (jj + 0.5) / n;
    } else {
      t = j == 0 ? 0.0 : curve.parameter_at_arc_length(total * jj / n);
      lo = curve.parameter_at_arc_length(total * (jj - 0.5) / n);
      hi = curve.parameter_at_arc_length(total * (jj + 0.5) / n);
    }
    set.points.push_back(curve.point(t));
    set.weights.push_back(curve.arc_length(lo, hi, 4));
  }
  return set;
}

/// M points equally spaced on the circle of radius R, starting on the +x axis.
inline PointSet source_points(double radius, std::size_t count) {
  if (count < 2) throw std::invalid_argument("source circle needs at least 2 points");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("source radius must be positive");
  }
  PointSet set;
  set.role = PointRole::source;
  set.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double phi = two_pi * static_cast<double>(i) / static_cast<double>(count);
    set.points.push_back({radius * std::cos(phi), radius * std::sin(phi)});
  }
  return set;
}

namespace detail {

inline std::vector<Point2> lattice_inside(const BoundaryCurve& curve, double pitch, double margin) {
  std::vector<Point2> pts;
  const long extent = static_cast<long>(std::ceil(curve.max_radius() / pitch));
  for (long iy = -extent; iy <= extent; ++iy) {
    for (long ix = -extent; ix <= extent; ++ix) {
      const Point2 p{pitch * static_cast<double>(ix), pitch * static_cast<double>(iy)};
      if (curve.contains(p, margin)) pts.push_back(p);
    }
  }
  return pts;
}

}  // namespace detail

/// Cartesian lattice points strictly inside (1 - margin) rho(theta). The
/// pitch starts from the area ratio and is refined until the count is
/// within 0.5% of the target (or the refinement stalls).
inline PointSet interior_grid(const BoundaryCurve& curve, std::size_t target_count, double margin = 0.0) {
  if (target_count == 0) throw std::invalid_argument("interior grid target count must be positive");
  if (!(margin >= 0.0 && margin < 1.0)) throw std::invalid_argument("interior grid margin must be in [0, 1)");
  const double scale = 1.0 - margin;
  const double area = curve.area() * scale * scale;
  if (!(area > 0.0)) throw std::invalid_argument("degenerate curve: zero enclosed area");

  const double target = static_cast<double>(target_count);
  double pitch = std::sqrt(area / target);
  std::vector<Point2> best = detail::lattice_inside(curve, pitch, margin);
  for (int iter = 0; iter < 20; ++iter) {
    const double count = static_cast<double>(best.size());
    if (std::abs(count - target) <= 0.005 * target || count == 0.0) break;
    pitch *= std::sqrt(count / target);
    auto next = detail::lattice_inside(curve, pitch, margin);
    if (std::abs(static_cast<double>(next.size()) - target) >= std::abs(count - target)) break;
    best = std::move(next);
  }
  if (best.empty()) throw std::invalid_argument("degenerate curve: no lattice points inside");
  PointSet set;
  set.role = PointRole::query;
  set.points = std::move(best);
  return set;
}

/// CSV with header `x,y` or `x,y,weight`.
inline void write_point_set_csv(const PointSet& set, const std::filesystem::path& path) {
  const bool weighted = !set.weights.empty();
  std::string out = weighted ? "x,y,weight\n" : "x,y\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    out += io::format_double(set.points[i].x) + "," + io::format_double(set.points[i].y);
    if (weighted) out += "," + io::format_double(set.weights[i]);
    out += "\n";
  }
  io::atomic_write(path, out);
}

inline PointSet read_point_set_csv(const std::filesystem::path& path, PointRole role) {
  const io::CsvTable table = io::read_csv(path);
  const int cx = table.column("x");
  const int cy = table.column("y");
  const int cw = table.column("weight");
  if (cx < 0 || cy < 0) throw std::runtime_error(path.string() + ": point CSV needs x and y columns");
  PointSet set;
  set.role = role;
  for (const auto& row : table.rows) {
    set.points.push_back({io::parse_double(row[cx]), io::parse_double(row[cy])});
    if (cw >= 0) set.weights.push_back(io::parse_double(row[cw]));
  }
  return set;
}

}  // namespace lbnm::geometry
