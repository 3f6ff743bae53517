#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace lbnm {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Two operands whose shapes do not fit together.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation at (or numerically on top of) a singular point of a field.
class SingularPoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline std::string shape_string(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace lbnm
