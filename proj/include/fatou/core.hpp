#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fatou {

using cplx = std::complex<double>;
using Point = std::vector<cplx>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Dimension cap for fixed-size multi-index storage.
inline constexpr int kMaxDim = 8;

// Coefficients at or below this modulus are dropped when a polynomial is canonicalized.
inline constexpr double kZeroTol = 1e-14;

// Plain double orbits stop once the sup-norm passes this.
inline constexpr double kOverflowGuard = 1e100;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parameter_error : error {
  using error::error;
};

struct domain_error : error {
  using error::error;
};

struct unsupported_direction_error : error {
  using error::error;
};

// An analytic hypothesis (expansion, invertibility, attraction) fails for the data.
struct hypothesis_error : error {
  using error::error;
};

struct convergence_error : error {
  convergence_error(const std::string& what, std::vector<std::string> table = {})
      : error(what), diagnostics(std::move(table)) {}
  std::vector<std::string> diagnostics;
};

struct overflow_error : error {
  overflow_error(const std::string& what, std::size_t last_finite)
      : error(what), last_finite_index(last_finite) {}
  std::size_t last_finite_index;
};

struct search_error : error {
  using error::error;
};

struct basin_error : error {
  using error::error;
};

struct schema_error : error {
  schema_error(const std::string& field_path, const std::string& what)
      : error(field_path + ": " + what), field(field_path) {}
  std::string field;
};

struct io_error : error {
  using error::error;
};

enum class Direction { forward, inverse };

inline double sup_norm(const Point& z) {
  double s = 0.0;
  for (const auto& c : z) s = std::max(s, std::abs(c));
  return s;
}

inline double euclid_norm(const Point& z) {
  double s = 0.0;
  for (const auto& c : z) s += std::norm(c);
  return std::sqrt(s);
}

inline bool all_finite(const Point& z) {
  for (const auto& c : z)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

inline Vector to_vector(const Point& z) {
  Vector v(static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) v(static_cast<Eigen::Index>(i)) = z[i];
  return v;
}

inline Point to_point(const Vector& v) {
  Point z(static_cast<std::size_t>(v.size()));
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = v(static_cast<Eigen::Index>(i));
  return z;
}

}  // namespace fatou
