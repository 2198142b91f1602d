#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace embolic {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

/// Modulus-1 floor for interior points of the unit disc. Points are rejected
/// (or clamped, where the math can graze the boundary) at 1 - kBoundaryEps.
constexpr double kBoundaryEps = 1e-7;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Angle reduced to [0, 2*pi).
inline double reduce_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

/// Circular difference min(|a-b|, 2*pi - |a-b|) for reduced angles.
inline double circular_distance(double a, double b) {
  double d = std::fabs(reduce_angle(a) - reduce_angle(b));
  return std::min(d, kTwoPi - d);
}

/// Locale-independent shortest round-trip formatting (decimal point, no
/// grouping). Used for every number written to CSV/JSON-adjacent text files.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Fixed-precision variant for SVG coordinates.
inline std::string fmt_fixed(double v, int precision) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

}  // namespace embolic
