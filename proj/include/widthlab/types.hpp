#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace widthlab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Chart coordinates of a point on the surface.
struct SurfacePoint {
  double u = 0.0;
  double v = 0.0;

  Vec2 vec() const { return {u, v}; }
  static SurfacePoint of(const Vec2& x) { return {x[0], x[1]}; }
};

struct TangentVector {
  SurfacePoint base;
  Vec2 components = Vec2::Zero();
};

// christoffel[k](i, j) = Gamma^k_{ij}.
using Christoffel = std::array<Mat2, 2>;

// Invalid configuration; `field` is a JSON-pointer-like path to the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)), message_(message) {}
  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }

 private:
  std::string field_;
  std::string message_;
};

// A computation could not be completed (domain exit, missing connector, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Wraps x into [0, period).
inline double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

// Wraps x into (-period/2, period/2].
inline double wrap_centered(double x, double period) {
  double r = wrap(x, period);
  if (r > 0.5 * period) r -= period;
  return r;
}

}  // namespace widthlab
