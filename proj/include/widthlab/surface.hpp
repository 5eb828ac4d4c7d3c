#pragma once

#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "widthlab/types.hpp"

namespace widthlab {

enum class SurfaceKind { kEuclideanPlane, kRoundSphere, kRevolution, kConformalPlane, kFlatCylinder };

std::string to_string(SurfaceKind kind);

struct Geometry {
  Mat2 metric = Mat2::Identity();
  Christoffel christoffel{Mat2::Zero(), Mat2::Zero()};
  double gauss_curvature = 0.0;
};

// Coordinate rectangle of the public chart.
struct ChartDomain {
  double u_min = 0.0;
  double u_max = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
  bool periodic_u = false;
};

// One term of a conformal log-factor.  Gaussian: A exp(-q/2); compact:
// A exp(1 - 1/(1-q)) for q < 1 and 0 otherwise, with
// q = ((u-cu)/ru)^2 + ((v-cv)/rv)^2.
struct Bump {
  enum class Shape { kGaussian, kCompact };
  Shape shape = Shape::kGaussian;
  Vec2 center = Vec2::Zero();
  Vec2 radius = Vec2::Ones();
  double amplitude = 0.0;
};

struct LogFactor {
  double constant = 0.0;
  std::vector<Bump> bumps;

  double value(const Vec2& x) const;
  // Value, gradient and Hessian in one pass.
  void evaluate(const Vec2& x, double& f, Vec2& grad, Mat2& hess) const;
};

// Radius as a function of height, resampled on a uniform grid.
class SampledProfile;

// A Riemannian metric on a single coordinate chart.
//
// Besides the public chart (the coordinates users see), every surface has a
// working chart used for integration.  Sphere and ellipsoid charts use
// polar coordinates around the top pole, x = t (cos u, sin u) with t the
// colatitude or the eccentric angle; the public (longitude, colatitude/height)
// chart is singular there but the working chart is not.  All other kinds use
// the public chart unchanged (periodic charts unwrapped).
class SurfaceChart {
 public:
  static SurfaceChart euclidean_plane(ChartDomain domain);
  static SurfaceChart round_sphere(double r, double colat_min = 0.0, double colat_max = 3.0);
  // Ellipsoid x^2 + y^2 + z^2/a^2 = 1 parametrized by (angle, height).
  static SurfaceChart ellipsoid(double a, double z_min, double z_max);
  static SurfaceChart sampled_revolution(const std::vector<double>& z, const std::vector<double>& rho);
  static SurfaceChart conformal_plane(ChartDomain domain, LogFactor f);
  static SurfaceChart flat_cylinder(double circumference, double v_min, double v_max);

  SurfaceKind kind() const { return kind_; }
  const ChartDomain& domain() const { return domain_; }
  bool periodic() const { return domain_.periodic_u; }
  double period() const { return domain_.u_max - domain_.u_min; }
  // Zero Christoffel symbols everywhere (straight working-chart geodesics).
  bool flat() const { return kind_ == SurfaceKind::kEuclideanPlane || kind_ == SurfaceKind::kFlatCylinder; }
  bool polar() const { return polar_; }
  double sphere_radius() const { return r_; }
  double ellipsoid_a() const { return a_; }
  const LogFactor& log_factor() const { return f_; }

  bool contains(SurfacePoint p) const;
  Geometry geometry_at(SurfacePoint p) const;
  Geometry geometry_fd(SurfacePoint p, double h = 1e-6) const;
  Mat2 metric_at(SurfacePoint p) const;

  Vec2 to_working(SurfacePoint p) const;
  SurfacePoint from_working(const Vec2& x) const;
  // d(working)/d(public) at p.
  Mat2 working_jacobian(SurfacePoint p) const;
  Vec2 tangent_to_working(const TangentVector& t) const;
  TangentVector tangent_from_working(const Vec2& x, const Vec2& w) const;

  bool working_contains(const Vec2& x, double slack = 0.0) const;
  Mat2 working_metric(const Vec2& x) const;
  Geometry working_geometry(const Vec2& x) const;
  Geometry working_geometry_fd(const Vec2& x, double h = 1e-6) const;
  double working_curvature(const Vec2& x) const;
  // Geodesic acceleration -Gamma(v, v) in the working chart.
  Vec2 acceleration(const Vec2& x, const Vec2& v) const;
  double norm(const Vec2& x, const Vec2& w) const;
  double dot(const Vec2& x, const Vec2& a, const Vec2& b) const;
  // Euclidean diameter of the working domain; sets the geodesic step.
  double working_diameter() const;
  // Drawing coordinates (top view for surfaces of revolution).
  Vec2 picture(const Vec2& x) const;

 private:
  SurfaceKind kind_ = SurfaceKind::kEuclideanPlane;
  ChartDomain domain_;
  bool polar_ = false;
  double r_ = 1.0;  // sphere radius
  double a_ = 1.0;  // ellipsoid axis
  // Working radial range for polar charts.
  double t_lo_ = 0.0;
  double t_hi_ = 0.0;
  LogFactor f_;
  std::shared_ptr<const SampledProfile> profile_;

  void polar_coefficients(double t, double& P, double& Q, double& P1, double& Q1) const;
  double polar_t_of_v(double v) const;
  double polar_v_of_t(double t) const;
  double polar_dt_dv(double v) const;
  double polar_rho(double t) const;
};

// Parses a surface description such as {"kind": "round-sphere", "r": 1}.
SurfaceChart load_surface(const nlohmann::json& doc, const std::string& path = "/surface");
SurfaceChart load_surface(const std::string& text);
inline SurfaceChart load_surface(const char* text) { return load_surface(std::string(text)); }

inline Geometry geometry_at(const SurfaceChart& s, SurfacePoint p) { return s.geometry_at(p); }

// Gaussian curvature from a metric field by the Brioschi formula with central differences.
template <typename MetricFn>
double brioschi_curvature(const MetricFn& metric, const Vec2& x, double h = 1e-4);

}  // namespace widthlab

#include "widthlab/detail/brioschi.hpp"
