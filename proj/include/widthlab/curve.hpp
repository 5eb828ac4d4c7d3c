#pragma once

#include <json.hpp>
#include <memory>
#include <vector>

#include "widthlab/surface.hpp"

namespace widthlab {

struct CurveSpec {
  enum class Kind { kEllipse, kPolyline, kLatitude };
  Kind kind = Kind::kEllipse;
  // Ellipse and circle (a == b), in chart coordinates.
  double a = 1.0;
  double b = 1.0;
  Vec2 center = Vec2::Zero();
  double rotation = 0.0;
  // Closed polyline through chart points, smoothed by a periodic cubic spline.
  std::vector<Vec2> points;
  // Latitude circle v = const (colatitude, height or cylinder coordinate).
  double latitude = 0.0;

  static CurveSpec circle(double r, Vec2 center = Vec2::Zero());
  static CurveSpec ellipse(double a, double b, Vec2 center = Vec2::Zero(), double rotation = 0.0);
  static CurveSpec polyline(std::vector<Vec2> points);
  static CurveSpec latitude_circle(double v);
};

CurveSpec load_curve_spec(const nlohmann::json& doc, const std::string& path = "/curve");

struct Frame {
  SurfacePoint point;
  TangentVector tangent;
  TangentVector inward_normal;
  double curvature = 0.0;  // geodesic curvature A, >= 0 when convex toward the inward normal
  // Working-chart data.
  Vec2 x = Vec2::Zero();
  Vec2 t = Vec2::Zero();
  Vec2 n = Vec2::Zero();
  double param = 0.0;
};

class CurveShape;

// The embedded circle, sampled at equal arclength and oriented
// counter-clockwise (interior to the left).
class BoundaryCurve {
 public:
  const SurfaceChart& surface() const { return surface_; }
  int size() const { return static_cast<int>(samples_.size()); }
  double length() const { return length_; }
  double spacing() const { return length_ / size(); }

  const std::vector<SurfacePoint>& samples() const { return samples_; }
  // Working-chart samples, lifted continuously from sample 0.
  const std::vector<Vec2>& working_samples() const { return working_; }
  const std::vector<Vec2>& working_tangents() const { return tangent_; }
  const std::vector<Vec2>& working_normals() const { return normal_; }
  const std::vector<double>& curvature() const { return curvature_; }
  std::vector<TangentVector> tangents() const;
  std::vector<TangentVector> inward_normals() const;

  Frame frame_at(double s) const;
  Frame frame_at_param(double tau) const;
  // Working point at arclength s, continued across s = L by the deck shift.
  Vec2 working_point(double s) const;
  // Translation of the working chart after one circuit (nonzero on cylinders).
  const Vec2& deck() const { return deck_; }

  // Negative inside, zero on the curve, positive outside.
  double level(const Vec2& x) const;
  // Arclength in [0, L) of the curve point nearest to x.
  double project(const Vec2& x) const;
  double param_of(double s) const;
  double arclength_of(double tau) const;
  double param_period() const;

  // The geometry is invariant under arclength translation (latitude circles,
  // centered round circles on isotropic charts).
  bool rotationally_symmetric() const { return symmetric_; }
  bool plane() const { return surface_.kind() == SurfaceKind::kEuclideanPlane; }
  const CurveSpec& spec() const { return spec_; }

  double integrated_curvature(double s1, double s2) const;

 private:
  friend BoundaryCurve build_curve(const CurveSpec&, const SurfaceChart&, int);

  SurfaceChart surface_;
  CurveSpec spec_;
  std::shared_ptr<const CurveShape> shape_;
  double length_ = 0.0;
  bool symmetric_ = false;
  Vec2 deck_ = Vec2::Zero();
  std::vector<double> panel_tau_;
  std::vector<double> panel_cum_;
  std::vector<double> tau_;
  std::vector<SurfacePoint> samples_;
  std::vector<Vec2> working_;
  std::vector<Vec2> tangent_;
  std::vector<Vec2> normal_;
  std::vector<double> curvature_;
  std::vector<double> cum_curvature_;

  double speed(double tau) const;
  double panel_integral(double a, double b) const;
};

BoundaryCurve build_curve(const CurveSpec& spec, const SurfaceChart& s, int n);

inline Frame frame_at(const BoundaryCurve& c, double s) { return c.frame_at(s); }

double intrinsic_distance(const BoundaryCurve& c, double s1, double s2);
double intrinsic_distance(double length, double s1, double s2);

// Left unit normal of a unit vector t in metric g.
Vec2 rotate_left(const Mat2& g, const Vec2& t);

}  // namespace widthlab
