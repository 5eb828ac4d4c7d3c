#include "widthlab/curve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "widthlab/json_fields.hpp"

namespace widthlab {

using nlohmann::json;

CurveSpec CurveSpec::circle(double r, Vec2 center) { return ellipse(r, r, center, 0.0); }

CurveSpec CurveSpec::ellipse(double a, double b, Vec2 center, double rotation) {
  CurveSpec s;
  s.kind = Kind::kEllipse;
  s.a = a;
  s.b = b;
  s.center = center;
  s.rotation = rotation;
  return s;
}

CurveSpec CurveSpec::polyline(std::vector<Vec2> points) {
  CurveSpec s;
  s.kind = Kind::kPolyline;
  s.points = std::move(points);
  return s;
}

CurveSpec CurveSpec::latitude_circle(double v) {
  CurveSpec s;
  s.kind = Kind::kLatitude;
  s.latitude = v;
  return s;
}

CurveSpec load_curve_spec(const json& doc, const std::string& path) {
  FieldReader r(doc, path);
  const std::string type = r.text("type");
  CurveSpec spec;
  if (type == "circle") {
    spec = CurveSpec::circle(r.positive("r", "radius"), r.point_or("center", Vec2::Zero()));
  } else if (type == "ellipse") {
    const double a = r.positive("a", "radius");
    const double b = r.positive("b", "radius");
    spec = CurveSpec::ellipse(a, b, r.point_or("center", Vec2::Zero()), r.number_or("rotation", 0.0));
  } else if (type == "polyline") {
    const json& pts = r.required("points");
    if (!pts.is_array() || pts.size() < 4) throw ConfigError(r.path_of("points"), "expected at least 4 points");
    std::vector<Vec2> points;
    for (std::size_t i = 0; i < pts.size(); ++i) points.push_back(as_point(pts[i], r.path_of("points") + "/" + std::to_string(i)));
    spec = CurveSpec::polyline(std::move(points));
  } else if (type == "latitude") {
    spec = CurveSpec::latitude_circle(r.number("v"));
  } else {
    throw ConfigError(r.path_of("type"), "unknown curve type '" + type + "'");
  }
  r.reject_unknown();
  return spec;
}

// ---------------------------------------------------------------------------
// Shapes, parametrized in the working chart.

class CurveShape {
 public:
  virtual ~CurveShape() = default;
  virtual double period() const = 0;
  virtual void eval(double tau, Vec2& c, Vec2& d1, Vec2& d2) const = 0;
  // Implicit function of the curve; shapes needing a projection hint leave it
  // to BoundaryCurve::level.
  virtual double level(const Vec2&) const { return std::numeric_limits<double>::quiet_NaN(); }
  // Parameter in [0, period) of the nearest point, starting from `hint`.
  virtual double project(const Vec2& x, double hint) const = 0;
  virtual bool needs_hint() const { return false; }
  // Parameters where the shape is only C^2; quadrature panels respect them.
  virtual std::vector<double> knots() const { return {}; }
};

namespace {

class EllipseShape : public CurveShape {
 public:
  EllipseShape(double a, double b, Vec2 center, double rotation)
      : a_(a), b_(b), center_(center), cos_(std::cos(rotation)), sin_(std::sin(rotation)) {}

  double period() const override { return kTwoPi; }

  void eval(double tau, Vec2& c, Vec2& d1, Vec2& d2) const override {
    const double ct = std::cos(tau), st = std::sin(tau);
    c = center_ + rotate({a_ * ct, b_ * st});
    d1 = rotate({-a_ * st, b_ * ct});
    d2 = rotate({-a_ * ct, -b_ * st});
  }

  double level(const Vec2& x) const override {
    const Vec2 y = unrotate(x - center_);
    return (y[0] / a_) * (y[0] / a_) + (y[1] / b_) * (y[1] / b_) - 1.0;
  }

  double project(const Vec2& x, double) const override {
    const Vec2 y = unrotate(x - center_);
    double tau = std::atan2(y[1] / b_, y[0] / a_);
    for (int it = 0; it < 30; ++it) {
      const double ct = std::cos(tau), st = std::sin(tau);
      const Vec2 p(a_ * ct, b_ * st), d1(-a_ * st, b_ * ct);
      const double f = (p - y).dot(d1);
      const double df = d1.squaredNorm() - (p - y).dot(p);
      const double step = f / df;
      tau -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return wrap(tau, kTwoPi);
  }

 private:
  double a_, b_;
  Vec2 center_;
  double cos_, sin_;
  Vec2 rotate(const Vec2& v) const { return {cos_ * v[0] - sin_ * v[1], sin_ * v[0] + cos_ * v[1]}; }
  Vec2 unrotate(const Vec2& v) const { return {cos_ * v[0] + sin_ * v[1], -sin_ * v[0] + cos_ * v[1]}; }
};

// Circle |x| = t0 in a polar working chart.
class PolarCircleShape : public CurveShape {
 public:
  explicit PolarCircleShape(double t0) : t0_(t0) {}
  double period() const override { return kTwoPi; }
  void eval(double tau, Vec2& c, Vec2& d1, Vec2& d2) const override {
    const double ct = std::cos(tau), st = std::sin(tau);
    c = {t0_ * ct, t0_ * st};
    d1 = {-t0_ * st, t0_ * ct};
    d2 = -c;
  }
  double level(const Vec2& x) const override { return x.norm() - t0_; }
  double project(const Vec2& x, double) const override { return wrap(std::atan2(x[1], x[0]), kTwoPi); }

 private:
  double t0_;
};

// Line v = v0 in a chart periodic in u; the interior is v > v0.
class PeriodicLineShape : public CurveShape {
 public:
  PeriodicLineShape(double u0, double period, double v0) : u0_(u0), period_(period), v0_(v0) {}
  double period() const override { return period_; }
  void eval(double tau, Vec2& c, Vec2& d1, Vec2& d2) const override {
    c = {u0_ + tau, v0_};
    d1 = {1.0, 0.0};
    d2 = Vec2::Zero();
  }
  double level(const Vec2& x) const override { return v0_ - x[1]; }
  double project(const Vec2& x, double) const override { return wrap(x[0] - u0_, period_); }

 private:
  double u0_, period_, v0_;
};

// Periodic cubic spline through closed control points, chord-length parametrized.
class SplineShape : public CurveShape {
 public:
  explicit SplineShape(std::vector<Vec2> pts) : p_(std::move(pts)) {
    const int n = static_cast<int>(p_.size());
    knot_.assign(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
      const double h = (p_[(i + 1) % n] - p_[i]).norm();
      if (!(h > 0)) throw ConfigError("/curve/points", "repeated consecutive points");
      knot_[i + 1] = knot_[i] + h;
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 2);
    for (int i = 0; i < n; ++i) {
      const int im = (i + n - 1) % n, ip = (i + 1) % n;
      const double h0 = knot_[im + 1] - knot_[im];
      const double h1 = knot_[i + 1] - knot_[i];
      a(i, im) += h0;
      a(i, i) += 2.0 * (h0 + h1);
      a(i, ip) += h1;
      const Vec2 r = 6.0 * ((p_[ip] - p_[i]) / h1 - (p_[i] - p_[im]) / h0);
      rhs(i, 0) = r[0];
      rhs(i, 1) = r[1];
    }
    const Eigen::MatrixXd m = a.partialPivLu().solve(rhs);
    m_.resize(n);
    for (int i = 0; i < n; ++i) m_[i] = Vec2(m(i, 0), m(i, 1));
  }

  double period() const override { return knot_.back(); }

  void eval(double tau, Vec2& c, Vec2& d1, Vec2& d2) const override {
    const int n = static_cast<int>(p_.size());
    tau = wrap(tau, period());
    int i = static_cast<int>(std::upper_bound(knot_.begin(), knot_.end(), tau) - knot_.begin()) - 1;
    i = std::clamp(i, 0, n - 1);
    const int j = (i + 1) % n;
    const double h = knot_[i + 1] - knot_[i];
    const double s = (tau - knot_[i]) / h, t = 1.0 - s;
    c = t * p_[i] + s * p_[j] + h * h / 6.0 * ((t * t * t - t) * m_[i] + (s * s * s - s) * m_[j]);
    d1 = (p_[j] - p_[i]) / h + h / 6.0 * ((1.0 - 3.0 * t * t) * m_[i] + (3.0 * s * s - 1.0) * m_[j]);
    d2 = t * m_[i] + s * m_[j];
  }

  double project(const Vec2& x, double hint) const override {
    double tau = hint;
    for (int it = 0; it < 40; ++it) {
      Vec2 c, d1, d2;
      eval(tau, c, d1, d2);
      const double f = (c - x).dot(d1);
      const double df = d1.squaredNorm() + (c - x).dot(d2);
      double step = f / (df > 1e-12 ? df : d1.squaredNorm());
      const double cap = 0.25 * period() / static_cast<double>(p_.size());
      step = std::clamp(step, -cap, cap);
      tau -= step;
      if (std::abs(step) < 1e-15 * period()) break;
    }
    return wrap(tau, period());
  }

  bool needs_hint() const override { return true; }

  std::vector<double> knots() const override { return {knot_.begin(), knot_.end() - 1}; }

 private:
  std::vector<Vec2> p_;
  std::vector<double> knot_;
  std::vector<Vec2> m_;
};

double signed_area(const std::vector<Vec2>& pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % pts.size()];
    a += p[0] * q[1] - p[1] * q[0];
  }
  return 0.5 * a;
}

}  // namespace

Vec2 rotate_left(const Mat2& g, const Vec2& t) {
  const double root = std::sqrt(g.determinant());
  return Vec2(-g(0, 1) * t[0] - g(1, 1) * t[1], g(0, 0) * t[0] + g(0, 1) * t[1]) / root;
}

// ---------------------------------------------------------------------------

double BoundaryCurve::param_period() const { return shape_->period(); }

double BoundaryCurve::speed(double tau) const {
  Vec2 c, d1, d2;
  shape_->eval(tau, c, d1, d2);
  return surface_.norm(c, d1);
}

double BoundaryCurve::panel_integral(double a, double b) const {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate([this](double t) { return speed(t); }, a, b, 0);
}

double BoundaryCurve::arclength_of(double tau) const {
  const double period = shape_->period();
  const double turns = std::floor(tau / period);
  const double t = tau - turns * period;
  std::size_t k = std::upper_bound(panel_tau_.begin(), panel_tau_.end(), t) - panel_tau_.begin();
  k = std::clamp<std::size_t>(k, 1, panel_tau_.size() - 1) - 1;
  return turns * length_ + panel_cum_[k] + panel_integral(panel_tau_[k], t);
}

double BoundaryCurve::param_of(double s) const {
  const double turns = std::floor(s / length_);
  const double r = s - turns * length_;
  std::size_t k = std::upper_bound(panel_cum_.begin(), panel_cum_.end(), r) - panel_cum_.begin();
  k = std::clamp<std::size_t>(k, 1, panel_cum_.size() - 1) - 1;
  const double a = panel_tau_[k], b = panel_tau_[k + 1];
  double tau = a + (b - a) * (r - panel_cum_[k]) / (panel_cum_[k + 1] - panel_cum_[k]);
  for (int it = 0; it < 6; ++it) {
    const double err = panel_cum_[k] + panel_integral(a, tau) - r;
    const double step = err / speed(tau);
    tau -= step;
    if (std::abs(step) < 1e-15 * shape_->period()) break;
  }
  return tau + turns * shape_->period();
}

Frame BoundaryCurve::frame_at_param(double tau) const {
  Vec2 c, d1, d2;
  shape_->eval(tau, c, d1, d2);
  const Geometry g = surface_.working_geometry(c);
  const double speed = std::sqrt(d1.dot(g.metric * d1));
  Frame f;
  f.param = tau;
  f.x = c;
  f.t = d1 / speed;
  f.n = rotate_left(g.metric, f.t);
  Vec2 cov = d2;
  for (int k = 0; k < 2; ++k) cov[k] += d1.dot(g.christoffel[k] * d1);
  f.curvature = cov.dot(g.metric * f.n) / (speed * speed);
  f.point = surface_.from_working(c);
  f.tangent = surface_.tangent_from_working(c, f.t);
  f.inward_normal = surface_.tangent_from_working(c, f.n);
  return f;
}

Frame BoundaryCurve::frame_at(double s) const { return frame_at_param(param_of(wrap(s, length_))); }

Vec2 BoundaryCurve::working_point(double s) const {
  const double turns = std::floor(s / length_);
  Vec2 c, d1, d2;
  shape_->eval(param_of(s - turns * length_), c, d1, d2);
  return c + turns * deck_;
}

double BoundaryCurve::level(const Vec2& x) const {
  if (!shape_->needs_hint()) return shape_->level(x);
  const double s = project(x);
  const Frame f = frame_at(s);
  return -(x - f.x).dot(f.n);
}

double BoundaryCurve::project(const Vec2& x) const {
  double hint = 0.0;
  if (shape_->needs_hint()) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < size(); ++k) {
      const double d = (working_[k] - x).squaredNorm();
      if (d < best) {
        best = d;
        hint = tau_[k];
      }
    }
  }
  const double tau = shape_->project(x, hint);
  return wrap(arclength_of(tau), length_);
}

std::vector<TangentVector> BoundaryCurve::tangents() const {
  std::vector<TangentVector> out;
  for (int k = 0; k < size(); ++k) out.push_back(surface_.tangent_from_working(working_[k], tangent_[k]));
  return out;
}

std::vector<TangentVector> BoundaryCurve::inward_normals() const {
  std::vector<TangentVector> out;
  for (int k = 0; k < size(); ++k) out.push_back(surface_.tangent_from_working(working_[k], normal_[k]));
  return out;
}

double BoundaryCurve::integrated_curvature(double s1, double s2) const {
  // Integral of |A| along the counter-clockwise arc from s1 to s2.
  const double h = spacing();
  auto cumulative = [&](double s) {
    const double x = wrap(s, length_) / h;
    const int k = std::min(static_cast<int>(x), size() - 1);
    const double frac = x - k;
    const double a0 = std::abs(curvature_[k]), a1 = std::abs(curvature_[(k + 1) % size()]);
    return cum_curvature_[k] + h * (frac * a0 + 0.5 * frac * frac * (a1 - a0));
  };
  double r = cumulative(s2) - cumulative(s1);
  if (wrap(s2, length_) < wrap(s1, length_)) r += cum_curvature_.back();
  return r;
}

BoundaryCurve build_curve(const CurveSpec& spec, const SurfaceChart& s, int n) {
  if (n < 16) throw ConfigError("/curve/samples", "at least 16 samples required");
  BoundaryCurve c;
  c.surface_ = s;
  c.spec_ = spec;
  switch (spec.kind) {
    case CurveSpec::Kind::kEllipse: {
      if (s.kind() != SurfaceKind::kEuclideanPlane && s.kind() != SurfaceKind::kConformalPlane)
        throw ConfigError("/curve/type", "ellipse and circle curves need a plane chart");
      c.shape_ = std::make_shared<EllipseShape>(spec.a, spec.b, spec.center, spec.rotation);
      const bool isotropic = s.kind() == SurfaceKind::kEuclideanPlane || s.log_factor().bumps.empty();
      c.symmetric_ = isotropic && spec.a == spec.b && spec.center.isZero();
      break;
    }
    case CurveSpec::Kind::kLatitude: {
      if (s.polar()) {
        const double t0 = s.to_working(SurfacePoint{0.0, spec.latitude}).norm();
        c.shape_ = std::make_shared<PolarCircleShape>(t0);
      } else if (s.kind() == SurfaceKind::kRevolution || s.kind() == SurfaceKind::kFlatCylinder) {
        c.shape_ = std::make_shared<PeriodicLineShape>(s.domain().u_min, s.period(), spec.latitude);
        c.deck_ = Vec2(s.period(), 0.0);
      } else {
        throw ConfigError("/curve/type", "latitude curves need a sphere, revolution or cylinder chart");
      }
      if (!s.contains(SurfacePoint{0.0, spec.latitude})) throw ConfigError("/curve/v", "curve exits chart domain");
      c.symmetric_ = true;
      break;
    }
    case CurveSpec::Kind::kPolyline: {
      std::vector<Vec2> pts;
      for (const Vec2& p : spec.points) pts.push_back(s.to_working(SurfacePoint::of(p)));
      if (signed_area(pts) < 0) std::reverse(pts.begin(), pts.end());
      c.shape_ = std::make_shared<SplineShape>(pts);
      break;
    }
  }

  // Quadrature panels.
  const double period = c.shape_->period();
  std::vector<double> breaks = c.shape_->knots();
  if (breaks.empty()) breaks.push_back(0.0);
  breaks.push_back(period);
  const int target = std::max(4096, 8 * n);
  const int per = std::max(1, target / static_cast<int>(breaks.size() - 1));
  c.panel_tau_.clear();
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    for (int k = 0; k < per; ++k) c.panel_tau_.push_back(breaks[i] + (breaks[i + 1] - breaks[i]) * k / per);
  c.panel_tau_.push_back(period);
  c.panel_cum_.assign(c.panel_tau_.size(), 0.0);
  for (std::size_t k = 0; k + 1 < c.panel_tau_.size(); ++k)
    c.panel_cum_[k + 1] = c.panel_cum_[k] + c.panel_integral(c.panel_tau_[k], c.panel_tau_[k + 1]);
  c.length_ = c.panel_cum_.back();

  // Independent adaptive estimate of the length.
  double adaptive = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    adaptive += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&c](double t) { return c.speed(t); }, breaks[i], breaks[i + 1], 15, 1e-13);
  }
  if (std::abs(adaptive - c.length_) > 1e-9 * c.length_) throw NumericalError("arclength quadrature did not converge");

  // Arclength-uniform resampling.
  c.tau_.resize(n);
  c.samples_.resize(n);
  c.working_.resize(n);
  c.tangent_.resize(n);
  c.normal_.resize(n);
  c.curvature_.resize(n);
  for (int k = 0; k < n; ++k) {
    c.tau_[k] = c.param_of(c.length_ * k / n);
    Vec2 x, d1, d2;
    c.shape_->eval(c.tau_[k], x, d1, d2);
    if (!s.working_contains(x, 1e-12)) throw ConfigError("/curve", "curve exits chart domain");
    const Frame f = c.frame_at_param(c.tau_[k]);
    c.samples_[k] = f.point;
    c.working_[k] = f.x;
    c.tangent_[k] = f.t;
    c.normal_[k] = f.n;
    c.curvature_[k] = f.curvature;
  }
  c.cum_curvature_.assign(n + 1, 0.0);
  for (int k = 0; k < n; ++k)
    c.cum_curvature_[k + 1] =
        c.cum_curvature_[k] + 0.5 * c.spacing() * (std::abs(c.curvature_[k]) + std::abs(c.curvature_[(k + 1) % n]));

  // Sample-level simplicity and spacing.
  const double h = c.spacing();
  for (int i = 0; i < n; ++i) {
    const Vec2 a = c.working_[i];
    const Vec2 b = (i + 1 < n) ? c.working_[i + 1] : c.working_[0] + c.deck_;
    const double chord = s.norm(0.5 * (a + b), b - a);
    if (std::abs(chord - h) > 0.01 * h) throw NumericalError("resampled chord deviates from L/N");
  }
  for (int i = 0; i < n; ++i) {
    const Mat2 g = s.working_metric(c.working_[i]);
    const double lam = g.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      for (int shift = -1; shift <= 1; ++shift) {
        if (shift != 0 && c.deck_.isZero()) continue;
        const Vec2 d = c.working_[j] + shift * c.deck_ - c.working_[i];
        if (std::sqrt(lam) * d.norm() >= 0.1 * h) continue;
        if (s.norm(c.working_[i], d) < 0.1 * h) throw ConfigError("/curve", "self-intersecting curve");
      }
    }
  }
  return c;
}

double intrinsic_distance(double length, double s1, double s2) {
  const double d = wrap(std::abs(s2 - s1), length);
  return std::min(d, length - d);
}

double intrinsic_distance(const BoundaryCurve& c, double s1, double s2) {
  return intrinsic_distance(c.length(), s1, s2);
}

}  // namespace widthlab
