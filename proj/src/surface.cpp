#include "widthlab/surface.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "widthlab/json_fields.hpp"

namespace widthlab {

using nlohmann::json;

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::kEuclideanPlane: return "euclidean-plane";
    case SurfaceKind::kRoundSphere: return "round-sphere";
    case SurfaceKind::kRevolution: return "revolution";
    case SurfaceKind::kConformalPlane: return "conformal-plane";
    case SurfaceKind::kFlatCylinder: return "flat-cylinder";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Log-factor

namespace {

// B(q), B'(q), B''(q) for one bump shape.
void bump_profile(Bump::Shape shape, double q, double& b, double& b1, double& b2) {
  if (shape == Bump::Shape::kGaussian) {
    b = std::exp(-0.5 * q);
    b1 = -0.5 * b;
    b2 = 0.25 * b;
    return;
  }
  if (q >= 1.0) {
    b = b1 = b2 = 0.0;
    return;
  }
  const double w = 1.0 - q;
  b = std::exp(1.0 - 1.0 / w);
  b1 = -b / (w * w);
  b2 = b * (2.0 * q - 1.0) / (w * w * w * w);
}

}  // namespace

double LogFactor::value(const Vec2& x) const {
  double f = constant;
  for (const Bump& bump : bumps) {
    const double du = (x[0] - bump.center[0]) / bump.radius[0];
    const double dv = (x[1] - bump.center[1]) / bump.radius[1];
    double b, b1, b2;
    bump_profile(bump.shape, du * du + dv * dv, b, b1, b2);
    f += bump.amplitude * b;
  }
  return f;
}

void LogFactor::evaluate(const Vec2& x, double& f, Vec2& grad, Mat2& hess) const {
  f = constant;
  grad.setZero();
  hess.setZero();
  for (const Bump& bump : bumps) {
    const double ru2 = bump.radius[0] * bump.radius[0];
    const double rv2 = bump.radius[1] * bump.radius[1];
    const double du = x[0] - bump.center[0];
    const double dv = x[1] - bump.center[1];
    const double q = du * du / ru2 + dv * dv / rv2;
    double b, b1, b2;
    bump_profile(bump.shape, q, b, b1, b2);
    if (b == 0.0) continue;
    const Vec2 gq(2.0 * du / ru2, 2.0 * dv / rv2);
    f += bump.amplitude * b;
    grad += bump.amplitude * b1 * gq;
    Mat2 hq = Mat2::Zero();
    hq(0, 0) = 2.0 / ru2;
    hq(1, 1) = 2.0 / rv2;
    hess += bump.amplitude * (b2 * gq * gq.transpose() + b1 * hq);
  }
}

// ---------------------------------------------------------------------------
// Sampled profile

class SampledProfile {
 public:
  SampledProfile(const std::vector<double>& z, const std::vector<double>& rho) {
    // Natural cubic spline through the samples, resampled to a uniform grid.
    const std::size_t n = z.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    a(0, 0) = 1.0;
    a(n - 1, n - 1) = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = z[i] - z[i - 1], h1 = z[i + 1] - z[i];
      a(i, i - 1) = h0;
      a(i, i) = 2.0 * (h0 + h1);
      a(i, i + 1) = h1;
      rhs[i] = 6.0 * ((rho[i + 1] - rho[i]) / h1 - (rho[i] - rho[i - 1]) / h0);
    }
    const Eigen::VectorXd m = a.partialPivLu().solve(rhs);
    auto natural = [&](double x) {
      std::size_t i = std::upper_bound(z.begin(), z.end(), x) - z.begin();
      i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
      const double h = z[i + 1] - z[i];
      const double s = (x - z[i]) / h;
      const double t = 1.0 - s;
      return t * rho[i] + s * rho[i + 1] + h * h / 6.0 * ((t * t * t - t) * m[i] + (s * s * s - s) * m[i + 1]);
    };
    z_min_ = z.front();
    z_max_ = z.back();
    const int grid = 1024;
    step_ = (z_max_ - z_min_) / (grid - 1);
    std::vector<double> values(grid);
    for (int k = 0; k < grid; ++k) values[k] = natural(z_min_ + k * step_);
    spline_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(values.begin(), values.end(), z_min_, step_);
    for (int k = 0; k < grid; ++k) {
      if (values[k] <= 0.0) throw ConfigError("/surface/profile/rho", "non-positive profile after resampling");
    }
  }

  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  double rho(double z) const { return spline_(z); }
  double rho1(double z) const { return spline_.prime(z); }
  double rho2(double z) const { return spline_.double_prime(z); }

 private:
  double z_min_ = 0.0, z_max_ = 0.0, step_ = 0.0;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

// ---------------------------------------------------------------------------
// Polar working chart helpers

namespace {

struct PolarSeries {
  double S, S1, Q0, Q01;
};

double horner(const double* c, int n, double t2) {
  double acc = c[n - 1];
  for (int k = n - 2; k >= 0; --k) acc = acc * t2 + c[k];
  return acc;
}

// S = sinc^2 t, S1 = S'/t, Q0 = (1-S)/t^2, Q01 = Q0'/t; series near t = 0.
PolarSeries polar_series(double t) {
  const double t2 = t * t;
  if (t < 0.25) {
    static const double cs[] = {1.0, -1.0 / 3, 2.0 / 45, -1.0 / 315, 2.0 / 14175, -2.0 / 467775, 4.0 / 42567525};
    static const double cs1[] = {-2.0 / 3,         8.0 / 45,         -2.0 / 105,        16.0 / 14175,
                                 -4.0 / 93555,     16.0 / 14189175,  -2.0 / 91216125};
    static const double cq[] = {1.0 / 3,          -2.0 / 45,         1.0 / 315,         -2.0 / 14175,
                                2.0 / 467775,     -4.0 / 42567525,   1.0 / 638512875};
    static const double cq1[] = {-4.0 / 45,       4.0 / 315,        -4.0 / 4725,       16.0 / 467775,
                                 -8.0 / 8513505,  4.0 / 212837625,  -4.0 / 13956067125.0};
    return {horner(cs, 7, t2), horner(cs1, 7, t2), horner(cq, 7, t2), horner(cq1, 7, t2)};
  }
  const double s = std::sin(t), c = std::cos(t);
  PolarSeries r;
  r.S = s * s / t2;
  r.S1 = 2.0 * s * (t * c - s) / (t2 * t2);
  r.Q0 = (1.0 - r.S) / t2;
  r.Q01 = -(r.S1 + 2.0 * r.Q0) / t2;
  return r;
}

Christoffel christoffel_from_first_kind(const Mat2& g, const std::array<Mat2, 2>& dg) {
  // dg[k](i, j) = d_k g_ij
  const Mat2 ginv = g.inverse();
  Christoffel out{Mat2::Zero(), Mat2::Zero()};
  for (int m = 0; m < 2; ++m)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 2; ++k) acc += ginv(m, k) * 0.5 * (dg[i](k, j) + dg[j](k, i) - dg[k](i, j));
        out[m](i, j) = acc;
      }
  return out;
}

template <typename MetricFn>
Christoffel christoffel_fd(const MetricFn& metric, const Vec2& x, double h) {
  std::array<Mat2, 2> dg;
  for (int k = 0; k < 2; ++k) {
    Vec2 e = Vec2::Zero();
    e[k] = h;
    dg[k] = (metric(x + e) - metric(x - e)) / (2.0 * h);
  }
  return christoffel_from_first_kind(metric(x), dg);
}

// Christoffels of diag(G(v), E(v)) in coordinates (u, v).
Christoffel revolution_christoffel(double G, double Gv, double E, double Ev) {
  Christoffel c{Mat2::Zero(), Mat2::Zero()};
  c[0](0, 1) = c[0](1, 0) = Gv / (2.0 * G);
  c[1](0, 0) = -Gv / (2.0 * E);
  c[1](1, 1) = Ev / (2.0 * E);
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

SurfaceChart SurfaceChart::euclidean_plane(ChartDomain domain) {
  SurfaceChart s;
  s.kind_ = SurfaceKind::kEuclideanPlane;
  domain.periodic_u = false;
  s.domain_ = domain;
  return s;
}

SurfaceChart SurfaceChart::round_sphere(double r, double colat_min, double colat_max) {
  if (!(r > 0)) throw ConfigError("/surface/r", "non-positive radius");
  if (!(colat_min >= 0 && colat_min < colat_max && colat_max < kPi))
    throw ConfigError("/surface/colatitude", "colatitude range must lie in [0, pi)");
  SurfaceChart s;
  s.kind_ = SurfaceKind::kRoundSphere;
  s.polar_ = true;
  s.r_ = r;
  s.domain_ = {0.0, kTwoPi, colat_min, colat_max, true};
  s.t_lo_ = colat_min;
  s.t_hi_ = colat_max;
  return s;
}

SurfaceChart SurfaceChart::ellipsoid(double a, double z_min, double z_max) {
  if (!(a > 0)) throw ConfigError("/surface/profile/a", "non-positive radius");
  if (!(z_min > -a && z_min < z_max && z_max <= a))
    throw ConfigError("/surface/z", "height range must lie in (-a, a]");
  SurfaceChart s;
  s.kind_ = SurfaceKind::kRevolution;
  s.polar_ = true;
  s.a_ = a;
  s.domain_ = {0.0, kTwoPi, z_min, z_max, true};
  s.t_lo_ = s.polar_t_of_v(z_max);
  s.t_hi_ = s.polar_t_of_v(z_min);
  return s;
}

SurfaceChart SurfaceChart::sampled_revolution(const std::vector<double>& z, const std::vector<double>& rho) {
  if (z.size() != rho.size()) throw ConfigError("/surface/profile", "z and rho must have equal length");
  if (z.size() < 4) throw ConfigError("/surface/profile/z", "at least 4 samples required");
  for (std::size_t i = 0; i + 1 < z.size(); ++i)
    if (!(z[i] < z[i + 1])) throw ConfigError("/surface/profile/z", "heights must be strictly increasing");
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (!(rho[i] > 0)) throw ConfigError("/surface/profile/rho/" + std::to_string(i), "non-positive profile");
  SurfaceChart s;
  s.kind_ = SurfaceKind::kRevolution;
  s.profile_ = std::make_shared<SampledProfile>(z, rho);
  s.domain_ = {0.0, kTwoPi, z.front(), z.back(), true};
  return s;
}

SurfaceChart SurfaceChart::conformal_plane(ChartDomain domain, LogFactor f) {
  SurfaceChart s;
  s.kind_ = SurfaceKind::kConformalPlane;
  domain.periodic_u = false;
  s.domain_ = domain;
  s.f_ = std::move(f);
  return s;
}

SurfaceChart SurfaceChart::flat_cylinder(double circumference, double v_min, double v_max) {
  if (!(circumference > 0)) throw ConfigError("/surface/circumference", "non-positive radius");
  if (!(v_min < v_max)) throw ConfigError("/surface/v", "interval must satisfy lo < hi");
  SurfaceChart s;
  s.kind_ = SurfaceKind::kFlatCylinder;
  s.domain_ = {0.0, circumference, v_min, v_max, true};
  return s;
}

// ---------------------------------------------------------------------------
// Polar helpers

double SurfaceChart::polar_t_of_v(double v) const {
  if (kind_ == SurfaceKind::kRoundSphere) return v;
  return std::acos(std::clamp(v / a_, -1.0, 1.0));
}

double SurfaceChart::polar_v_of_t(double t) const {
  if (kind_ == SurfaceKind::kRoundSphere) return t;
  return a_ * std::cos(t);
}

double SurfaceChart::polar_dt_dv(double v) const {
  if (kind_ == SurfaceKind::kRoundSphere) return 1.0;
  return -1.0 / std::sqrt(a_ * a_ - v * v);
}

double SurfaceChart::polar_rho(double t) const {
  return kind_ == SurfaceKind::kRoundSphere ? r_ * std::sin(t) : std::sin(t);
}

void SurfaceChart::polar_coefficients(double t, double& P, double& Q, double& P1, double& Q1) const {
  const PolarSeries s = polar_series(t);
  if (kind_ == SurfaceKind::kRoundSphere) {
    const double r2 = r_ * r_;
    P = r2 * s.S;
    Q = r2 * s.Q0;
    P1 = r2 * s.S1;
    Q1 = r2 * s.Q01;
  } else {
    const double e = a_ * a_ - 1.0;
    P = s.S;
    Q = s.Q0 + e * s.S;
    P1 = s.S1;
    Q1 = s.Q01 + e * s.S1;
  }
}

// ---------------------------------------------------------------------------
// Public chart

bool SurfaceChart::contains(SurfacePoint p) const {
  if (!std::isfinite(p.u) || !std::isfinite(p.v)) return false;
  if (!domain_.periodic_u && (p.u < domain_.u_min || p.u > domain_.u_max)) return false;
  return p.v >= domain_.v_min && p.v <= domain_.v_max;
}

Mat2 SurfaceChart::metric_at(SurfacePoint p) const {
  Mat2 g = Mat2::Identity();
  switch (kind_) {
    case SurfaceKind::kEuclideanPlane:
    case SurfaceKind::kFlatCylinder:
      break;
    case SurfaceKind::kRoundSphere: {
      const double s = r_ * std::sin(p.v);
      g(0, 0) = s * s;
      g(1, 1) = r_ * r_;
      break;
    }
    case SurfaceKind::kRevolution: {
      double rho, rho1;
      if (profile_) {
        rho = profile_->rho(p.v);
        rho1 = profile_->rho1(p.v);
      } else {
        rho = std::sqrt(std::max(0.0, 1.0 - p.v * p.v / (a_ * a_)));
        rho1 = -p.v / (a_ * a_ * rho);
      }
      g(0, 0) = rho * rho;
      g(1, 1) = 1.0 + rho1 * rho1;
      break;
    }
    case SurfaceKind::kConformalPlane:
      g *= std::exp(2.0 * f_.value(p.vec()));
      break;
  }
  return g;
}

Geometry SurfaceChart::geometry_at(SurfacePoint p) const {
  if (!contains(p)) throw NumericalError("point outside the chart domain");
  Geometry out;
  switch (kind_) {
    case SurfaceKind::kEuclideanPlane:
    case SurfaceKind::kFlatCylinder:
      return out;
    case SurfaceKind::kRoundSphere: {
      const double s = std::sin(p.v), c = std::cos(p.v);
      if (s <= 0.0) throw NumericalError("public sphere chart is singular at the pole");
      out.metric = metric_at(p);
      out.christoffel[0](0, 1) = out.christoffel[0](1, 0) = c / s;
      out.christoffel[1](0, 0) = -s * c;
      out.gauss_curvature = 1.0 / (r_ * r_);
      return out;
    }
    case SurfaceKind::kRevolution: {
      double rho, rho1, rho2;
      if (profile_) {
        rho = profile_->rho(p.v);
        rho1 = profile_->rho1(p.v);
        rho2 = profile_->rho2(p.v);
      } else {
        const double a2 = a_ * a_;
        if (std::abs(p.v) >= a_) throw NumericalError("public revolution chart is singular at the pole");
        rho = std::sqrt(1.0 - p.v * p.v / a2);
        rho1 = -p.v / (a2 * rho);
        rho2 = -1.0 / (a2 * rho * rho * rho);
      }
      const double G = rho * rho, Gv = 2.0 * rho * rho1;
      const double E = 1.0 + rho1 * rho1, Ev = 2.0 * rho1 * rho2;
      out.metric = metric_at(p);
      out.christoffel = revolution_christoffel(G, Gv, E, Ev);
      out.gauss_curvature = -rho2 / (rho * E * E);
      return out;
    }
    case SurfaceKind::kConformalPlane: {
      double f;
      Vec2 grad;
      Mat2 hess;
      f_.evaluate(p.vec(), f, grad, hess);
      out.metric = std::exp(2.0 * f) * Mat2::Identity();
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            out.christoffel[k](i, j) = (i == k ? grad[j] : 0.0) + (j == k ? grad[i] : 0.0) - (i == j ? grad[k] : 0.0);
      out.gauss_curvature = -std::exp(-2.0 * f) * hess.trace();
      return out;
    }
  }
  return out;
}

Geometry SurfaceChart::geometry_fd(SurfacePoint p, double h) const {
  if (!contains(p)) throw NumericalError("point outside the chart domain");
  auto metric = [this](const Vec2& x) { return metric_at(SurfacePoint::of(x)); };
  Geometry out;
  out.metric = metric(p.vec());
  out.christoffel = christoffel_fd(metric, p.vec(), h);
  out.gauss_curvature = brioschi_curvature(metric, p.vec(), 1e-4);
  return out;
}

// ---------------------------------------------------------------------------
// Working chart

Vec2 SurfaceChart::to_working(SurfacePoint p) const {
  if (!polar_) return p.vec();
  const double t = polar_t_of_v(p.v);
  return {t * std::cos(p.u), t * std::sin(p.u)};
}

SurfacePoint SurfaceChart::from_working(const Vec2& x) const {
  if (polar_) {
    const double t = x.norm();
    const double u = t > 0.0 ? wrap(std::atan2(x[1], x[0]), kTwoPi) : 0.0;
    return {u, polar_v_of_t(t)};
  }
  if (domain_.periodic_u) return {domain_.u_min + wrap(x[0] - domain_.u_min, period()), x[1]};
  return SurfacePoint::of(x);
}

Mat2 SurfaceChart::working_jacobian(SurfacePoint p) const {
  if (!polar_) return Mat2::Identity();
  const double t = polar_t_of_v(p.v), dt = polar_dt_dv(p.v);
  const double c = std::cos(p.u), s = std::sin(p.u);
  Mat2 j;
  j << -t * s, dt * c, t * c, dt * s;
  return j;
}

Vec2 SurfaceChart::tangent_to_working(const TangentVector& t) const {
  return working_jacobian(t.base) * t.components;
}

TangentVector SurfaceChart::tangent_from_working(const Vec2& x, const Vec2& w) const {
  const SurfacePoint p = from_working(x);
  const Mat2 j = working_jacobian(p);
  if (std::abs(j.determinant()) < 1e-14) throw NumericalError("tangent vector at a chart singularity");
  return {p, j.inverse() * w};
}

bool SurfaceChart::working_contains(const Vec2& x, double slack) const {
  if (!std::isfinite(x[0]) || !std::isfinite(x[1])) return false;
  if (polar_) {
    const double t = x.norm();
    return t >= t_lo_ - slack && t <= t_hi_ + slack;
  }
  if (!domain_.periodic_u && (x[0] < domain_.u_min - slack || x[0] > domain_.u_max + slack)) return false;
  return x[1] >= domain_.v_min - slack && x[1] <= domain_.v_max + slack;
}

Mat2 SurfaceChart::working_metric(const Vec2& x) const {
  if (!polar_) return metric_at(SurfacePoint::of(x));
  double P, Q, P1, Q1;
  polar_coefficients(x.norm(), P, Q, P1, Q1);
  return P * Mat2::Identity() + Q * x * x.transpose();
}

double SurfaceChart::working_curvature(const Vec2& x) const {
  if (polar_) {
    if (kind_ == SurfaceKind::kRoundSphere) return 1.0 / (r_ * r_);
    const double t = x.norm();
    const double s = std::sin(t), c = std::cos(t);
    const double d = a_ * a_ * s * s + c * c;
    return a_ * a_ / (d * d);
  }
  return geometry_at(from_working(x)).gauss_curvature;
}

Geometry SurfaceChart::working_geometry(const Vec2& x) const {
  if (!polar_) {
    Geometry g = geometry_at(from_working(x));
    return g;
  }
  const double t = x.norm();
  double P, Q, P1, Q1;
  polar_coefficients(t, P, Q, P1, Q1);
  Geometry out;
  out.metric = P * Mat2::Identity() + Q * x * x.transpose();
  // First-kind symbols Gamma_{k,ij}.
  std::array<Mat2, 2> first;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        first[k](i, j) = 0.5 * P1 * (x[i] * (k == j) + x[j] * (k == i) - x[k] * (i == j)) +
                         0.5 * Q1 * x[i] * x[j] * x[k] + Q * (i == j) * x[k];
  const Mat2 ginv = out.metric.inverse();
  for (int m = 0; m < 2; ++m) out.christoffel[m] = ginv(m, 0) * first[0] + ginv(m, 1) * first[1];
  out.gauss_curvature = working_curvature(x);
  return out;
}

Geometry SurfaceChart::working_geometry_fd(const Vec2& x, double h) const {
  auto metric = [this](const Vec2& y) { return working_metric(y); };
  Geometry out;
  out.metric = metric(x);
  out.christoffel = christoffel_fd(metric, x, h);
  out.gauss_curvature = brioschi_curvature(metric, x, 1e-4);
  return out;
}

Vec2 SurfaceChart::acceleration(const Vec2& x, const Vec2& v) const {
  switch (kind_) {
    case SurfaceKind::kEuclideanPlane:
    case SurfaceKind::kFlatCylinder:
      return Vec2::Zero();
    case SurfaceKind::kConformalPlane: {
      double f;
      Vec2 grad;
      Mat2 hess;
      f_.evaluate(x, f, grad, hess);
      return v.squaredNorm() * grad - 2.0 * grad.dot(v) * v;
    }
    case SurfaceKind::kRoundSphere:
    case SurfaceKind::kRevolution:
      break;
  }
  if (polar_) {
    const double t2 = x.squaredNorm();
    double P, Q, P1, Q1;
    polar_coefficients(std::sqrt(t2), P, Q, P1, Q1);
    const double xv = x.dot(v), vv = v.squaredNorm();
    const Vec2 w = P1 * xv * v + (-0.5 * P1 * vv + 0.5 * Q1 * xv * xv + Q * vv) * x;
    const Vec2 ginv_w = (w - (Q / (P + Q * t2)) * x.dot(w) * x) / P;
    return -ginv_w;
  }
  const Geometry g = working_geometry(x);
  Vec2 a;
  for (int k = 0; k < 2; ++k) a[k] = -v.dot(g.christoffel[k] * v);
  return a;
}

double SurfaceChart::norm(const Vec2& x, const Vec2& w) const { return std::sqrt(dot(x, w, w)); }

double SurfaceChart::dot(const Vec2& x, const Vec2& a, const Vec2& b) const {
  switch (kind_) {
    case SurfaceKind::kEuclideanPlane:
    case SurfaceKind::kFlatCylinder:
      return a.dot(b);
    case SurfaceKind::kConformalPlane:
      return std::exp(2.0 * f_.value(x)) * a.dot(b);
    default:
      return a.dot(working_metric(x) * b);
  }
}

double SurfaceChart::working_diameter() const {
  if (polar_) return 2.0 * t_hi_;
  return std::hypot(domain_.u_max - domain_.u_min, domain_.v_max - domain_.v_min);
}

Vec2 SurfaceChart::picture(const Vec2& x) const {
  if (polar_) {
    const double t = x.norm();
    const double scale = t > 1e-12 ? polar_rho(t) / t : (kind_ == SurfaceKind::kRoundSphere ? r_ : 1.0);
    return scale * x;
  }
  if (kind_ == SurfaceKind::kRevolution) {
    const double rho = profile_->rho(x[1]);
    return {rho * std::cos(x[0]), rho * std::sin(x[0])};
  }
  return x;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

ChartDomain read_rectangle(FieldReader& r, const std::string& key, ChartDomain fallback) {
  const json* d = r.optional(key);
  if (!d) return fallback;
  FieldReader dr(*d, r.path_of(key));
  const auto u = dr.interval("u");
  const auto v = dr.interval("v");
  dr.reject_unknown();
  return {u[0], u[1], v[0], v[1], false};
}

Bump read_bump(const json& j, const std::string& path) {
  FieldReader r(j, path);
  Bump b;
  const std::string shape = r.text_or("shape", "gaussian");
  if (shape == "gaussian") {
    b.shape = Bump::Shape::kGaussian;
  } else if (shape == "compact") {
    b.shape = Bump::Shape::kCompact;
  } else {
    throw ConfigError(r.path_of("shape"), "unknown bump shape '" + shape + "'");
  }
  b.center = r.point("center");
  const json& rad = r.required("radius");
  if (rad.is_number()) {
    const double x = as_number(rad, r.path_of("radius"));
    b.radius = Vec2(x, x);
  } else {
    b.radius = as_point(rad, r.path_of("radius"));
  }
  if (!(b.radius[0] > 0 && b.radius[1] > 0)) throw ConfigError(r.path_of("radius"), "non-positive radius");
  b.amplitude = r.number("amplitude");
  r.reject_unknown();
  return b;
}

}  // namespace

SurfaceChart load_surface(const json& doc, const std::string& path) {
  FieldReader r(doc, path);
  const std::string kind = r.text("kind");
  SurfaceChart chart;
  if (kind == "euclidean-plane") {
    chart = SurfaceChart::euclidean_plane(read_rectangle(r, "domain", {-10.0, 10.0, -10.0, 10.0, false}));
  } else if (kind == "round-sphere") {
    const double radius = r.positive("r", "radius");
    const auto colat = r.interval_or("colatitude", {0.0, 3.0});
    if (!(colat[0] >= 0 && colat[1] < kPi))
      throw ConfigError(r.path_of("colatitude"), "colatitude range must lie in [0, pi)");
    chart = SurfaceChart::round_sphere(radius, colat[0], colat[1]);
  } else if (kind == "revolution") {
    FieldReader pr(r.required("profile"), r.path_of("profile"));
    const std::string type = pr.text("type");
    if (type == "ellipsoid") {
      const double a = pr.positive("a", "radius");
      pr.reject_unknown();
      const auto z = r.interval_or("z", {-0.95 * a, a});
      if (!(z[0] > -a && z[1] <= a)) throw ConfigError(r.path_of("z"), "height range must lie in (-a, a]");
      chart = SurfaceChart::ellipsoid(a, z[0], z[1]);
    } else if (type == "samples") {
      const auto z = pr.numbers("z");
      const auto rho = pr.numbers("rho");
      pr.reject_unknown();
      for (std::size_t i = 0; i < rho.size(); ++i)
        if (!(rho[i] > 0)) throw ConfigError(pr.path_of("rho") + "/" + std::to_string(i), "non-positive profile");
      chart = SurfaceChart::sampled_revolution(z, rho);
    } else {
      throw ConfigError(pr.path_of("type"), "unknown profile type '" + type + "'");
    }
  } else if (kind == "conformal-plane") {
    const ChartDomain domain = read_rectangle(r, "domain", {-10.0, 10.0, -10.0, 10.0, false});
    LogFactor f;
    if (const json* lf = r.optional("log_factor")) {
      FieldReader fr(*lf, r.path_of("log_factor"));
      f.constant = fr.number_or("constant", 0.0);
      if (const json* bumps = fr.optional("bumps")) {
        if (!bumps->is_array()) throw ConfigError(fr.path_of("bumps"), "expected an array");
        for (std::size_t i = 0; i < bumps->size(); ++i)
          f.bumps.push_back(read_bump((*bumps)[i], fr.path_of("bumps") + "/" + std::to_string(i)));
      }
      fr.reject_unknown();
    }
    chart = SurfaceChart::conformal_plane(domain, f);
  } else if (kind == "flat-cylinder") {
    const double c = r.positive("circumference", "radius");
    const auto v = r.interval_or("v", {-1.0, 1.0});
    chart = SurfaceChart::flat_cylinder(c, v[0], v[1]);
  } else {
    throw ConfigError(r.path_of("kind"), "unknown kind '" + kind + "'");
  }
  r.reject_unknown();
  return chart;
}

SurfaceChart load_surface(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("malformed document: ") + e.what());
  }
  return load_surface(doc, "");
}

}  // namespace widthlab
