#include "widthlab/geodesic.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <stdexcept>

namespace widthlab {

namespace {

struct Node {
  Vec2 x;
  Vec2 v;
};

Node rk4(const SurfaceChart& s, const Node& y, double h) {
  const Vec2 k1x = y.v, k1v = s.acceleration(y.x, y.v);
  const Vec2 x2 = y.x + 0.5 * h * k1x, v2 = y.v + 0.5 * h * k1v;
  const Vec2 k2v = s.acceleration(x2, v2);
  const Vec2 x3 = y.x + 0.5 * h * v2, v3 = y.v + 0.5 * h * k2v;
  const Vec2 k3v = s.acceleration(x3, v3);
  const Vec2 x4 = y.x + h * v3, v4 = y.v + h * k3v;
  const Vec2 k4v = s.acceleration(x4, v4);
  return {y.x + h / 6.0 * (k1x + 2.0 * v2 + 2.0 * v3 + v4), y.v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

struct RayEnd {
  GeodesicPath::Stop stop = GeodesicPath::Stop::kLength;
  Node end;
  double length = 0.0;
  bool degenerate = false;
};

// Root of event(rk4(y, tau)) for tau in (a, b], where the event is negative at a
// and non-negative at b.
template <typename Event>
double localize(const SurfaceChart& s, const Node& y, double a, double b, double fa, double fb, const Event& event) {
  if (fb == 0.0) return b;
  auto f = [&](double tau) { return event(rk4(s, y, tau)); };
  boost::uintmax_t iters = 60;
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), iters);
  return r.second;
}

// Integrates from y for at most max_len, stopping where event(node) first
// changes from negative to non-negative or the ray leaves the chart.  With
// start_on_event the start lies on the event surface and the ray is assumed
// to move into its negative side.
template <typename Event>
RayEnd integrate(const SurfaceChart& s, Node y, double max_len, double h0, const Event& event, bool start_on_event,
                 std::vector<Node>* record) {
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(max_len / h0 - 1e-9)));
  const double h = max_len / steps;
  double prev = start_on_event ? -1.0 : event(y);
  if (record) record->push_back(y);
  RayEnd out;
  for (long k = 0; k < steps; ++k) {
    Node next;
    try {
      next = rk4(s, y, h);
    } catch (const NumericalError&) {
      out.stop = GeodesicPath::Stop::kDomain;
      out.end = y;
      out.length = k * h;
      return out;
    }
    const double e = event(next);
    if (prev < 0.0 && e >= 0.0) {
      double a = 0.0, fa = prev;
      if (k == 0 && start_on_event) {
        // The event vanishes at tau = 0; find an interior point first.
        a = 0.5 * h;
        fa = event(rk4(s, y, a));
        while (fa >= 0.0 && a > 1e-12 * h) {
          a *= 0.5;
          fa = event(rk4(s, y, a));
        }
        if (fa >= 0.0) {
          out.stop = GeodesicPath::Stop::kBoundary;
          out.end = y;
          out.degenerate = true;
          return out;
        }
      }
      const double tau = localize(s, y, a, h, fa, e, event);
      out.stop = GeodesicPath::Stop::kBoundary;
      out.end = rk4(s, y, tau);
      out.length = k * h + tau;
      if (record) record->push_back(out.end);
      return out;
    }
    if (!s.working_contains(next.x, 1e-9 * s.working_diameter())) {
      out.stop = GeodesicPath::Stop::kDomain;
      out.end = y;
      out.length = k * h;
      return out;
    }
    y = next;
    prev = e;
    if (record) record->push_back(y);
  }
  out.end = y;
  out.length = max_len;
  return out;
}

// g-orthonormal basis of the working tangent plane at x.
void orthonormal_basis(const SurfaceChart& s, const Vec2& x, Vec2& e1, Vec2& e2) {
  const Mat2 g = s.working_metric(x);
  e1 = Vec2(1.0, 0.0) / std::sqrt(g(0, 0));
  e2 = rotate_left(g, e1);
}

void fill_points(const SurfaceChart& s, GeodesicPath& path) {
  path.points.clear();
  path.points.reserve(path.working.size());
  for (const Vec2& x : path.working) path.points.push_back(s.from_working(x));
}

void fill_directions(const SurfaceChart& s, GeodesicPath& path) {
  const Vec2& a = path.working.front();
  const Vec2& b = path.working.back();
  try {
    path.start_dir = s.tangent_from_working(a, path.start_velocity);
    path.end_dir = s.tangent_from_working(b, path.end_velocity);
  } catch (const NumericalError&) {
    // Chart singularity at an endpoint; only working velocities are kept.
  }
}

double straight_metric_length(const SurfaceChart& s, const Vec2& a, const Vec2& b) {
  const int m = 32;
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    const Vec2 mid = a + (i + 0.5) / m * (b - a);
    total += s.norm(mid, (b - a) / m);
  }
  return total;
}

// Safeguarded secant for f(x) = 0 on a bracket [a, b] with f(a) f(b) < 0,
// started from x0.  Iterates toward |f| <= tol and returns the best abscissa
// when its residual is at most accept; nothing otherwise (a jump rather than
// a root).
template <typename F>
std::optional<double> bracket_solve(const F& f, double a, double b, double fa, double fb, double x0, double tol,
                                    double accept, int max_evals = 16) {
  double xp = a, fp = fa;
  if (!(x0 > a && x0 < b)) x0 = a - fa * (b - a) / (fb - fa);
  double x = x0;
  double best_x = 0.0, best_f = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_evals; ++it) {
    const double fx = f(x);
    if (!std::isfinite(fx)) break;
    if (std::abs(fx) < best_f) {
      best_f = std::abs(fx);
      best_x = x;
    }
    if (std::abs(fx) <= tol) break;
    if ((fx < 0) == (fa < 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (b - a < 1e-15 * (1.0 + std::abs(a))) break;
    double next = (fx != fp) ? x - fx * (x - xp) / (fx - fp) : 0.5 * (a + b);
    if (!(next > a && next < b) || it % 3 == 2) {
      // False position with the Illinois weighting keeps the bracket shrinking.
      next = a - fa * (b - a) / (fb - fa);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
    }
    xp = x;
    fp = fx;
    x = next;
  }
  if (best_f <= accept) return best_x;
  return std::nullopt;
}

// Cubic Lagrange inverse interpolation of alpha at F = 0 through up to four
// samples; returns NaN when the samples are not usable.
double inverse_interpolate(const std::vector<double>& F, const std::vector<double>& A) {
  const std::size_t m = F.size();
  double x = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      if (F[i] == F[j]) return std::numeric_limits<double>::quiet_NaN();
      w *= (0.0 - F[j]) / (F[i] - F[j]);
    }
    x += w * A[i];
  }
  return x;
}

}  // namespace

double geodesic_step(const SurfaceChart& s, double max_len, double scale) {
  const double h0 = scale * s.working_diameter();
  return max_len / std::max(1.0, std::ceil(max_len / h0 - 1e-9));
}

GeodesicPath shoot_working(const SurfaceChart& s, const Vec2& x, const Vec2& unit_velocity, double max_len,
                           const BoundaryCurve* stop, double step_scale) {
  if (!(max_len > 0)) throw std::invalid_argument("max_len must be positive");
  const double speed = s.norm(x, unit_velocity);
  if (std::abs(speed - 1.0) > 1e-9) throw std::invalid_argument("direction is not a unit vector");
  const double h0 = step_scale * s.working_diameter();
  std::vector<Node> nodes;
  RayEnd end;
  if (stop) {
    end = integrate(
        s, Node{x, unit_velocity}, max_len, h0, [stop](const Node& n) { return stop->level(n.x); }, true, &nodes);
  } else {
    end = integrate(s, Node{x, unit_velocity}, max_len, h0, [](const Node&) { return -1.0; }, false, &nodes);
  }
  if (nodes.size() < 2 && end.stop == GeodesicPath::Stop::kDomain)
    throw NumericalError("geodesic leaves the chart domain immediately");
  GeodesicPath path;
  path.step = geodesic_step(s, max_len, step_scale);
  path.stop = end.stop;
  path.length = end.length;
  for (const Node& n : nodes) {
    path.working.push_back(n.x);
    path.velocities.push_back(n.v);
  }
  path.start_velocity = unit_velocity;
  path.end_velocity = nodes.back().v;
  fill_points(s, path);
  fill_directions(s, path);
  return path;
}

GeodesicPath shoot(const SurfaceChart& s, SurfacePoint p, const TangentVector& dir, double max_len, double step_scale) {
  if (!s.contains(p)) throw NumericalError("start point outside the chart domain");
  const Vec2 x = s.to_working(p);
  TangentVector t = dir;
  t.base = p;
  const Vec2 v = s.tangent_to_working(t);
  return shoot_working(s, x, v, max_len, nullptr, step_scale);
}

namespace {

GeodesicPath straight_path(const SurfaceChart& s, const Vec2& a, const Vec2& b, double step_scale) {
  GeodesicPath path;
  const double len = (b - a).norm();
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(len / (step_scale * s.working_diameter()))));
  for (long k = 0; k <= steps; ++k) path.working.push_back(a + (b - a) * (static_cast<double>(k) / steps));
  path.velocities.assign(path.working.size(), (b - a) / len);
  path.length = len;
  path.step = len / steps;
  path.start_velocity = path.end_velocity = (b - a) / len;
  path.angle = std::atan2(b[1] - a[1], b[0] - a[0]);
  fill_points(s, path);
  fill_directions(s, path);
  return path;
}

std::vector<GeodesicPath> dedup_paths(std::vector<GeodesicPath> paths, double angle_tol) {
  std::sort(paths.begin(), paths.end(), [](const GeodesicPath& a, const GeodesicPath& b) { return a.angle < b.angle; });
  std::vector<GeodesicPath> out;
  for (auto& p : paths) {
    if (!out.empty() && p.angle - out.back().angle < angle_tol) {
      if (p.length < out.back().length) out.back() = std::move(p);
      continue;
    }
    out.push_back(std::move(p));
  }
  if (out.size() > 1 && out.front().angle + kTwoPi - out.back().angle < angle_tol) {
    if (out.back().length < out.front().length) out.front() = std::move(out.back());
    out.pop_back();
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GeodesicPath& a, const GeodesicPath& b) { return a.length < b.length; });
  return out;
}

}  // namespace

std::vector<GeodesicPath> connect(const SurfaceChart& s, SurfacePoint p, SurfacePoint q, double step_scale) {
  if (!s.contains(p) || !s.contains(q)) throw NumericalError("endpoint outside the chart domain");
  const Vec2 xp = s.to_working(p);
  Vec2 xq = s.to_working(q);
  if (s.periodic() && !s.polar()) xq[0] = xp[0] + wrap_centered(xq[0] - xp[0], s.period());
  if ((xq - xp).norm() < 1e-14) throw std::invalid_argument("connect needs distinct points");

  if (s.kind() == SurfaceKind::kEuclideanPlane) return {straight_path(s, xp, xq, step_scale)};
  if (s.kind() == SurfaceKind::kFlatCylinder) {
    std::vector<GeodesicPath> out;
    for (int k = -1; k <= 1; ++k) out.push_back(straight_path(s, xp, xq + Vec2(k * s.period(), 0.0), step_scale));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.length < b.length; });
    return out;
  }

  constexpr int kRays = 720;
  const double max_len = 4.0 * straight_metric_length(s, xp, xq);
  const double h0 = step_scale * s.working_diameter();
  const double scale = (xq - xp).norm();
  const double radius = 0.5 * scale;
  const double tol = 1e-9 * s.working_diameter();
  Vec2 e1, e2;
  orthonormal_basis(s, xp, e1, e2);

  struct Shot {
    bool valid = false;
    double miss = 0.0;
    double length = 0.0;
    Node end;
  };
  auto fire = [&](double theta) {
    const Vec2 v = std::cos(theta) * e1 + std::sin(theta) * e2;
    // Closest approach to q, watched only inside a disc around q.
    auto abeam = [&](const Node& n) { return (n.x - xq).norm() < radius ? (n.x - xq).dot(n.v) : -1.0; };
    const RayEnd r = integrate(s, Node{xp, v}, max_len, h0, abeam, false, nullptr);
    Shot shot;
    if (r.stop != GeodesicPath::Stop::kBoundary || (r.end.x - xq).norm() > 0.9 * radius) return shot;
    const Vec2 u = r.end.v.normalized();
    shot.valid = true;
    shot.miss = u[0] * (xq - r.end.x)[1] - u[1] * (xq - r.end.x)[0];
    shot.length = r.length;
    shot.end = r.end;
    return shot;
  };

  std::vector<double> theta(kRays);
  std::vector<Shot> shots(kRays);
  for (int k = 0; k < kRays; ++k) {
    theta[k] = kTwoPi * k / kRays;
    shots[k] = fire(theta[k]);
  }

  std::vector<GeodesicPath> found;
  auto accept = [&](double th) {
    const Vec2 v = std::cos(th) * e1 + std::sin(th) * e2;
    const Shot shot = fire(th);
    if (!shot.valid || std::abs(shot.miss) > 1e2 * tol) return;
    GeodesicPath path = shoot_working(s, xp, v, shot.length, nullptr, step_scale);
    path.angle = th;
    found.push_back(std::move(path));
  };
  for (int k = 0; k < kRays; ++k) {
    const Shot& a = shots[k];
    const Shot& b = shots[(k + 1) % kRays];
    if (a.valid && std::abs(a.miss) <= tol) {
      accept(theta[k]);
      continue;
    }
    if (!a.valid || !b.valid || std::abs(b.miss) <= tol) continue;
    if ((a.miss < 0) == (b.miss < 0)) continue;
    if (std::abs(a.miss - b.miss) > 0.5 * scale) continue;
    const double lo = theta[k], hi = theta[k] + kTwoPi / kRays;
    auto f = [&](double th) {
      const Shot sh = fire(th);
      return sh.valid ? sh.miss : std::numeric_limits<double>::quiet_NaN();
    };
    const auto root = bracket_solve(f, lo, hi, a.miss, b.miss, std::numeric_limits<double>::quiet_NaN(), tol, tol, 30);
    if (root) accept(wrap(*root, kTwoPi));
  }
  if (found.empty()) throw NumericalError("no connector found within the length bound");
  return dedup_paths(std::move(found), 1e-3);
}

Distance distance(const SurfaceChart& s, SurfacePoint p, SurfacePoint q, double step_scale, double len_window) {
  auto paths = connect(s, p, q, step_scale);
  Distance out;
  out.d = paths.front().length;
  for (auto& path : paths)
    if (path.length <= out.d * (1.0 + len_window)) out.minimizers.push_back(std::move(path));
  return out;
}

// ---------------------------------------------------------------------------

Connector Connector::reversed() const {
  Connector r = *this;
  r.sigma_p = sigma_q;
  r.sigma_q = sigma_p;
  r.alpha = std::asin(std::clamp(-sigma_q, -1.0, 1.0));
  return r;
}

std::vector<Connector> dedup_connectors(std::vector<Connector> ks, double angle_tol) {
  std::sort(ks.begin(), ks.end(), [](const Connector& a, const Connector& b) { return a.alpha < b.alpha; });
  std::vector<Connector> out;
  for (const Connector& k : ks) {
    if (!out.empty() && k.alpha - out.back().alpha < angle_tol) {
      if (k.length < out.back().length || (k.boundary_arc && k.length <= out.back().length * (1 + 1e-12)))
        out.back() = k;
      continue;
    }
    out.push_back(k);
  }
  std::stable_sort(out.begin(), out.end(), [](const Connector& a, const Connector& b) { return a.length < b.length; });
  return out;
}

std::vector<Connector> within_window(const std::vector<Connector>& ks, double len_window) {
  std::vector<Connector> out;
  if (ks.empty()) return out;
  const double d = ks.front().length;
  for (const Connector& k : ks)
    if (k.length <= d * (1.0 + len_window)) out.push_back(k);
  return out;
}

BoundaryGeodesics::BoundaryGeodesics(const BoundaryCurve& c, bool totally_convex, double step_scale,
                                     double len_window)
    : curve_(c), plane_(c.plane()), step_scale_(step_scale), len_window_(len_window) {
  if (!plane_ && !totally_convex)
    throw ConfigError("/totally_convex", "distance queries on curved charts need a totally convex boundary");
  max_len_ = 2.0 * c.length();
}

std::optional<Connector> BoundaryGeodesics::ray(double s1, double alpha, double* s_exit) const {
  const Frame f = curve_.frame_at(s1);
  const Vec2 v = std::cos(alpha) * f.n + std::sin(alpha) * f.t;
  const double h0 = step_scale_ * curve_.surface().working_diameter();
  const BoundaryCurve& c = curve_;
  const RayEnd r = integrate(
      c.surface(), Node{f.x, v}, max_len_, h0, [&c](const Node& n) { return c.level(n.x); }, true, nullptr);
  if (r.stop != GeodesicPath::Stop::kBoundary || r.degenerate) return std::nullopt;
  const double se = c.project(r.end.x);
  const Frame fq = c.frame_at(se);
  Connector k;
  k.length = r.length;
  k.alpha = alpha;
  k.sigma_p = -std::sin(alpha);
  k.sigma_q = std::clamp(c.surface().dot(fq.x, r.end.v, fq.t), -1.0, 1.0);
  if (s_exit) *s_exit = se;
  return k;
}

BoundaryGeodesics::Fan BoundaryGeodesics::build_fan(double s) const {
  const double L = curve_.length();
  Fan fan;
  const int m = kFanSize + 2;
  fan.alpha.resize(m);
  fan.rel.resize(m);
  fan.length.resize(m);
  fan.sigma_q.resize(m);
  fan.valid.assign(m, 0);
  fan.alpha[0] = -kPi / 2;
  fan.rel[0] = L;
  fan.length[0] = 0.0;
  fan.sigma_q[0] = -1.0;
  fan.valid[0] = 1;
  fan.alpha[m - 1] = kPi / 2;
  fan.rel[m - 1] = 0.0;
  fan.length[m - 1] = 0.0;
  fan.sigma_q[m - 1] = 1.0;
  fan.valid[m - 1] = 1;
  for (int k = 0; k < kFanSize; ++k) {
    const double alpha = -kPi / 2 + kPi * (k + 0.5) / kFanSize;
    fan.alpha[k + 1] = alpha;
    double se = 0.0;
    if (auto r = ray(s, alpha, &se)) {
      fan.rel[k + 1] = wrap(se - s, L);
      fan.length[k + 1] = r->length;
      fan.sigma_q[k + 1] = r->sigma_q;
      fan.valid[k + 1] = 1;
    }
  }
  return fan;
}

std::shared_ptr<const BoundaryGeodesics::Fan> BoundaryGeodesics::fan(double s) const {
  const double L = curve_.length();
  const long long key = curve_.rotationally_symmetric() ? 0 : std::llround(wrap(s, L) / L * 16777216.0) % 16777216;
  auto it = fans_.find(key);
  if (it != fans_.end()) return it->second;
  auto f = std::make_shared<const Fan>(build_fan(curve_.rotationally_symmetric() ? 0.0 : s));
  fans_.emplace(key, f);
  return f;
}

void BoundaryGeodesics::fan_connectors(double s1, double s2, const Fan& f, std::vector<Connector>& out) const {
  const double L = curve_.length();
  const double target = wrap(s2 - s1, L);
  const double tol = 1e-9 * L;
  const int m = static_cast<int>(f.alpha.size());
  std::vector<char> hit(m, 0);
  for (int k = 1; k + 1 < m; ++k) {
    if (f.valid[k] && std::abs(f.rel[k] - target) <= tol) {
      hit[k] = 1;
      out.push_back({f.length[k], f.alpha[k], -std::sin(f.alpha[k]), f.sigma_q[k], false});
    }
  }
  auto residual = [&](double alpha) {
    double se = 0.0;
    const auto r = ray(s1, alpha, &se);
    if (!r) return std::numeric_limits<double>::quiet_NaN();
    double rel = wrap(se - s1, L);
    // Keep the residual continuous across the base point.
    if (rel - target > 0.5 * L) rel -= L;
    if (target - rel > 0.5 * L) rel += L;
    return rel - target;
  };
  for (int k = 0; k + 1 < m; ++k) {
    if (!f.valid[k] || !f.valid[k + 1] || hit[k] || hit[k + 1]) continue;
    const double fa = f.rel[k] - target, fb = f.rel[k + 1] - target;
    if ((fa < 0) == (fb < 0)) continue;
    if (std::abs(fa - fb) > 0.5 * L) continue;
    std::vector<double> F, A;
    for (int j = std::max(0, k - 1); j <= std::min(m - 1, k + 2); ++j) {
      if (!f.valid[j]) continue;
      F.push_back(f.rel[j] - target);
      A.push_back(f.alpha[j]);
    }
    const double guess = inverse_interpolate(F, A);
    const auto root = bracket_solve(residual, f.alpha[k], f.alpha[k + 1], fa, fb, guess, 1e-3 * tol, tol);
    if (!root) continue;
    if (auto r = ray(s1, *root)) out.push_back(*r);
  }
}

void BoundaryGeodesics::arc_connectors(double s1, double s2, std::vector<Connector>& out) const {
  const double L = curve_.length();
  const double ahead = wrap(s2 - s1, L);
  if (curve_.integrated_curvature(s1, s2) <= 1e-6) out.push_back({ahead, kPi / 2, -1.0, 1.0, true});
  if (curve_.integrated_curvature(s2, s1) <= 1e-6) out.push_back({L - ahead, -kPi / 2, 1.0, -1.0, true});
}

Connector BoundaryGeodesics::segment(double s1, double s2) const {
  const Frame a = curve_.frame_at(s1), b = curve_.frame_at(s2);
  const Vec2 d = b.x - a.x;
  const Vec2 u = d.normalized();
  Connector k;
  k.length = d.norm();
  k.alpha = std::atan2(u.dot(a.t), u.dot(a.n));
  k.sigma_p = -u.dot(a.t);
  k.sigma_q = u.dot(b.t);
  return k;
}

std::vector<Connector> BoundaryGeodesics::connectors(double s1, double s2) const {
  const double L = curve_.length();
  if (intrinsic_distance(L, s1, s2) < 1e-12 * L) return {};
  if (plane_) return {segment(s1, s2)};
  std::vector<Connector> out;
  fan_connectors(s1, s2, *fan(s1), out);
  arc_connectors(s1, s2, out);
  if (out.empty()) throw NumericalError("no connector found between boundary points");
  return dedup_connectors(std::move(out));
}

std::vector<Connector> BoundaryGeodesics::minimizers(double s1, double s2) const {
  return within_window(connectors(s1, s2), len_window_);
}

double BoundaryGeodesics::distance(double s1, double s2) const {
  const auto ks = connectors(s1, s2);
  return ks.empty() ? 0.0 : ks.front().length;
}

std::optional<Connector> BoundaryGeodesics::track(double s1, double s2, double alpha0, double width) const {
  const double L = curve_.length();
  if (plane_) return segment(s1, s2);
  std::vector<Connector> arcs;
  arc_connectors(s1, s2, arcs);
  for (const Connector& k : arcs)
    if (std::abs(k.alpha - alpha0) < 1e-9) return k;
  const double target = wrap(s2 - s1, L);
  const double tol = 1e-9 * L;
  auto residual = [&](double alpha) {
    double se = 0.0;
    const auto r = ray(s1, alpha, &se);
    if (!r) return std::numeric_limits<double>::quiet_NaN();
    double rel = wrap(se - s1, L);
    if (rel - target > 0.5 * L) rel -= L;
    if (target - rel > 0.5 * L) rel += L;
    return rel - target;
  };
  const int m = 8;
  const double lo = std::max(-kPi / 2 + 1e-9, alpha0 - width), hi = std::min(kPi / 2 - 1e-9, alpha0 + width);
  std::vector<double> A(m + 1), F(m + 1);
  for (int i = 0; i <= m; ++i) {
    A[i] = lo + (hi - lo) * i / m;
    F[i] = residual(A[i]);
  }
  std::optional<Connector> best;
  for (int i = 0; i < m; ++i) {
    if (!std::isfinite(F[i]) || !std::isfinite(F[i + 1])) continue;
    std::optional<double> root;
    if (std::abs(F[i]) <= tol) {
      root = A[i];
    } else if ((F[i] < 0) != (F[i + 1] < 0) && std::abs(F[i] - F[i + 1]) < 0.5 * L) {
      root = bracket_solve(residual, A[i], A[i + 1], F[i], F[i + 1], std::numeric_limits<double>::quiet_NaN(),
                           1e-3 * tol, tol);
    }
    if (!root) continue;
    if (!best || std::abs(*root - alpha0) < std::abs(best->alpha - alpha0)) best = ray(s1, *root);
  }
  return best;
}

GeodesicPath BoundaryGeodesics::path(double s1, double s2, const Connector& k) const {
  const SurfaceChart& s = curve_.surface();
  const double L = curve_.length();
  GeodesicPath p;
  if (k.boundary_arc) {
    const double dir = k.alpha > 0 ? 1.0 : -1.0;
    const long steps = std::max<long>(2, static_cast<long>(std::ceil(k.length / (step_scale_ * s.working_diameter()))));
    for (long i = 0; i <= steps; ++i) {
      const double si = s1 + dir * k.length * i / steps;
      p.working.push_back(curve_.working_point(si));
      p.velocities.push_back(dir * curve_.frame_at(si).t);
    }
    p.length = k.length;
    p.step = k.length / steps;
    p.start_velocity = dir * curve_.frame_at(s1).t;
    p.end_velocity = dir * curve_.frame_at(s2).t;
    p.boundary_arc = true;
    p.stop = GeodesicPath::Stop::kBoundary;
    fill_points(s, p);
    fill_directions(s, p);
  } else if (plane_) {
    p = straight_path(s, curve_.frame_at(s1).x, curve_.frame_at(s2).x, step_scale_);
    p.stop = GeodesicPath::Stop::kBoundary;
  } else {
    const Frame f = curve_.frame_at(s1);
    const Vec2 v = std::cos(k.alpha) * f.n + std::sin(k.alpha) * f.t;
    p = shoot_working(s, f.x, v, max_len_, &curve_, step_scale_);
  }
  p.start_s = wrap(s1, L);
  p.end_s = k.boundary_arc || plane_ ? wrap(s2, L) : curve_.project(p.working.back());
  p.angle = k.alpha;
  p.sigma_p = k.sigma_p;
  p.sigma_q = k.sigma_q;
  return p;
}

PairField BoundaryGeodesics::field(int n) const {
  PairField f;
  f.n = n;
  f.length = curve_.length();
  f.d.assign(static_cast<std::size_t>(n) * n, 0.0);
  f.minimizers.assign(static_cast<std::size_t>(n) * n, {});
  auto reversed = [](const std::vector<Connector>& ks) {
    std::vector<Connector> back;
    back.reserve(ks.size());
    for (const Connector& k : ks) back.push_back(k.reversed());
    std::stable_sort(back.begin(), back.end(), [](const Connector& a, const Connector& b) { return a.length < b.length; });
    return back;
  };
  if (curve_.rotationally_symmetric()) {
    // Offsets j and n - j are the same pairs traversed backwards.
    for (int j = 1; 2 * j <= n; ++j) {
      const auto ks = minimizers(0.0, f.s(j));
      const auto back = reversed(ks);
      for (int i = 0; i < n; ++i) {
        f.minimizers[f.index(i, i + j)] = ks;
        f.d[f.index(i, i + j)] = ks.front().length;
        if (2 * j == n) continue;
        f.minimizers[f.index(i + j, i)] = back;
        f.d[f.index(i + j, i)] = ks.front().length;
      }
    }
    return f;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto ks = minimizers(f.s(i), f.s(j));
      f.d[f.index(i, j)] = f.d[f.index(j, i)] = ks.front().length;
      f.minimizers[f.index(i, j)] = ks;
      f.minimizers[f.index(j, i)] = reversed(ks);
    }
  }
  return f;
}

}  // namespace widthlab
