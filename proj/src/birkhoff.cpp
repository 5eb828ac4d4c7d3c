#include "widthlab/birkhoff.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <stdexcept>

namespace widthlab {

namespace {

struct State {
  Vec2 x, v;
};

State rk4_step(const SurfaceChart& s, const State& y, double h) {
  const Vec2 k1v = s.acceleration(y.x, y.v);
  const Vec2 x2 = y.x + 0.5 * h * y.v, v2 = y.v + 0.5 * h * k1v;
  const Vec2 k2v = s.acceleration(x2, v2);
  const Vec2 x3 = y.x + 0.5 * h * v2, v3 = y.v + 0.5 * h * k2v;
  const Vec2 k3v = s.acceleration(x3, v3);
  const Vec2 x4 = y.x + h * v3, v4 = y.v + h * k3v;
  const Vec2 k4v = s.acceleration(x4, v4);
  return {y.x + h / 6.0 * (y.v + 2.0 * v2 + 2.0 * v3 + v4), y.v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

// Integrates x'' = -Gamma(x', x') over [0, 1]; mid receives the state at 1/2.
State flow(const SurfaceChart& s, const Vec2& a, const Vec2& w, int steps, State* mid) {
  State y{a, w};
  const double h = 1.0 / steps;
  for (int k = 0; k < steps; ++k) {
    y = rk4_step(s, y, h);
    if (mid && 2 * (k + 1) == steps) *mid = y;
  }
  return y;
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

// Arclength of the curve point nearest to x, lifted so that the working point matches x.
double lifted_project(const BoundaryCurve& c, const Vec2& x) {
  double s = c.project(x);
  const Vec2& deck = c.deck();
  if (deck.squaredNorm() > 0) {
    const double k = std::round((x - c.working_point(s)).dot(deck) / deck.squaredNorm());
    s += k * c.length();
  }
  return s;
}

std::vector<Vec2> resample(const std::vector<Vec2>& path, int segments) {
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < path.size(); ++i) cum.push_back(cum.back() + (path[i] - path[i - 1]).norm());
  std::vector<Vec2> out{path.front()};
  std::size_t j = 1;
  for (int k = 1; k < segments; ++k) {
    const double t = cum.back() * k / segments;
    while (j + 1 < cum.size() && cum[j] < t) ++j;
    const double span = cum[j] - cum[j - 1];
    const double u = span > 0 ? (t - cum[j - 1]) / span : 0.0;
    out.push_back(path[j - 1] + u * (path[j] - path[j - 1]));
  }
  out.push_back(path.back());
  return out;
}

}  // namespace

LocalGeodesic local_geodesic(const SurfaceChart& s, const Vec2& a, const Vec2& b, int steps) {
  LocalGeodesic out;
  const Vec2 chord = b - a;
  const double scale = s.working_diameter();
  if (chord.norm() <= 1e-15 * scale) {
    out.mid = a;
    return out;
  }
  if (s.flat()) {
    out.length = s.norm(a, chord);
    out.mid = 0.5 * (a + b);
    out.start_velocity = out.end_velocity = chord;
    return out;
  }
  if (steps % 2) ++steps;
  Vec2 w = chord;
  State mid, end;
  for (int it = 0; it < 30; ++it) {
    end = flow(s, a, w, steps, &mid);
    const Vec2 F = end.x - b;
    if (F.norm() <= 1e-14 * scale) break;
    const double h = 1e-7 * std::max(w.norm(), 1e-12);
    Mat2 J;
    for (int col = 0; col < 2; ++col) {
      Vec2 wh = w;
      wh[col] += h;
      J.col(col) = (flow(s, a, wh, steps, nullptr).x - end.x) / h;
    }
    Vec2 dw = J.fullPivLu().solve(-F);
    // Keep the shooting vector within the same sheet of the exponential map.
    const double cap = 0.5 * std::max(w.norm(), chord.norm());
    if (dw.norm() > cap) dw *= cap / dw.norm();
    w += dw;
    if (it == 29) throw NumericalError("local geodesic shooting did not converge");
  }
  end = flow(s, a, w, steps, &mid);
  out.length = s.norm(a, w);
  out.mid = mid.x;
  out.start_velocity = w;
  out.end_velocity = end.v;
  return out;
}

std::vector<Vec2> birkhoff_start_path(const BoundaryCurve& c, const BirkhoffOptions& o) {
  const double L = c.length();
  const Vec2 p = c.working_point(o.from * L), q = c.working_point(o.to * L);
  const Vec2 d = q - p;
  const Vec2 perp = Vec2(-d.y(), d.x()).normalized();
  return {p, p + d / 3.0 + o.bend * perp, p + 2.0 * d / 3.0 - o.bend * perp, q};
}

BirkhoffResult birkhoff_shorten(const BoundaryCurve& c, const std::vector<Vec2>& path, int segments, int max_iters,
                                double step_scale) {
  const SurfaceChart& s = c.surface();
  const double L = c.length();
  if (path.size() < 3) throw std::invalid_argument("Birkhoff path needs at least two segments");
  if (segments < 2) throw std::invalid_argument("Birkhoff needs at least two segments");
  for (const Vec2* e : {&path.front(), &path.back()}) {
    const double se = lifted_project(c, *e);
    if ((c.working_point(se) - *e).norm() > 1e-6 * L)
      throw std::invalid_argument("Birkhoff path endpoints must lie on the curve");
  }

  std::vector<Vec2> x = resample(path, std::max<int>(segments, static_cast<int>(path.size()) - 1));
  const int m = static_cast<int>(x.size()) - 1;
  double s0 = lifted_project(c, x.front()), sm = lifted_project(c, x.back());
  x.front() = c.working_point(s0);
  x.back() = c.working_point(sm);

  auto dist = [&](const Vec2& a, const Vec2& b) { return local_geodesic(s, a, b).length; };
  std::vector<double> seg(m);
  for (int i = 0; i < m; ++i) seg[i] = dist(x[i], x[i + 1]);
  auto total = [&] {
    double t = 0.0;
    for (double l : seg) t += l;
    return t;
  };

  auto relax = [&](int i) {
    const LocalGeodesic g = local_geodesic(s, x[i - 1], x[i + 1]);
    if (g.length <= seg[i - 1] + seg[i]) {
      x[i] = g.mid;
      seg[i - 1] = seg[i] = 0.5 * g.length;
    }
  };
  // Slides an endpoint along the curve to the point nearest its neighbour.
  auto slide = [&](double& se, int end, int nb, int si) {
    const double cur = seg[si];
    const double w = std::min(0.25 * L, 2.0 * cur + 1e-3 * L);
    auto f = [&](double t) { return dist(x[nb], c.working_point(t)); };
    const auto r = boost::math::tools::brent_find_minima(f, se - w, se + w, 40);
    if (r.second <= cur) {
      se = r.first;
      x[end] = c.working_point(se);
      seg[si] = r.second;
    }
  };

  BirkhoffResult out;
  out.trace.push_back(total());
  for (int it = 1;; ++it) {
    if (it > max_iters) throw NumericalError("Birkhoff shortening exceeded max_iters");
    const auto x_prev = x;
    const auto seg_prev = seg;
    const double s0_prev = s0, sm_prev = sm;
    for (int i = 1; i < m; i += 2) relax(i);
    for (int i = 2; i < m; i += 2) relax(i);
    slide(s0, 0, 1, 0);
    slide(sm, m, m - 1, m - 1);
    const double before = out.trace.back();
    const double now = total();
    out.iterations = it;
    if (now > before) {
      // Rounding noise at a fixed point; keep the previous vertices.
      x = x_prev;
      seg = seg_prev;
      s0 = s0_prev;
      sm = sm_prev;
      out.outcome = before < 1e-3 * L ? BirkhoffResult::Outcome::kPoint : BirkhoffResult::Outcome::kFreeBoundaryGeodesic;
      break;
    }
    out.trace.push_back(now);
    if (now < 1e-3 * L) {
      out.outcome = BirkhoffResult::Outcome::kPoint;
      break;
    }
    if (before - now < 1e-10 * L) {
      out.outcome = BirkhoffResult::Outcome::kFreeBoundaryGeodesic;
      break;
    }
  }

  out.nodes = x;
  out.start_s = wrap(s0, L);
  out.end_s = wrap(sm, L);
  for (int i = 0; i < m && !out.self_intersecting; ++i)
    for (int j = i + 2; j < m; ++j)
      if (segments_cross(x[i], x[i + 1], x[j], x[j + 1])) {
        out.self_intersecting = true;
        break;
      }

  if (out.outcome == BirkhoffResult::Outcome::kFreeBoundaryGeodesic) {
    const LocalGeodesic first = local_geodesic(s, x[0], x[1]);
    const Vec2 v = first.start_velocity / s.norm(x[0], first.start_velocity);
    GeodesicPath g = shoot_working(s, x[0], v, 2.0 * out.trace.back() + 0.1 * L, &c, step_scale);
    if (g.stop != GeodesicPath::Stop::kBoundary) throw NumericalError("Birkhoff limit does not return to the curve");
    g.start_s = out.start_s;
    g.end_s = c.project(g.working.back());
    const Frame fp = c.frame_at(g.start_s), fq = c.frame_at(g.end_s);
    g.sigma_p = -s.dot(fp.x, g.start_velocity, fp.t);
    g.sigma_q = s.dot(fq.x, g.end_velocity, fq.t);
    out.geodesic = std::move(g);
  }
  return out;
}

std::vector<double> robin_spectrum(const std::function<double(double)>& K, double a, double A0, double A1, int nodes,
                                   int count) {
  if (nodes < 2 || !(a > 0)) throw std::invalid_argument("robin_spectrum needs a positive interval and nodes >= 2");
  const int N = nodes;
  const double h = a / N, h2 = h * h;
  // Symmetric form: stiffness S u = lambda M u with M = diag(1/2, 1, ..., 1, 1/2).
  Eigen::VectorXd diag(N + 1), sub(N);
  std::vector<double> mass(N + 1, 1.0);
  mass[0] = mass[N] = 0.5;
  for (int i = 0; i <= N; ++i) diag[i] = 2.0 / h2 - K(i * h);
  diag[0] = 1.0 / h2 - A0 / h - 0.5 * K(0.0);
  diag[N] = 1.0 / h2 - A1 / h - 0.5 * K(a);
  for (int i = 0; i <= N; ++i) diag[i] /= mass[i];
  for (int i = 0; i < N; ++i) sub[i] = -1.0 / h2 / std::sqrt(mass[i] * mass[i + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  std::vector<double> out;
  for (int i = 0; i < std::min<int>(count, static_cast<int>(ev.size())); ++i) out.push_back(ev[i]);
  return out;
}

IndexResult free_boundary_index(const BoundaryCurve& c, const GeodesicPath& g, int nodes) {
  if (!(std::abs(g.sigma_p) <= 1e-4 && std::abs(g.sigma_q) <= 1e-4))
    throw std::invalid_argument("free_boundary_index needs a geodesic orthogonal to the curve at both ends");
  if (g.working.size() < 2) throw std::invalid_argument("free_boundary_index needs a sampled geodesic");
  const SurfaceChart& s = c.surface();
  const double a = g.length;
  std::vector<double> t;
  for (std::size_t i = 0; i < g.working.size(); ++i) t.push_back(std::min(a, g.step * static_cast<double>(i)));
  t.back() = a;
  // Cubic Hermite position along the path, then the exact curvature there.
  auto K = [&](double u) {
    const auto it = std::upper_bound(t.begin(), t.end(), u);
    std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - t.begin()), 1, t.size() - 1);
    const double span = t[j] - t[j - 1];
    if (!(span > 0)) return s.working_curvature(g.working[j]);
    const double w = std::clamp((u - t[j - 1]) / span, 0.0, 1.0);
    const double h00 = (1 + 2 * w) * (1 - w) * (1 - w), h10 = w * (1 - w) * (1 - w);
    const double h01 = w * w * (3 - 2 * w), h11 = w * w * (w - 1);
    const Vec2 x = h00 * g.working[j - 1] + h10 * span * g.velocities[j - 1] + h01 * g.working[j] +
                   h11 * span * g.velocities[j];
    return s.working_curvature(x);
  };

  IndexResult out;
  out.length = a;
  out.A_start = c.frame_at(g.start_s).curvature;
  out.A_end = c.frame_at(g.end_s).curvature;
  const int n = std::max(nodes, 400);
  const auto coarse = robin_spectrum(K, a, out.A_start, out.A_end, n);
  const auto fine = robin_spectrum(K, a, out.A_start, out.A_end, 2 * n);
  for (std::size_t i = 0; i < fine.size(); ++i) out.eigenvalues.push_back((4.0 * fine[i] - coarse[i]) / 3.0);

  out.eps = 1e-6 * (kPi / a) * (kPi / a);
  for (double l : out.eigenvalues) {
    if (l < -out.eps) ++out.index;
    else if (std::abs(l) <= out.eps) ++out.nullity;
  }
  // Simpson integral of K over the path.
  const int panels = 2 * n;
  double intK = K(0.0) + K(a);
  for (int i = 1; i < panels; ++i) intK += (i % 2 ? 4.0 : 2.0) * K(a * i / panels);
  intK *= a / panels / 3.0;
  out.rayleigh_constant = (-intK - out.A_start - out.A_end) / a;
  return out;
}

std::vector<FreeBoundaryGeodesic> find_free_boundary_geodesics(const BoundaryGeodesics& g, int scan) {
  if (scan < 64) throw std::invalid_argument("free-boundary scan needs at least 64 start points");
  const BoundaryCurve& c = g.curve();
  const double L = c.length();
  struct Sample {
    bool ok = false;
    double sigma = 0.0, exit = 0.0;
  };
  auto sample = [&](double s) {
    Sample out;
    double se = 0.0;
    if (const auto k = g.ray(s, 0.0, &se)) out = {true, k->sigma_q, se};
    return out;
  };
  std::vector<Sample> samples(scan);
  for (int i = 0; i < scan; ++i) samples[i] = sample(L * i / scan);

  std::vector<FreeBoundaryGeodesic> out;
  auto add = [&](double s1, bool family) {
    double se = 0.0;
    const auto k = g.ray(s1, 0.0, &se);
    if (!k || std::abs(k->sigma_q) > 1e-4) return;
    FreeBoundaryGeodesic f;
    f.s1 = wrap(s1, L);
    f.s2 = wrap(se, L);
    f.length = k->length;
    f.connector = *k;
    f.family = family;
    for (const auto& o : out) {
      const double direct = std::abs(wrap_centered(o.s1 - f.s1, L)) + std::abs(wrap_centered(o.s2 - f.s2, L));
      const double swapped = std::abs(wrap_centered(o.s1 - f.s2, L)) + std::abs(wrap_centered(o.s2 - f.s1, L));
      if (std::min(direct, swapped) <= 1e-6 * L) return;
    }
    f.path = g.path(f.s1, f.s2, *k);
    out.push_back(std::move(f));
  };

  const bool all_orthogonal = std::all_of(samples.begin(), samples.end(), [](const Sample& x) {
    return x.ok && std::abs(x.sigma) <= 1e-4;
  });
  if (c.rotationally_symmetric() && all_orthogonal) {
    add(0.0, true);
    return out;
  }

  for (int i = 0; i < scan; ++i) {
    const Sample& a = samples[i];
    const Sample& b = samples[(i + 1) % scan];
    const double sa = L * i / scan, sb = L * (i + 1) / scan;
    if (!a.ok || !b.ok || a.sigma * b.sigma >= 0.0) continue;
    // Exits must move continuously across the bracket.
    if (std::abs(wrap_centered(a.exit - b.exit, L)) > 0.1 * L) continue;
    auto f = [&](double s) {
      const Sample x = sample(s);
      if (!x.ok) throw NumericalError("normal ray lost inside a bracket");
      return x.sigma;
    };
    try {
      boost::uintmax_t iters = 60;
      const auto r = boost::math::tools::toms748_solve(f, sa, sb, a.sigma, b.sigma,
                                                       boost::math::tools::eps_tolerance<double>(45), iters);
      add(std::abs(f(r.first)) <= std::abs(f(r.second)) ? r.first : r.second, false);
    } catch (const NumericalError&) {
    }
  }
  // Orthogonal returns sitting on a sample, where the bracket test can miss
  // them (exits that jump on either side).
  for (int i = 0; i < scan; ++i) {
    const double si = L * i / scan;
    if (!samples[i].ok || std::abs(samples[i].sigma) > 1e-10) continue;
    const bool near = std::any_of(out.begin(), out.end(), [&](const FreeBoundaryGeodesic& f) {
      return std::abs(wrap_centered(f.s1 - si, L)) <= 2.0 * L / scan ||
             std::abs(wrap_centered(f.s2 - si, L)) <= 2.0 * L / scan;
    });
    if (!near) add(si, false);
  }
  std::sort(out.begin(), out.end(),
            [](const FreeBoundaryGeodesic& x, const FreeBoundaryGeodesic& y) { return x.length < y.length; });
  return out;
}

StarCheck property_star_check(const BoundaryGeodesics& g, int scan) {
  StarCheck out;
  out.geodesics = find_free_boundary_geodesics(g, scan);
  for (std::size_t i = 0; i < out.geodesics.size(); ++i) {
    out.indices.push_back(free_boundary_index(g.curve(), out.geodesics[i].path));
    if (out.indices.back().index < 1) {
      out.holds = false;
      out.witnesses.push_back(static_cast<int>(i));
    }
  }
  return out;
}

WidthRealization width_realization(const BoundaryGeodesics& g, double S, const CriticalityReport& width_report,
                                   const StarCheck& star, double tol) {
  WidthRealization out;
  const BoundaryCurve& c = g.curve();
  const double L = c.length();
  const bool at_level = std::abs(width_report.distance - S) <= tol;
  for (const Connector& k : width_report.connectors) {
    if (!at_level || k.boundary_arc || std::abs(k.sigma_p) > 1e-4 || std::abs(k.sigma_q) > 1e-4) continue;
    const double s1 = width_report.pair.s1;
    const double s2 = width_report.pair.is_singleton ? s1 : width_report.pair.s2;
    const GeodesicPath path = g.path(s1, s2, k);
    if (std::abs(path.sigma_p) > 1e-4 || std::abs(path.sigma_q) > 1e-4) continue;
    out.minimizer_index = free_boundary_index(c, path);
    out.index_one_minimizer = out.minimizer_index->index == 1;
    break;
  }
  if (!out.minimizer_index) {
    for (std::size_t i = 0; i < star.geodesics.size(); ++i) {
      const FreeBoundaryGeodesic& f = star.geodesics[i];
      if (std::abs(f.length - S) > tol) continue;
      if (g.distance(f.s1, f.s2) < f.length - 1e-6 * L) continue;  // not minimizing
      out.minimizer_index = star.indices[i];
      out.index_one_minimizer = star.indices[i].index == 1;
      break;
    }
  }
  out.stationary_pair = at_level && width_report.simultaneously_stationary;
  return out;
}

}  // namespace widthlab
