#include "widthlab/pairspace.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace widthlab {

namespace {

constexpr double kHullTol = 1e-8;
constexpr double kTagTol = 1e-4;

double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

// Metric distance from a working point to the curve point at arclength s,
// ignoring whole deck translations.
double offset_from_curve(const BoundaryCurve& c, const Vec2& x, double s) {
  Vec2 d = x - c.frame_at(s).x;
  const Vec2& deck = c.deck();
  if (deck.squaredNorm() > 0) d -= std::round(d.dot(deck) / deck.squaredNorm()) * deck;
  return c.surface().norm(x, d);
}

std::vector<int> hull_indices(const std::vector<Vec2>& pts) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a][0] < pts[b][0] || (pts[a][0] == pts[b][0] && pts[a][1] < pts[b][1]);
  });
  if (idx.size() < 3) return idx;
  std::vector<int> h(2 * idx.size());
  std::size_t k = 0;
  for (int i : idx) {
    while (k >= 2 && cross(pts[h[k - 1]] - pts[h[k - 2]], pts[i] - pts[h[k - 2]]) <= 0) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lo = k + 1; t-- > 0;) {
    const int i = idx[t];
    while (k >= lo && cross(pts[h[k - 1]] - pts[h[k - 2]], pts[i] - pts[h[k - 2]]) <= 0) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

HullPoint closest_on_segment(const std::vector<Vec2>& pts, int a, int b) {
  const Vec2 e = pts[b] - pts[a];
  const double ee = e.squaredNorm();
  const double t = ee > 0 ? std::clamp(-pts[a].dot(e) / ee, 0.0, 1.0) : 0.0;
  HullPoint hp;
  hp.point = pts[a] + t * e;
  if (t < 1) hp.weights.emplace_back(a, 1 - t);
  if (t > 0) hp.weights.emplace_back(b, t);
  return hp;
}

double hull_norm(const std::vector<Connector>& ks) {
  if (ks.empty()) return std::numeric_limits<double>::infinity();
  std::vector<Vec2> pts;
  pts.reserve(ks.size());
  for (const Connector& k : ks) pts.emplace_back(k.sigma_p, k.sigma_q);
  return min_norm_point(pts).point.norm();
}

Vec2 sig(const Connector& k) { return {k.sigma_p, k.sigma_q}; }

}  // namespace

PairPoint PairPoint::make(double a, double b, double length) {
  PairPoint p;
  a = wrap(a, length);
  b = wrap(b, length);
  p.s1 = std::min(a, b);
  p.s2 = std::max(a, b);
  p.is_singleton = intrinsic_distance(length, a, b) <= 1e-9 * length;
  if (p.is_singleton) p.s2 = p.s1;
  return p;
}

bool PairPoint::same_as(const PairPoint& o, double length) const {
  if (is_singleton || o.is_singleton) return is_singleton && o.is_singleton;
  return pair_offset(*this, o, length) <= 1e-9 * length;
}

double pair_offset(const PairPoint& a, const PairPoint& b, double length) {
  const double direct = std::max(intrinsic_distance(length, a.s1, b.s1), intrinsic_distance(length, a.s2, b.s2));
  const double swapped = std::max(intrinsic_distance(length, a.s1, b.s2), intrinsic_distance(length, a.s2, b.s1));
  return std::min(direct, swapped);
}

Signature signature(const BoundaryCurve& c, const GeodesicPath& g) {
  if (g.working.empty()) throw NumericalError("empty geodesic");
  const double tol = 1e-6 * c.length();
  const Vec2& a = g.working.front();
  const Vec2& b = g.working.back();
  const double sp = c.project(a), sq = c.project(b);
  if (offset_from_curve(c, a, sp) > tol || offset_from_curve(c, b, sq) > tol)
    throw NumericalError("geodesic endpoint off the curve");
  const SurfaceChart& s = c.surface();
  const Frame fp = c.frame_at(sp), fq = c.frame_at(sq);
  return {-s.dot(a, g.start_velocity, fp.t), s.dot(b, g.end_velocity, fq.t)};
}

HullPoint min_norm_point(const std::vector<Vec2>& pts) {
  if (pts.empty()) throw std::invalid_argument("min_norm_point of an empty set");
  const std::vector<int> h = hull_indices(pts);
  if (h.size() == 1) return {pts[h[0]], {{h[0], 1.0}}};
  HullPoint best;
  double best_norm = std::numeric_limits<double>::infinity();
  const std::size_t edges = h.size() == 2 ? 1 : h.size();
  for (std::size_t i = 0; i < edges; ++i) {
    HullPoint hp = closest_on_segment(pts, h[i], h[(i + 1) % h.size()]);
    if (hp.point.norm() < best_norm) {
      best_norm = hp.point.norm();
      best = std::move(hp);
    }
  }
  if (h.size() < 3) return best;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Vec2& p = pts[h[i]];
    const Vec2& q = pts[h[(i + 1) % h.size()]];
    if (cross(q - p, -p) < 0) return best;
  }
  // The origin is interior: barycentric weights in a fan triangle, unless a
  // thin hull makes the boundary point the better witness.
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    const Vec2 &A = pts[h[0]], &B = pts[h[i]], &C = pts[h[i + 1]];
    const double det = cross(B - A, C - A);
    if (det <= 0) continue;
    const double lb = cross(-A, C - A) / det, lc = cross(B - A, -A) / det;
    const double la = 1 - lb - lc;
    if (la < -1e-12 || lb < -1e-12 || lc < -1e-12) continue;
    const double a = std::max(la, 0.0), b = std::max(lb, 0.0), c = std::max(lc, 0.0);
    const double sum = a + b + c;
    HullPoint hp;
    hp.weights = {{h[0], a / sum}, {h[i], b / sum}, {h[i + 1], c / sum}};
    hp.weights.erase(
        std::remove_if(hp.weights.begin(), hp.weights.end(), [](const auto& w) { return w.second == 0.0; }),
        hp.weights.end());
    hp.point = (a * A + b * B + c * C) / sum;
    if (hp.point.norm() < best_norm) return hp;
    break;
  }
  return best;
}

std::string to_string(Verdict v) { return v == Verdict::kCritical ? "critical" : "regular"; }

std::optional<double> stationary_constant(const Signature& a, const Signature& b, double tol) {
  const Vec2 x = a.vec(), y = b.vec();
  if (y.squaredNorm() <= tol * tol) return std::nullopt;
  const double c = -x.dot(y) / y.squaredNorm();
  if (c <= 0) return std::nullopt;
  if ((x + c * y).cwiseAbs().maxCoeff() > tol) return std::nullopt;
  return c;
}

CriticalityReport classify_connectors(const PairPoint& pp, std::vector<Connector> ks) {
  CriticalityReport r;
  r.pair = pp;
  if (pp.is_singleton) {
    r.verdict = Verdict::kCritical;
    r.trivial = true;
    r.notes.push_back("singleton pair");
    return r;
  }
  if (ks.empty()) throw NumericalError("no minimizer between distinct boundary points");
  std::stable_sort(ks.begin(), ks.end(), [](const Connector& a, const Connector& b) { return a.length < b.length; });
  r.connectors = std::move(ks);
  r.distance = r.connectors.front().length;
  std::vector<Vec2> pts;
  for (const Connector& k : r.connectors) pts.push_back(sig(k));
  const HullPoint hp = min_norm_point(pts);
  const double norm = hp.point.norm();
  if (norm <= kHullTol) {
    r.verdict = Verdict::kCritical;
    r.witness = hp.weights;
  } else {
    r.verdict = Verdict::kRegular;
    r.direction = -hp.point / norm;
    r.margin = std::numeric_limits<double>::infinity();
    for (const Vec2& p : pts) r.margin = std::min(r.margin, -r.direction.dot(p));
  }
  for (const Vec2& p : pts)
    if (p.cwiseAbs().maxCoeff() <= kTagTol) r.free_boundary = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.connectors.size(); ++i) {
    for (std::size_t j = i + 1; j < r.connectors.size(); ++j) {
      const Signature a = signature(r.connectors[i]), b = signature(r.connectors[j]);
      const auto c = stationary_constant(a, b, kTagTol);
      if (!c) continue;
      const double res = (a.vec() + *c * b.vec()).cwiseAbs().maxCoeff();
      if (res < best) {
        best = res;
        r.simultaneously_stationary = true;
        r.stationary_c = *c;
      }
    }
  }
  const auto [lo, hi] = std::minmax_element(r.connectors.begin(), r.connectors.end(),
                                            [](const Connector& a, const Connector& b) { return a.sigma_p < b.sigma_p; });
  r.boundary_arc_pair = lo != hi && lo->boundary_arc && hi->boundary_arc;
  return r;
}

CriticalityReport classify_pair(const BoundaryGeodesics& g, const PairPoint& pp, bool materialize) {
  if (pp.is_singleton) return classify_connectors(pp, {});
  CriticalityReport r = classify_connectors(pp, g.minimizers(pp.s1, pp.s2));
  if (materialize)
    for (const Connector& k : r.connectors) r.minimizers.push_back(g.path(pp.s1, pp.s2, k));
  return r;
}

Extremal extremal_geodesics(const BoundaryGeodesics& g, const PairPoint& pp) {
  if (pp.is_singleton) throw std::invalid_argument("extremal geodesics of a singleton pair");
  const auto ks = g.minimizers(pp.s1, pp.s2);
  const auto [lo, hi] = std::minmax_element(
      ks.begin(), ks.end(), [](const Connector& a, const Connector& b) { return a.sigma_p < b.sigma_p; });
  return {*lo, *hi};
}

namespace {

// Newton iteration on a 2D residual with a finite-difference Jacobian and
// backtracking on |F|.
template <class F>
std::optional<Vec2> newton2(const F& f, Vec2 x, double h, double max_step, double tol) {
  auto fx = f(x);
  if (!fx) return std::nullopt;
  for (int it = 0; it < 25; ++it) {
    if (fx->norm() <= tol) return x;
    Mat2 J;
    for (int k = 0; k < 2; ++k) {
      Vec2 e = Vec2::Zero();
      e[k] = h;
      const auto fp = f(x + e), fm = f(x - e);
      if (!fp || !fm) return std::nullopt;
      J.col(k) = (*fp - *fm) / (2 * h);
    }
    if (std::abs(J.determinant()) < 1e-14 * std::max(1.0, J.squaredNorm())) return std::nullopt;
    Vec2 step = -J.partialPivLu().solve(*fx);
    if (step.norm() > max_step) step *= max_step / step.norm();
    bool moved = false;
    for (int b = 0; b < 8; ++b) {
      const auto fn = f(x + step);
      if (fn && fn->norm() < fx->norm()) {
        x += step;
        fx = fn;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (fx->norm() <= tol) return x;
  return std::nullopt;
}

}  // namespace

std::optional<PairPoint> polish_critical_pair(const BoundaryGeodesics& g, const PairPoint& pp) {
  if (pp.is_singleton) return std::nullopt;
  const BoundaryCurve& c = g.curve();
  const double L = c.length();
  const double h = 1e-5 * L, max_step = 0.02 * L;
  const Vec2 x0(pp.s1, pp.s2);
  const auto all = g.connectors(pp.s1, pp.s2);
  if (all.empty()) return std::nullopt;
  std::vector<Connector> near;
  for (const Connector& k : all)
    if (!k.boundary_arc && k.length <= all.front().length * 1.02) near.push_back(k);
  if (near.empty()) return std::nullopt;

  auto settle = [&](const Vec2& x) -> std::optional<PairPoint> {
    const PairPoint q = PairPoint::make(x[0], x[1], L);
    if (q.is_singleton) return std::nullopt;
    if (classify_pair(g, q, false).verdict != Verdict::kCritical) return std::nullopt;
    return q;
  };

  // A single branch with vanishing signature.
  for (const Connector& k : near) {
    double alpha = k.alpha;
    auto f = [&](const Vec2& x) -> std::optional<Vec2> {
      const auto t = g.track(x[0], x[1], alpha);
      if (!t) return std::nullopt;
      alpha = t->alpha;
      return sig(*t);
    };
    if (auto x = newton2(f, x0, h, max_step, 1e-11)) {
      if (auto q = settle(*x)) return q;
    }
  }
  // Two branches of equal length with opposite signatures.
  if (near.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(near.begin(), near.end(),
                                              [](const Connector& a, const Connector& b) { return a.sigma_p < b.sigma_p; });
    double a1 = lo->alpha, a2 = hi->alpha;
    auto f = [&](const Vec2& x) -> std::optional<Vec2> {
      const auto t1 = g.track(x[0], x[1], a1), t2 = g.track(x[0], x[1], a2);
      if (!t1 || !t2 || std::abs(t1->alpha - t2->alpha) < 1e-6) return std::nullopt;
      a1 = t1->alpha;
      a2 = t2->alpha;
      return Vec2((t1->length - t2->length) / L, cross(sig(*t1), sig(*t2)));
    };
    if (auto x = newton2(f, x0, h, max_step, 1e-11)) {
      if (auto q = settle(*x)) return q;
    }
  }
  return std::nullopt;
}

ScanResult scan_critical_pairs(const BoundaryGeodesics& g, int grid) {
  if (grid < 32) throw std::invalid_argument("scan grid must be at least 32");
  return scan_critical_pairs(g, g.field(grid));
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ScanResult scan_critical_pairs(const BoundaryGeodesics& g, const PairField& field) {
  const int n = field.n;
  const double L = field.length;
  const BoundaryCurve& c = g.curve();
  ScanResult out;
  out.grid = n;
  out.length = L;
  auto mod = [n](int i) { return ((i % n) + n) % n; };
  auto cell_norm = [&](int i, int j) {
    std::vector<Connector> ks;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const auto& m = field.minimizers_at(i + a, j + b);
        ks.insert(ks.end(), m.begin(), m.end());
      }
    return hull_norm(ks);
  };
  auto near_diagonal = [&](int i, int j) {
    const int d = mod(j - i);
    return d == 0 || d == 1 || d == n - 1;
  };

  std::vector<char> flagged(static_cast<std::size_t>(n) * n, 0);
  std::vector<double> norm(static_cast<std::size_t>(n) * n, std::numeric_limits<double>::infinity());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (near_diagonal(i, j)) continue;
      const std::size_t id = field.index(i, j);
      norm[id] = cell_norm(i, j);
      if (norm[id] <= kHullTol) {
        flagged[id] = 1;
        ++out.flagged_cells;
      }
    }
  UnionFind uf(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int id = static_cast<int>(field.index(i, j));
      if (!flagged[id]) continue;
      uf.join(id, static_cast<int>(field.index(j, i)));
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int nb = static_cast<int>(field.index(i + di, j + dj));
          if (flagged[nb]) uf.join(id, nb);
        }
    }
  std::map<int, std::vector<std::pair<int, int>>> groups;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int id = static_cast<int>(field.index(i, j));
      const int mirror = static_cast<int>(field.index(j, i));
      if (flagged[id]) groups[uf.find(id)].emplace_back(i, j);
      else if (flagged[mirror]) groups[uf.find(mirror)].emplace_back(i, j);
    }

  const double cell = L / n;
  for (auto& [root, cells] : groups) {
    CriticalComponent comp;
    comp.cells = cells;
    comp.d_min = std::numeric_limits<double>::infinity();
    comp.d_max = 0.0;
    std::pair<int, int> rep = cells.front();
    double rep_norm = std::numeric_limits<double>::infinity();
    for (const auto& [i, j] : cells) {
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double d = field.at(i + a, j + b);
          comp.d_min = std::min(comp.d_min, d);
          comp.d_max = std::max(comp.d_max, d);
        }
      if (norm[field.index(i, j)] < rep_norm) {
        rep_norm = norm[field.index(i, j)];
        rep = {i, j};
      }
    }
    // An exactly critical grid corner is kept as is.
    std::optional<PairPoint> corner;
    for (int a = 0; a < 2 && !corner; ++a)
      for (int b = 0; b < 2 && !corner; ++b) {
        const int i = rep.first + a, j = rep.second + b;
        if (hull_norm(field.minimizers_at(i, j)) <= kHullTol) corner = PairPoint::make(field.s(mod(i)), field.s(mod(j)), L);
      }
    if (corner) {
      comp.location = *corner;
    } else {
      // Bisection on the corner-hull test.
      double x = field.s(rep.first), y = field.s(rep.second), h = cell;
      auto box_norm = [&](double bx, double by, double bh) {
        std::vector<Connector> ks;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const auto m = g.minimizers(bx + a * bh, by + b * bh);
            ks.insert(ks.end(), m.begin(), m.end());
          }
        return hull_norm(ks);
      };
      while (h > 1e-3 * L) {
        h *= 0.5;
        double best = std::numeric_limits<double>::infinity();
        double nx = x, ny = y;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const double v = box_norm(x + a * h, y + b * h, h);
            if (v < best) {
              best = v;
              nx = x + a * h;
              ny = y + b * h;
            }
          }
        x = nx;
        y = ny;
      }
      comp.location = PairPoint::make(x + 0.5 * h, y + 0.5 * h, L);
      if (!c.rotationally_symmetric()) {
        if (auto p = polish_critical_pair(g, comp.location)) {
          if (pair_offset(*p, comp.location, L) <= 2 * cell) {
            comp.location = *p;
            comp.polished = true;
          }
        }
      }
    }
    comp.report = classify_pair(g, comp.location, false);
    out.components.push_back(std::move(comp));
  }
  return out;
}

}  // namespace widthlab
