#include "widthlab/planar.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <stdexcept>

namespace widthlab {

namespace {

void require_plane(const BoundaryCurve& c) {
  if (!c.plane()) throw std::invalid_argument("planar width needs a euclidean-plane fixture");
}

// Largest value of the support function h(s) = <x(s), u>, refined on the exact
// curve around the best sample.
double support(const BoundaryCurve& c, const Vec2& u) {
  const auto& x = c.working_samples();
  const int n = c.size();
  int best = 0;
  double hb = x[0].dot(u);
  for (int i = 1; i < n; ++i) {
    const double h = x[i].dot(u);
    if (h > hb) {
      hb = h;
      best = i;
    }
  }
  const double ds = c.spacing();
  const double s0 = best * ds;
  auto f = [&](double s) { return -c.working_point(s).dot(u); };
  const auto r = boost::math::tools::brent_find_minima(f, s0 - ds, s0 + ds, 40);
  return std::max(hb, -r.second);
}

}  // namespace

double directional_width(const BoundaryCurve& c, double theta) {
  require_plane(c);
  const Vec2 u(std::cos(theta), std::sin(theta));
  return support(c, u) + support(c, -u);
}

DirectionalWidthTable width_table(const BoundaryCurve& c, int m) {
  require_plane(c);
  if (m < 8 || m % 2) throw std::invalid_argument("width table needs an even number of angles >= 8");
  DirectionalWidthTable t;
  t.thetas.resize(m);
  t.w.resize(m);
  // w(theta + pi) = w(theta): compute half the table and mirror it.
  for (int i = 0; i < m / 2; ++i) {
    t.thetas[i] = 2.0 * kPi * i / m;
    t.thetas[i + m / 2] = 2.0 * kPi * (i + m / 2) / m;
    t.w[i] = t.w[i + m / 2] = directional_width(c, t.thetas[i]);
  }
  const auto [lo, hi] = std::minmax_element(t.w.begin(), t.w.end());
  t.w_min = *lo;
  t.w_max = *hi;
  t.argmin = t.thetas[lo - t.w.begin()];
  t.argmax = t.thetas[hi - t.w.begin()];
  return t;
}

PlanarWidth planar_width_diameter(const BoundaryCurve& c, int m) { return planar_width_diameter(c, width_table(c, m)); }

PlanarWidth planar_width_diameter(const BoundaryCurve& c, const DirectionalWidthTable& table) {
  const double dt = 2.0 * kPi / static_cast<double>(table.thetas.size());
  PlanarWidth out;
  const auto lo = boost::math::tools::brent_find_minima([&](double t) { return directional_width(c, t); },
                                                        table.argmin - dt, table.argmin + dt, 40);
  out.w = std::min(lo.second, table.w_min);
  out.argmin = lo.second <= table.w_min ? wrap(lo.first, 2.0 * kPi) : table.argmin;
  const auto hi = boost::math::tools::brent_find_minima([&](double t) { return -directional_width(c, t); },
                                                        table.argmax - dt, table.argmax + dt, 40);
  out.diam = std::max(-hi.second, table.w_max);
  out.argmax = -hi.second >= table.w_max ? wrap(hi.first, 2.0 * kPi) : table.argmax;
  return out;
}

CauchyCrofton cauchy_crofton_check(const BoundaryCurve& c, int m) {
  const auto table = width_table(c, m);
  return cauchy_crofton_check(c, table, planar_width_diameter(c, table).w);
}

CauchyCrofton cauchy_crofton_check(const BoundaryCurve& c, const DirectionalWidthTable& table, double w) {
  require_plane(c);
  const auto& A = c.curvature();
  if (*std::min_element(A.begin(), A.end()) < -1e-8)
    throw std::invalid_argument("Cauchy-Crofton check needs a convex curve");
  CauchyCrofton out;
  // Trapezoid rule on the periodic table.
  for (double x : table.w) out.integral += x;
  out.integral *= 2.0 * kPi / static_cast<double>(table.w.size());
  out.two_L = 2.0 * c.length();
  out.error = std::abs(out.integral - out.two_L);
  out.ratio = w / c.length();
  out.ratio_ok = out.ratio <= 1.0 / kPi + 1e-9;
  out.equality = std::abs(out.ratio - 1.0 / kPi) <= 1e-4;
  return out;
}

}  // namespace widthlab
