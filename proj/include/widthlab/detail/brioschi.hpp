#pragma once

#include <Eigen/Dense>

namespace widthlab {

template <typename MetricFn>
double brioschi_curvature(const MetricFn& metric, const Vec2& x, double h) {
  const Vec2 du(h, 0.0), dv(0.0, h);
  const Mat2 g = metric(x);
  const Mat2 gu_p = metric(x + du), gu_m = metric(x - du);
  const Mat2 gv_p = metric(x + dv), gv_m = metric(x - dv);
  const Mat2 g_pp = metric(x + du + dv), g_pm = metric(x + du - dv);
  const Mat2 g_mp = metric(x - du + dv), g_mm = metric(x - du - dv);

  const double E = g(0, 0), F = g(0, 1), G = g(1, 1);
  const Mat2 gu = (gu_p - gu_m) / (2 * h), gv = (gv_p - gv_m) / (2 * h);
  const double Eu = gu(0, 0), Fu = gu(0, 1), Gu = gu(1, 1);
  const double Ev = gv(0, 0), Fv = gv(0, 1), Gv = gv(1, 1);
  const double Evv = (gv_p(0, 0) - 2 * E + gv_m(0, 0)) / (h * h);
  const double Guu = (gu_p(1, 1) - 2 * G + gu_m(1, 1)) / (h * h);
  const double Fuv = (g_pp(0, 1) - g_pm(0, 1) - g_mp(0, 1) + g_mm(0, 1)) / (4 * h * h);

  Eigen::Matrix3d m1, m2;
  m1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
        Fv - 0.5 * Gu, E, F,
        0.5 * Gv, F, G;
  m2 << 0.0, 0.5 * Ev, 0.5 * Gu,
        0.5 * Ev, E, F,
        0.5 * Gu, F, G;
  const double det = E * G - F * F;
  return (m1.determinant() - m2.determinant()) / (det * det);
}

}  // namespace widthlab
