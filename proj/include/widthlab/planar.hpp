#pragma once

#include <vector>

#include "widthlab/curve.hpp"

namespace widthlab {

// Extent of the curve's projection onto the direction (cos theta, sin theta):
// the distance between the two support lines orthogonal to it.  Plane charts only.
double directional_width(const BoundaryCurve& c, double theta);

struct DirectionalWidthTable {
  std::vector<double> thetas;  // uniform on [0, 2 pi)
  std::vector<double> w;
  double w_min = 0.0;
  double w_max = 0.0;
  double argmin = 0.0;
  double argmax = 0.0;
};

DirectionalWidthTable width_table(const BoundaryCurve& c, int m = 4096);

struct PlanarWidth {
  double w = 0.0;
  double diam = 0.0;
  double argmin = 0.0;
  double argmax = 0.0;
};

// Min and max of the width table, polished by golden-section search.
PlanarWidth planar_width_diameter(const BoundaryCurve& c, int m = 4096);
PlanarWidth planar_width_diameter(const BoundaryCurve& c, const DirectionalWidthTable& table);

struct CauchyCrofton {
  double integral = 0.0;  // of w over [0, 2 pi)
  double two_L = 0.0;
  double error = 0.0;     // |integral - 2L|
  double ratio = 0.0;     // w / L
  bool ratio_ok = false;  // ratio <= 1/pi + 1e-9
  bool equality = false;  // |ratio - 1/pi| <= 1e-4
};

// Requires a convex plane curve (geodesic curvature >= -1e-8).
CauchyCrofton cauchy_crofton_check(const BoundaryCurve& c, int m = 4096);
CauchyCrofton cauchy_crofton_check(const BoundaryCurve& c, const DirectionalWidthTable& table, double w);

}  // namespace widthlab
