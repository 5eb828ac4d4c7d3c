#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "widthlab/config.hpp"
#include "widthlab/geodesic.hpp"
#include "widthlab/pairspace.hpp"

namespace widthlab {

// Shortest geodesic between two nearby working points, by shooting on [0, 1].
struct LocalGeodesic {
  double length = 0.0;
  Vec2 mid = Vec2::Zero();
  Vec2 start_velocity = Vec2::Zero();  // parameter speed, not unit
  Vec2 end_velocity = Vec2::Zero();
};
LocalGeodesic local_geodesic(const SurfaceChart& s, const Vec2& a, const Vec2& b, int steps = 24);

struct BirkhoffResult {
  enum class Outcome { kPoint, kFreeBoundaryGeodesic };
  Outcome outcome = Outcome::kPoint;
  std::vector<double> trace;  // broken-geodesic length after each iteration, trace[0] the start
  std::vector<Vec2> nodes;    // final working vertices, endpoints on the curve
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<GeodesicPath> geodesic;  // the limit, reshot from its first endpoint
  bool self_intersecting = false;
  int iterations = 0;
};

// Free-boundary Birkhoff shortening of a broken geodesic through `path`
// (working points, endpoints on the curve), resampled to `segments` pieces.
// Each iteration moves the odd and then the even interior vertices to the
// midpoints of their neighbours and slides both endpoints along the curve to
// the point nearest their neighbour.  Throws NumericalError after max_iters.
BirkhoffResult birkhoff_shorten(const BoundaryCurve& c, const std::vector<Vec2>& path, int segments = 8,
                                int max_iters = 20000, double step_scale = 1e-3);

// Start path from the options: the chart segment between the two endpoints,
// its thirds pushed to opposite sides by `bend` (a Z shape).
std::vector<Vec2> birkhoff_start_path(const BoundaryCurve& c, const BirkhoffOptions& o);

struct IndexResult {
  std::vector<double> eigenvalues;  // lowest first
  int index = 0;
  int nullity = 0;
  double eps = 0.0;
  double length = 0.0;
  double A_start = 0.0;
  double A_end = 0.0;
  // Q(1, 1) / |1|^2.
  double rayleigh_constant = 0.0;
};

// Lowest `count` eigenvalues of -u'' - K u = lambda u on [0, a] with
// -u'(0) = A0 u(0) and u'(a) = A1 u(a), on nodes + 1 finite-difference nodes.
std::vector<double> robin_spectrum(const std::function<double(double)>& K, double a, double A0, double A1, int nodes,
                                   int count = 6);

// Free boundary index from the spectrum above, Richardson-extrapolated from
// `nodes` and 2 * nodes.  Throws invalid_argument unless |sigma| <= 1e-4 at both ends.
IndexResult free_boundary_index(const BoundaryCurve& c, const GeodesicPath& g, int nodes = 400);

struct FreeBoundaryGeodesic {
  double s1 = 0.0;
  double s2 = 0.0;
  double length = 0.0;
  Connector connector;
  GeodesicPath path;
  // The curve is rotationally symmetric and every normal ray returns
  // orthogonally; this entry stands for the whole family.
  bool family = false;
};

// Returns of inward normal rays from `scan` boundary points whose exit is
// orthogonal, polished in the start point and deduplicated by endpoint pair.
std::vector<FreeBoundaryGeodesic> find_free_boundary_geodesics(const BoundaryGeodesics& g, int scan);

struct StarCheck {
  bool holds = true;
  std::vector<FreeBoundaryGeodesic> geodesics;
  std::vector<IndexResult> indices;
  std::vector<int> witnesses;  // positions of stable geodesics
};

StarCheck property_star_check(const BoundaryGeodesics& g, int scan);

// What realizes the width level S: a free-boundary minimizer of index one
// (from the width pair's report, or a minimizing geodesic of the scan at
// length S), or a simultaneously stationary pair at level S.  Lengths are
// compared to within tol.
struct WidthRealization {
  bool index_one_minimizer = false;
  bool stationary_pair = false;
  std::optional<IndexResult> minimizer_index;  // of the free-boundary minimizer, when there is one
  bool holds() const { return index_one_minimizer || stationary_pair; }
};

WidthRealization width_realization(const BoundaryGeodesics& g, double S, const CriticalityReport& width_report,
                                   const StarCheck& star, double tol);

}  // namespace widthlab
