#pragma once

#include <optional>
#include <string>
#include <vector>

#include "widthlab/geodesic.hpp"

namespace widthlab {

// Unordered pair of boundary points, stored with 0 <= s1 <= s2 < L.
struct PairPoint {
  double s1 = 0.0;
  double s2 = 0.0;
  bool is_singleton = false;

  static PairPoint make(double a, double b, double length);
  bool same_as(const PairPoint& o, double length) const;
};

// Largest endpoint offset along the curve under the better matching.
double pair_offset(const PairPoint& a, const PairPoint& b, double length);

struct Signature {
  double p = 0.0;
  double q = 0.0;
  Vec2 vec() const { return {p, q}; }
};

Signature signature(const BoundaryCurve& c, const GeodesicPath& g);
inline Signature signature(const Connector& k) { return {k.sigma_p, k.sigma_q}; }

// Minimum-norm point of the convex hull of finitely many planar points,
// with barycentric weights on at most three of them.
struct HullPoint {
  Vec2 point = Vec2::Zero();
  std::vector<std::pair<int, double>> weights;  // (index, lambda)
};
HullPoint min_norm_point(const std::vector<Vec2>& pts);

// c > 0 with a = -c b componentwise within tol, if any.
std::optional<double> stationary_constant(const Signature& a, const Signature& b, double tol);

enum class Verdict { kRegular, kCritical };
std::string to_string(Verdict v);

struct CriticalityReport {
  PairPoint pair;
  double distance = 0.0;
  std::vector<Connector> connectors;     // minimizers, shortest first
  std::vector<GeodesicPath> minimizers;  // node lists, when materialized
  Verdict verdict = Verdict::kRegular;
  // Regular: v1 sigma_p + v2 sigma_q <= -margin for every minimizer.
  Vec2 direction = Vec2::Zero();
  double margin = 0.0;
  // Critical: convex weights on minimizers whose signatures average to zero.
  std::vector<std::pair<int, double>> witness;
  bool free_boundary = false;
  bool simultaneously_stationary = false;
  double stationary_c = 0.0;
  bool boundary_arc_pair = false;
  bool trivial = false;
  std::vector<std::string> notes;
};

// Decision of the separation test on a fixed set of minimizers.
CriticalityReport classify_connectors(const PairPoint& pp, std::vector<Connector> ks);
CriticalityReport classify_pair(const BoundaryGeodesics& g, const PairPoint& pp, bool materialize = true);

struct Extremal {
  Connector plus;   // smallest sigma_p
  Connector minus;  // largest sigma_p
};
Extremal extremal_geodesics(const BoundaryGeodesics& g, const PairPoint& pp);

// Newton refinement of a critical pair near pp, following the minimizing
// branches found there.  Returns nothing when the iteration does not converge.
std::optional<PairPoint> polish_critical_pair(const BoundaryGeodesics& g, const PairPoint& pp);

struct CriticalComponent {
  std::vector<std::pair<int, int>> cells;  // lower-left grid corners, i < j
  PairPoint location;
  CriticalityReport report;
  double d_min = 0.0;
  double d_max = 0.0;
  bool polished = false;
};

struct ScanResult {
  int grid = 0;
  double length = 0.0;
  std::vector<CriticalComponent> components;
  int flagged_cells = 0;
};

ScanResult scan_critical_pairs(const BoundaryGeodesics& g, int grid);
ScanResult scan_critical_pairs(const BoundaryGeodesics& g, const PairField& field);

}  // namespace widthlab
