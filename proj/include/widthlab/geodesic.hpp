#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "widthlab/curve.hpp"
#include "widthlab/surface.hpp"

namespace widthlab {

// A unit-speed geodesic segment.  Endpoint arclengths and the conormal
// signature are set only when both ends lie on a boundary curve.
struct GeodesicPath {
  enum class Stop { kLength, kBoundary, kDomain };

  std::vector<SurfacePoint> points;
  std::vector<Vec2> working;
  std::vector<Vec2> velocities;  // working chart, one per node
  double length = 0.0;
  double step = 0.0;  // parameter spacing of the nodes (the last one may be shorter)
  double start_s = std::numeric_limits<double>::quiet_NaN();
  double end_s = std::numeric_limits<double>::quiet_NaN();
  TangentVector start_dir;
  TangentVector end_dir;
  Vec2 start_velocity = Vec2::Zero();  // working chart
  Vec2 end_velocity = Vec2::Zero();
  double sigma_p = std::numeric_limits<double>::quiet_NaN();
  double sigma_q = std::numeric_limits<double>::quiet_NaN();
  // Shooting angle: from the inward normal toward T(p) for boundary paths,
  // from the first orthonormal chart direction otherwise.
  double angle = 0.0;
  bool boundary_arc = false;
  Stop stop = Stop::kLength;
};

// Fixed geodesic step: max_len / ceil(max_len / h0), h0 = scale * working diameter.
double geodesic_step(const SurfaceChart& s, double max_len, double scale = 1e-3);

GeodesicPath shoot(const SurfaceChart& s, SurfacePoint p, const TangentVector& dir, double max_len,
                   double step_scale = 1e-3);
// Same, in working coordinates, optionally stopping where the ray leaves the region bounded by `stop`.
GeodesicPath shoot_working(const SurfaceChart& s, const Vec2& x, const Vec2& unit_velocity, double max_len,
                           const BoundaryCurve* stop = nullptr, double step_scale = 1e-3);

// All geodesics from p to q found by a 720-ray fan, deduplicated and sorted by length.
std::vector<GeodesicPath> connect(const SurfaceChart& s, SurfacePoint p, SurfacePoint q, double step_scale = 1e-3);

struct Distance {
  double d = 0.0;
  std::vector<GeodesicPath> minimizers;
};

Distance distance(const SurfaceChart& s, SurfacePoint p, SurfacePoint q, double step_scale = 1e-3,
                  double len_window = 1e-4);

// A boundary-to-boundary geodesic without its node list.
struct Connector {
  double length = 0.0;
  double alpha = 0.0;  // angle from the inward normal at p toward T(p)
  double sigma_p = 0.0;
  double sigma_q = 0.0;
  bool boundary_arc = false;

  // The same geodesic traversed from q to p.
  Connector reversed() const;
};

// Distances between the grid points s_i = i L / n, with every minimizer.
struct PairField {
  int n = 0;
  double length = 0.0;
  std::vector<double> d;
  std::vector<std::vector<Connector>> minimizers;

  double s(int i) const { return length * i / n; }
  double at(int i, int j) const { return d[index(i, j)]; }
  const std::vector<Connector>& minimizers_at(int i, int j) const { return minimizers[index(i, j)]; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(((i % n) + n) % n) * n + static_cast<std::size_t>(((j % n) + n) % n);
  }
};

// Geodesics of the region bounded by a curve, between boundary points.
//
// From each base point a fan of rays is shot into the region and each exit
// point recorded; connectors to a target are the fan brackets around it,
// polished by a safeguarded secant in the shooting angle.  Boundary arcs join
// the list when the curve is geodesic along them.  Plane charts use straight
// segments.
class BoundaryGeodesics {
 public:
  static constexpr int kFanSize = 720;

  explicit BoundaryGeodesics(const BoundaryCurve& c, bool totally_convex = true, double step_scale = 1e-3,
                             double len_window = 1e-4);

  const BoundaryCurve& curve() const { return curve_; }
  double step_scale() const { return step_scale_; }
  double len_window() const { return len_window_; }
  double max_len() const { return max_len_; }

  std::vector<Connector> connectors(double s1, double s2) const;
  std::vector<Connector> minimizers(double s1, double s2) const;
  double distance(double s1, double s2) const;
  // The connector from s1 to s2 whose angle lies closest to alpha0, found
  // without a fan (continuation along a branch).
  std::optional<Connector> track(double s1, double s2, double alpha0, double width = 0.05) const;
  // The ray from s1 at angle alpha, stopped where it leaves the region.
  std::optional<Connector> ray(double s1, double alpha, double* s_exit = nullptr) const;

  GeodesicPath path(double s1, double s2, const Connector& k) const;

  PairField field(int n) const;

 private:
  struct Fan {
    std::vector<double> alpha, rel, length, sigma_q;
    std::vector<char> valid;
  };

  BoundaryCurve curve_;
  bool plane_ = false;
  double step_scale_;
  double len_window_;
  double max_len_;
  mutable std::map<long long, std::shared_ptr<const Fan>> fans_;

  std::shared_ptr<const Fan> fan(double s) const;
  Fan build_fan(double s) const;
  void fan_connectors(double s1, double s2, const Fan& f, std::vector<Connector>& out) const;
  void arc_connectors(double s1, double s2, std::vector<Connector>& out) const;
  Connector segment(double s1, double s2) const;
};

// Sort by angle, drop near-duplicate angles (keeping the shorter), then sort by length.
std::vector<Connector> dedup_connectors(std::vector<Connector> ks, double angle_tol = 1e-3);
std::vector<Connector> within_window(const std::vector<Connector>& ks, double len_window);

}  // namespace widthlab
