#pragma once

#include <optional>
#include <string>
#include <vector>

#include "widthlab/pairspace.hpp"

namespace widthlab {

// Distances between the boundary samples s_i = i L / n.
struct DistanceField {
  int n = 0;
  double length = 0.0;
  std::vector<double> d;  // row-major n x n

  double s(int i) const { return length * i / n; }
  double at(int i, int j) const {
    return d[static_cast<std::size_t>(((i % n) + n) % n) * n + static_cast<std::size_t>(((j % n) + n) % n)];
  }
  PairPoint pair(int i, int j) const { return PairPoint::make(s(i), s(j), length); }
};

DistanceField distance_field(const BoundaryGeodesics& g, int n);
DistanceField distance_field(const PairField& f);
// Every (n / m)-th sample.
DistanceField downsample(const DistanceField& f, int m);

// A lattice path on the strip 0 <= y - x <= n of ordered-pair lifts, from
// the diagonal y = x to y = x + n.
struct Sweepout {
  std::vector<std::pair<long, long>> lift;
};

struct WidthResult {
  double S = 0.0;
  Sweepout optimal;
  std::size_t argmax_step = 0;  // index into optimal.lift
  PairPoint argmax_pair;
};

// Bottleneck Dijkstra over the strip.
WidthResult width_minmax(const DistanceField& f);
// Smallest threshold whose sublevel set connects the two strip edges.
double width_threshold(const DistanceField& f);
// Min-max closure over all lattice paths (n <= 12).  With monotone set, only
// steps that never shrink y - x are allowed.
double brute_force_width(const DistanceField& f, bool monotone = false);

double sweepout_max(const DistanceField& f, const Sweepout& w);
bool is_valid_sweepout(const Sweepout& w, int n);

struct Diameter {
  double diam = 0.0;
  PairPoint pair;
  int i = 0;
  int j = 0;
};
Diameter diameter(const DistanceField& f);

struct ConstantWidthTest {
  bool unique_farthest = true;
  bool attains_diameter = true;
  bool monotone = true;
  std::vector<int> phi;  // farthest sample index per sample
  bool holds() const { return unique_farthest && attains_diameter && monotone; }
};
ConstantWidthTest constant_width_test(const DistanceField& f, double diam);

struct Relations {
  double S = 0.0;
  double diam = 0.0;
  double length = 0.0;
  bool chain_holds = false;  // S <= diam <= L/2 within 1e-6
  bool S_below_diam = false;
  bool diam_below_half = false;
  ConstantWidthTest constant_width;
  double arc_deviation = 0.0;  // max |d - intrinsic distance|
  bool arcs_minimize = false;  // arc_deviation <= 1e-4 L
  bool S_is_half_length = false;
  // Diameter pair with two minimizers of length L/2, when diam = L/2.
  std::optional<bool> half_length_pair_has_two_arcs;
  int critical_components = 0;
  std::string critical_set;  // "two critical points", "circle of critical points", ...
  // The maximal pair of the optimal sweepout, refined and classified.
  PairPoint width_pair;
  bool width_pair_polished = false;
  CriticalityReport width_pair_report;
  double min_component_distance = 0.0;
};

Relations relations_report(const BoundaryGeodesics& g, const DistanceField& f, const WidthResult& w,
                           const ScanResult& scan);

// Classification of the maximal pair of an optimal sweepout, after local refinement.
CriticalityReport classify_width_pair(const BoundaryGeodesics& g, const PairPoint& pp, PairPoint* refined = nullptr,
                                      bool* polished = nullptr);

}  // namespace widthlab
