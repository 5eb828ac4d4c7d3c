#include <gtest/gtest.h>

#include <map>
#include <memory>
#include <random>
#include <set>

#include "testing.hpp"
#include "widthlab/pairspace.hpp"

using namespace widthlab;

namespace {

struct Loaded {
  const RunConfig& config;
  const BoundaryCurve& curve;
  const BoundaryGeodesics* geo;
  const PairField& field;
  const ScanResult& scan;
};

Loaded loaded(const std::string& name) {
  auto& w = widthlab::testing::workspace(name);
  return {w.config, w.curve, w.geo.get(), w.field(w.config.grid.scan), w.scan()};
}

BoundaryCurve plane_ellipse(double a, double b) {
  return build_curve(CurveSpec::ellipse(a, b), SurfaceChart::euclidean_plane({-3, 3, -3, 3, false}), 512);
}

void expect_report_invariants(const CriticalityReport& r) {
  if (r.verdict == Verdict::kRegular) {
    EXPECT_GT(r.margin, 1e-8);
    for (const Connector& k : r.connectors)
      EXPECT_LE(r.direction.dot(signature(k).vec()), -1e-8);
  } else if (!r.trivial) {
    ASSERT_FALSE(r.witness.empty());
    double sum = 0;
    Vec2 mix = Vec2::Zero();
    for (const auto& [i, lambda] : r.witness) {
      EXPECT_GE(lambda, 0.0);
      sum += lambda;
      mix += lambda * signature(r.connectors.at(i)).vec();
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_LE(mix.norm(), 1e-8);
  }
  if (r.simultaneously_stationary) EXPECT_GT(r.stationary_c, 0.0);
}

}  // namespace

TEST(MinNormPoint, OriginInsideTriangle) {
  const std::vector<Vec2> pts{{1, 0}, {-1, 1}, {-1, -1}};
  const HullPoint h = min_norm_point(pts);
  EXPECT_LE(h.point.norm(), 1e-15);
  EXPECT_EQ(h.weights.size(), 3u);
}

TEST(MinNormPoint, ClosestEdgePoint) {
  const std::vector<Vec2> pts{{1, -1}, {1, 1}, {3, 0}};
  const HullPoint h = min_norm_point(pts);
  EXPECT_NEAR(h.point[0], 1.0, 1e-15);
  EXPECT_NEAR(h.point[1], 0.0, 1e-15);
}

TEST(MinNormPoint, CollinearThroughOrigin) {
  const std::vector<Vec2> pts{{-1, 1}, {0.5, -0.5}, {1, -1}};
  const HullPoint h = min_norm_point(pts);
  EXPECT_LE(h.point.norm(), 1e-15);
  double sum = 0;
  for (const auto& w : h.weights) sum += w.second;
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(MinNormPoint, SinglePoint) {
  const HullPoint h = min_norm_point({{0.3, 0.4}});
  EXPECT_NEAR(h.point.norm(), 0.5, 1e-15);
  EXPECT_THROW(min_norm_point({}), std::invalid_argument);
}

TEST(MinNormPoint, RandomSetsAreOptimal) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 9;
    const Vec2 shift(u(rng), u(rng));
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) pts.push_back(shift + 0.5 * Vec2(u(rng), u(rng)));
    const HullPoint h = min_norm_point(pts);
    Vec2 mix = Vec2::Zero();
    double sum = 0;
    for (const auto& [i, lambda] : h.weights) {
      EXPECT_GE(lambda, 0.0);
      mix += lambda * pts[i];
      sum += lambda;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_LE((mix - h.point).norm(), 1e-12);
    // Optimality: every point lies in the half-plane beyond the minimum.
    for (const Vec2& p : pts) EXPECT_GE(h.point.dot(p), h.point.squaredNorm() - 1e-12);
  }
}

TEST(PairPointTest, CanonicalForm) {
  const double L = 10.0;
  const PairPoint a = PairPoint::make(7.0, 2.0, L);
  EXPECT_DOUBLE_EQ(a.s1, 2.0);
  EXPECT_DOUBLE_EQ(a.s2, 7.0);
  EXPECT_FALSE(a.is_singleton);
  EXPECT_TRUE(a.same_as(PairPoint::make(12.0, 17.0, L), L));
  EXPECT_FALSE(a.same_as(PairPoint::make(2.0, 7.1, L), L));
  EXPECT_TRUE(PairPoint::make(3.0, 13.0, L).is_singleton);
  EXPECT_TRUE(PairPoint::make(0.0, L - 1e-12, L).is_singleton);
}

TEST(SignatureTest, FreeBoundaryChord) {
  const auto c = plane_ellipse(2, 1);
  BoundaryGeodesics g(c);
  const double L = c.length();
  const auto ks = g.minimizers(0.0, L / 2);
  const Signature s = signature(c, g.path(0.0, L / 2, ks.front()));
  EXPECT_NEAR(s.p, 0.0, 1e-6);
  EXPECT_NEAR(s.q, 0.0, 1e-6);
}

TEST(SignatureTest, PlaneChordAngle) {
  const auto c = build_curve(CurveSpec::circle(1.0), SurfaceChart::euclidean_plane({-2, 2, -2, 2, false}), 256);
  BoundaryGeodesics g(c);
  // The chord from angle 0 to angle pi/2 meets the tangent at 45 degrees.
  const auto path = g.path(0.0, kPi / 2, g.minimizers(0.0, kPi / 2).front());
  const Signature s = signature(c, path);
  EXPECT_NEAR(s.p, -std::cos(kPi / 4), 1e-6);
  EXPECT_NEAR(s.q, std::cos(kPi / 4), 1e-6);
}

TEST(SignatureTest, BoundaryArc) {
  const auto h = loaded("hemisphere");
  const Connector arc{1.0, kPi / 2, -1.0, 1.0, true};
  const Signature s = signature(h.curve, h.geo->path(0.5, 1.5, arc));
  EXPECT_NEAR(s.p, -1.0, 1e-6);
  EXPECT_NEAR(s.q, 1.0, 1e-6);
}

TEST(SignatureTest, OffCurveEndpointThrows) {
  const auto c = plane_ellipse(2, 1);
  BoundaryGeodesics g(c);
  auto path = g.path(0.0, 3.0, g.minimizers(0.0, 3.0).front());
  path.working.back() *= 0.9;
  EXPECT_THROW(signature(c, path), NumericalError);
}

TEST(Classify, EllipseMajorAxisIsCritical) {
  const auto c = plane_ellipse(2, 1);
  BoundaryGeodesics g(c);
  const auto r = classify_pair(g, PairPoint::make(0.0, c.length() / 2, c.length()));
  EXPECT_EQ(r.verdict, Verdict::kCritical);
  EXPECT_TRUE(r.free_boundary);
  EXPECT_NEAR(r.distance, 4.0, 1e-9);
  ASSERT_EQ(r.minimizers.size(), 1u);
  expect_report_invariants(r);
}

TEST(Classify, EllipseSymmetricPairIsRegular) {
  const auto c = plane_ellipse(2, 1);
  BoundaryGeodesics g(c);
  const double L = c.length();
  // Mirror images across the minor axis, away from the vertices.
  const PairPoint pp = PairPoint::make(0.1 * L, 0.4 * L, L);
  const auto r = classify_pair(g, pp);
  ASSERT_EQ(r.verdict, Verdict::kRegular);
  expect_report_invariants(r);
  // The certificate separates against a freshly built minimizer set.
  BoundaryGeodesics fresh(c);
  for (const Connector& k : fresh.minimizers(pp.s1, pp.s2))
    EXPECT_LE(r.direction.dot(signature(k).vec()), -1e-8);
}

TEST(Classify, CircleAntipodalIsCritical) {
  const auto f = loaded("circle");
  const double L = f.curve.length();
  const auto r = classify_pair(*f.geo, PairPoint::make(0.3, 0.3 + L / 2, L));
  EXPECT_EQ(r.verdict, Verdict::kCritical);
  EXPECT_TRUE(r.free_boundary);
  expect_report_invariants(r);
}

TEST(Classify, SingletonIsTrivial) {
  const auto f = loaded("circle");
  const auto r = classify_pair(*f.geo, PairPoint::make(1.0, 1.0, f.curve.length()));
  EXPECT_TRUE(r.trivial);
  EXPECT_EQ(r.verdict, Verdict::kCritical);
}

TEST(Extremal, EllipseVertexPairHasOneChord) {
  const auto c = plane_ellipse(2, 1);
  BoundaryGeodesics g(c);
  const auto e = extremal_geodesics(g, PairPoint::make(0.0, c.length() / 2, c.length()));
  EXPECT_DOUBLE_EQ(e.plus.alpha, e.minus.alpha);
  EXPECT_NEAR(e.plus.length, 4.0, 1e-9);
}

TEST(Extremal, HemisphereAntipodalArcs) {
  const auto f = loaded("hemisphere");
  const double L = f.curve.length();
  const PairPoint pp = PairPoint::make(0.7, 0.7 + L / 2, L);
  const auto e = extremal_geodesics(*f.geo, pp);
  EXPECT_TRUE(e.plus.boundary_arc);
  EXPECT_TRUE(e.minus.boundary_arc);
  EXPECT_NEAR(e.plus.sigma_p, -1.0, 1e-12);
  EXPECT_NEAR(e.plus.sigma_q, 1.0, 1e-12);
  EXPECT_NEAR(e.minus.sigma_p, 1.0, 1e-12);
  EXPECT_NEAR(e.minus.sigma_q, -1.0, 1e-12);
  const auto r = classify_pair(*f.geo, pp, false);
  EXPECT_TRUE(r.boundary_arc_pair);
  EXPECT_EQ(r.verdict, Verdict::kCritical);
  for (const Connector& k : r.connectors) EXPECT_NEAR(k.length, kPi, 1e-4 * kPi);
}

TEST(Extremal, ProlateMirrorChords) {
  const auto f = loaded("prolate_cap");
  const double L = f.curve.length();
  const PairPoint pp = PairPoint::make(0.0, L / 2, L);
  const auto e = extremal_geodesics(*f.geo, pp);
  EXPECT_FALSE(e.plus.boundary_arc);
  EXPECT_FALSE(e.minus.boundary_arc);
  EXPECT_LT(e.plus.sigma_p, -0.1);
  EXPECT_NEAR(e.plus.sigma_p, -e.minus.sigma_p, 1e-6);
  EXPECT_NEAR(e.plus.length, e.minus.length, 1e-8);
  const auto r = classify_pair(*f.geo, pp, false);
  EXPECT_EQ(r.verdict, Verdict::kCritical);
  EXPECT_TRUE(r.simultaneously_stationary);
  EXPECT_NEAR(r.stationary_c, 1.0, 1e-4);
  EXPECT_FALSE(r.free_boundary);
  expect_report_invariants(r);
}

TEST(Polish, RecoversPerturbedAxisPair) {
  const auto c = plane_ellipse(2, 1);
  BoundaryGeodesics g(c);
  const double L = c.length();
  const auto p = polish_critical_pair(g, PairPoint::make(0.004 * L, 0.497 * L, L));
  ASSERT_TRUE(p.has_value());
  EXPECT_LE(pair_offset(*p, PairPoint::make(0.0, L / 2, L), L), 1e-9 * L);
}

TEST(Polish, DumbbellBumpChord) {
  const auto f = loaded("dumbbell");
  const double L = f.curve.length();
  const auto p = polish_critical_pair(*f.geo, PairPoint::make(0.17 * L, 0.83 * L, L));
  ASSERT_TRUE(p.has_value());
  const auto r = classify_pair(*f.geo, *p, false);
  EXPECT_EQ(r.verdict, Verdict::kCritical);
  EXPECT_TRUE(r.free_boundary);
  // Mirror symmetry of the fixture about the major axis.
  EXPECT_NEAR(p->s1 + p->s2, L, 1e-6 * L);
}

TEST(Scan, RejectsCoarseGrid) {
  const auto c = plane_ellipse(2, 1);
  BoundaryGeodesics g(c);
  EXPECT_THROW(scan_critical_pairs(g, 16), std::invalid_argument);
}

TEST(Scan, EllipseHasTwoAxisComponents) {
  const auto f = loaded("ellipse");
  const double L = f.curve.length();
  ASSERT_EQ(f.scan.components.size(), 2u);
  std::vector<PairPoint> expected{PairPoint::make(0, L / 2, L), PairPoint::make(L / 4, 3 * L / 4, L)};
  for (const PairPoint& want : expected) {
    int hits = 0;
    for (const auto& comp : f.scan.components)
      if (pair_offset(comp.location, want, L) <= 1e-3 * L) ++hits;
    EXPECT_EQ(hits, 1);
  }
  EXPECT_NEAR(f.scan.components[0].report.distance + f.scan.components[1].report.distance, 6.0, 1e-9);
}

TEST(Scan, CircleIsOneAntipodalFamily) {
  const auto f = loaded("circle");
  ASSERT_EQ(f.scan.components.size(), 1u);
  const auto& comp = f.scan.components.front();
  std::set<int> touched;
  for (const auto& [i, j] : comp.cells) {
    touched.insert(i);
    touched.insert(j);
    EXPECT_LE(std::abs(std::abs(j - i) - f.scan.grid / 2), 1);
  }
  EXPECT_EQ(static_cast<int>(touched.size()), f.scan.grid);
}

TEST(Scan, HemisphereAntipodalFamily) {
  const auto f = loaded("hemisphere");
  ASSERT_EQ(f.scan.components.size(), 1u);
  const auto& comp = f.scan.components.front();
  EXPECT_NEAR(comp.report.distance, kPi, 1e-6);
  EXPECT_NEAR(comp.d_max, kPi, 1e-6);
  const int n = f.field.n;
  for (int i = 0; i < n; ++i) {
    const auto r = classify_connectors(PairPoint::make(f.field.s(i), f.field.s(i + n / 2), f.field.length),
                                       f.field.minimizers_at(i, i + n / 2));
    EXPECT_EQ(r.verdict, Verdict::kCritical) << i;
    EXPECT_NEAR(r.distance, kPi, 1e-6);
  }
}

TEST(Scan, DumbbellFindsNeckAndAxis) {
  const auto f = loaded("dumbbell");
  const double L = f.curve.length();
  bool neck = false, axis = false;
  for (const auto& comp : f.scan.components) {
    if (pair_offset(comp.location, PairPoint::make(L / 4, 3 * L / 4, L), L) <= 1e-3 * L) {
      neck = true;
      EXPECT_TRUE(comp.report.free_boundary);
      EXPECT_EQ(comp.report.connectors.size(), 1u);
    }
    if (pair_offset(comp.location, PairPoint::make(0, L / 2, L), L) <= 1e-3 * L) {
      axis = true;
      EXPECT_TRUE(comp.report.simultaneously_stationary);
    }
  }
  EXPECT_TRUE(neck);
  EXPECT_TRUE(axis);
}

class ConvexFixture : public ::testing::TestWithParam<std::string> {};

TEST_P(ConvexFixture, ComponentReportsSatisfyInvariants) {
  const auto f = loaded(GetParam());
  for (const auto& comp : f.scan.components) {
    EXPECT_EQ(comp.report.verdict, Verdict::kCritical);
    EXPECT_FALSE(comp.report.trivial);
    expect_report_invariants(comp.report);
  }
}

TEST_P(ConvexFixture, CertificatesSurviveRecomputation) {
  const auto f = loaded(GetParam());
  const int n = f.field.n;
  BoundaryGeodesics fresh(f.curve, f.config.totally_convex, f.config.step_scale, f.config.len_window);
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int trial = 0; trial < 12; ++trial) {
    const int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    const auto r = classify_connectors(PairPoint::make(f.field.s(i), f.field.s(j), f.field.length),
                                       f.field.minimizers_at(i, j));
    expect_report_invariants(r);
    if (r.verdict != Verdict::kRegular) continue;
    for (const Connector& k : fresh.minimizers(f.field.s(i), f.field.s(j)))
      EXPECT_LE(r.direction.dot(signature(k).vec()), -1e-8);
  }
}

TEST_P(ConvexFixture, ComponentsShareNoBoundaryPoint) {
  const auto f = loaded(GetParam());
  const int n = f.field.n;
  std::vector<std::set<int>> touched;
  for (const auto& comp : f.scan.components) {
    std::set<int> t;
    for (const auto& [i, j] : comp.cells)
      for (int k : {i, i + 1, j, j + 1}) t.insert(((k % n) + n) % n);
    touched.push_back(std::move(t));
  }
  for (std::size_t a = 0; a < touched.size(); ++a)
    for (std::size_t b = a + 1; b < touched.size(); ++b)
      for (int k : touched[a]) EXPECT_EQ(touched[b].count(k), 0u) << "grid point " << k;
}

namespace {

// Strict grid-local extrema of the field away from the diagonal.
std::vector<std::pair<int, int>> strict_extrema(const PairField& f, bool maxima) {
  const int n = f.n;
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 3; j < n; ++j) {
      if (n - (j - i) < 3) continue;
      const double d = f.at(i, j);
      bool strict = true;
      for (int di = -1; di <= 1 && strict; ++di)
        for (int dj = -1; dj <= 1 && strict; ++dj) {
          if (di == 0 && dj == 0) continue;
          const double e = f.at(i + di, j + dj);
          strict = maxima ? e < d : e > d;
        }
      if (strict) out.emplace_back(i, j);
    }
  return out;
}

}  // namespace

TEST_P(ConvexFixture, LocalExtremaAreCritical) {
  const auto f = loaded(GetParam());
  const double L = f.field.length;
  for (bool maxima : {true, false}) {
    for (const auto& [i, j] : strict_extrema(f.field, maxima)) {
      const PairPoint grid_pair = PairPoint::make(f.field.s(i), f.field.s(j), L);
      const auto p = polish_critical_pair(*f.geo, grid_pair);
      ASSERT_TRUE(p.has_value()) << i << "," << j;
      EXPECT_LE(pair_offset(*p, grid_pair, L), 2.0 * L / f.field.n) << i << "," << j;
      EXPECT_EQ(classify_pair(*f.geo, *p, false).verdict, Verdict::kCritical);
    }
  }
}

TEST_P(ConvexFixture, LocalMinimaHaveOneFreeBoundaryMinimizer) {
  const auto f = loaded(GetParam());
  const double L = f.field.length;
  for (const auto& [i, j] : strict_extrema(f.field, false)) {
    const auto p = polish_critical_pair(*f.geo, PairPoint::make(f.field.s(i), f.field.s(j), L));
    ASSERT_TRUE(p.has_value());
    const auto r = classify_pair(*f.geo, *p, false);
    EXPECT_EQ(r.connectors.size(), 1u);
    EXPECT_TRUE(r.free_boundary);
  }
}

INSTANTIATE_TEST_SUITE_P(Fixtures, ConvexFixture, ::testing::ValuesIn(widthlab::testing::convex_fixture_names()),
                         [](const auto& info) { return info.param; });
