#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>

#include "testing.hpp"
#include "widthlab/birkhoff.hpp"
#include "widthlab/minmax.hpp"

using namespace widthlab;
using widthlab::testing::workspace;

namespace {

void expect_monotone(const BirkhoffResult& r) {
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]) << "iteration " << i;
}

// Positive root of mu tanh(mu) = 1: the even Robin mode of the unit-disc diameter.
double disc_lambda1() {
  auto f = [](double mu) { return mu * std::tanh(mu) - 1.0; };
  boost::uintmax_t it = 100;
  const auto r = boost::math::tools::toms748_solve(f, 0.5, 2.0, boost::math::tools::eps_tolerance<double>(60), it);
  const double mu = 0.5 * (r.first + r.second);
  return -mu * mu;
}

const StarCheck& star(const std::string& name) {
  static std::map<std::string, StarCheck> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    auto& w = workspace(name);
    it = cache.emplace(name, property_star_check(*w.geo, std::max(64, w.config.grid.fbg_scan))).first;
  }
  return it->second;
}

struct WidthData {
  WidthResult width;
  PairPoint pair;
  CriticalityReport report;
};

const WidthData& width_data(const std::string& name) {
  static std::map<std::string, WidthData> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    auto& w = workspace(name);
    WidthData d;
    d.width = width_minmax(distance_field(w.field(w.config.grid.pairs)));
    d.report = classify_width_pair(*w.geo, d.width.argmax_pair, &d.pair);
    it = cache.emplace(name, std::move(d)).first;
  }
  return it->second;
}

std::vector<std::string> star_fixtures() { return {"circle", "ellipse", "squircle", "hemisphere", "prolate_cap", "oblate_cap"}; }

}  // namespace

TEST(LocalGeodesic, GreatCircleDistanceOnSphere) {
  auto& w = workspace("hemisphere");
  const SurfaceChart& s = w.curve.surface();
  const Vec2 a = s.to_working({0.3, 0.4}), b = s.to_working({1.2, 0.9});
  const auto unit = [](double th, double ph) {
    return Eigen::Vector3d(std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th), std::cos(ph));
  };
  const double exact = std::acos(unit(0.3, 0.4).dot(unit(1.2, 0.9)));
  const LocalGeodesic g = local_geodesic(s, a, b, 64);
  EXPECT_NEAR(g.length, exact, 1e-8);
  EXPECT_NEAR(local_geodesic(s, a, g.mid, 64).length, 0.5 * exact, 1e-8);
}

TEST(LocalGeodesic, PlaneIsExact) {
  const SurfaceChart& s = workspace("circle").curve.surface();
  const LocalGeodesic g = local_geodesic(s, Vec2(0.1, 0.2), Vec2(0.4, -0.2));
  EXPECT_DOUBLE_EQ(g.length, 0.5);
  EXPECT_TRUE(g.mid.isApprox(Vec2(0.25, 0.0)));
}

TEST(Birkhoff, DiscDiameterIsAFixedPoint) {
  auto& w = workspace("circle");
  const auto r = birkhoff_shorten(w.curve, {Vec2(1, 0), Vec2(0, 0), Vec2(-1, 0)});
  ASSERT_EQ(r.outcome, BirkhoffResult::Outcome::kFreeBoundaryGeodesic);
  EXPECT_NEAR(r.trace.back(), 2.0, 1e-12);
  ASSERT_TRUE(r.geodesic);
  EXPECT_NEAR(r.geodesic->length, 2.0, 1e-9);
  expect_monotone(r);
}

TEST(Birkhoff, ZBentPathConvergesToADiameter) {
  auto& w = workspace("circle");
  for (double bend : {0.02, 0.1, 0.3}) {
    BirkhoffOptions o;
    o.bend = bend;
    const auto r = birkhoff_shorten(w.curve, birkhoff_start_path(w.curve, o));
    ASSERT_EQ(r.outcome, BirkhoffResult::Outcome::kFreeBoundaryGeodesic) << bend;
    EXPECT_NEAR(r.trace.back(), 2.0, 1e-4);
    ASSERT_TRUE(r.geodesic);
    EXPECT_LE(std::abs(r.geodesic->sigma_p), 1e-4);
    EXPECT_LE(std::abs(r.geodesic->sigma_q), 1e-4);
    EXPECT_NEAR(std::abs(wrap_centered(r.end_s - r.start_s, w.curve.length())), kPi, 1e-3);
    EXPECT_FALSE(r.self_intersecting);
    expect_monotone(r);
  }
}

TEST(Birkhoff, EvenBendLeavesTheUnstableDiameter) {
  // The sideways mode of a diameter has negative second variation.
  auto& w = workspace("circle");
  const auto r = birkhoff_shorten(w.curve, {Vec2(1, 0), Vec2(0, 0.01), Vec2(-1, 0)});
  EXPECT_EQ(r.outcome, BirkhoffResult::Outcome::kPoint);
  expect_monotone(r);
}

TEST(Birkhoff, ShortChordShrinksToAPoint) {
  auto& w = workspace("circle");
  BirkhoffOptions o;
  o.from = 0.0;
  o.to = 0.1;
  const auto r = birkhoff_shorten(w.curve, birkhoff_start_path(w.curve, o));
  EXPECT_EQ(r.outcome, BirkhoffResult::Outcome::kPoint);
  EXPECT_LT(r.trace.back(), 1e-3 * w.curve.length());
  EXPECT_FALSE(r.geodesic);
  expect_monotone(r);
}

TEST(Birkhoff, OblateCapConvergesToAWidthMeridian) {
  auto& w = workspace("oblate_cap");
  BirkhoffOptions o;
  o.bend = 0.05;
  const auto r = birkhoff_shorten(w.curve, birkhoff_start_path(w.curve, o));
  ASSERT_EQ(r.outcome, BirkhoffResult::Outcome::kFreeBoundaryGeodesic);
  ASSERT_TRUE(r.geodesic);
  EXPECT_NEAR(r.geodesic->length, r.trace.back(), 1e-4);
  EXPECT_NEAR(r.trace.back(), star("oblate_cap").geodesics.front().length, 1e-4);
  expect_monotone(r);
}

TEST(Birkhoff, Preconditions) {
  auto& w = workspace("circle");
  EXPECT_THROW(birkhoff_shorten(w.curve, {Vec2(1, 0), Vec2(-1, 0)}), std::invalid_argument);
  EXPECT_THROW(birkhoff_shorten(w.curve, {Vec2(0.9, 0), Vec2(0, 0), Vec2(-1, 0)}), std::invalid_argument);
  BirkhoffOptions o;
  o.bend = 0.3;
  EXPECT_THROW(birkhoff_shorten(w.curve, birkhoff_start_path(w.curve, o), 8, 2), NumericalError);
}

TEST(Birkhoff, RandomStartsHaveMonotoneTraces) {
  auto& w = workspace("ellipse");
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0), b(-0.3, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    BirkhoffOptions o;
    o.from = u(rng);
    o.to = o.from + 0.2 + 0.6 * u(rng);
    o.bend = b(rng);
    const auto r = birkhoff_shorten(w.curve, birkhoff_start_path(w.curve, o), 10);
    expect_monotone(r);
    if (r.outcome == BirkhoffResult::Outcome::kFreeBoundaryGeodesic) {
      // The only double normals of the ellipse are its axes.
      const double len = r.trace.back();
      EXPECT_TRUE(std::abs(len - 2.0) < 1e-3 || std::abs(len - 4.0) < 1e-3) << len;
    }
  }
}

TEST(RobinSpectrum, DiscDiameterClosedForm) {
  const auto ev = robin_spectrum([](double) { return 0.0; }, 2.0, 1.0, 1.0, 800);
  EXPECT_NEAR(ev[0], disc_lambda1(), 1e-4);
  EXPECT_NEAR(ev[1], 0.0, 1e-8);  // u = t - 1 is exact on the grid, up to rounding at 1/h^2
}

TEST(RobinSpectrum, NeumannCosines) {
  const auto ev = robin_spectrum([](double) { return 1.0; }, kPi, 0.0, 0.0, 1000);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(ev[k], k * k - 1.0, 1e-4 * (1 + k * k * k * k));
}

TEST(RobinSpectrum, RejectsDegenerateGrids) {
  EXPECT_THROW(robin_spectrum([](double) { return 0.0; }, 1.0, 0.0, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(robin_spectrum([](double) { return 0.0; }, 0.0, 0.0, 0.0, 10), std::invalid_argument);
}

TEST(FreeBoundaryIndex, DiscDiameter) {
  const auto& st = star("circle");
  ASSERT_EQ(st.geodesics.size(), 1u);
  const IndexResult& ix = st.indices[0];
  EXPECT_NEAR(ix.eigenvalues[0], disc_lambda1(), 1e-6);
  EXPECT_NEAR(ix.eigenvalues[1], 0.0, 1e-8);
  EXPECT_EQ(ix.index, 1);
  EXPECT_EQ(ix.nullity, 1);
  EXPECT_NEAR(ix.rayleigh_constant, -1.0, 1e-9);
}

TEST(FreeBoundaryIndex, HemisphereMeridian) {
  const auto& st = star("hemisphere");
  ASSERT_EQ(st.geodesics.size(), 1u);
  const IndexResult& ix = st.indices[0];
  ASSERT_EQ(ix.eigenvalues.size(), 6u);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(ix.eigenvalues[k], k * k - 1.0, 1e-6) << k;
  EXPECT_EQ(ix.index, 1);
  EXPECT_EQ(ix.nullity, 1);
}

TEST(FreeBoundaryIndex, EllipseAxes) {
  const auto& st = star("ellipse");
  ASSERT_EQ(st.geodesics.size(), 2u);
  EXPECT_NEAR(st.geodesics[0].length, 2.0, 1e-6);
  EXPECT_EQ(st.indices[0].index, 1);
  EXPECT_NEAR(st.geodesics[1].length, 4.0, 1e-6);
  EXPECT_EQ(st.indices[1].index, 2);
}

TEST(FreeBoundaryIndex, RejectsObliqueGeodesics) {
  auto& w = workspace("ellipse");
  const auto ks = w.geo->minimizers(0.3, 4.0);
  ASSERT_FALSE(ks.empty());
  EXPECT_THROW(free_boundary_index(w.curve, w.geo->path(0.3, 4.0, ks[0])), std::invalid_argument);
}

TEST(FreeBoundaryIndex, CapMeridiansAreUnstableWithRotationalNullity) {
  for (const char* name : {"prolate_cap", "oblate_cap"}) {
    const auto& st = star(name);
    ASSERT_EQ(st.geodesics.size(), 1u) << name;
    EXPECT_TRUE(st.geodesics[0].family);
    EXPECT_EQ(st.indices[0].index, 1) << name;
    EXPECT_EQ(st.indices[0].nullity, 1) << name;
  }
}

class EveryFreeBoundaryGeodesic : public ::testing::TestWithParam<std::string> {};

TEST_P(EveryFreeBoundaryGeodesic, RayleighAndRefinement) {
  auto& w = workspace(GetParam());
  const auto& st = star(GetParam());
  for (std::size_t i = 0; i < st.geodesics.size(); ++i) {
    const IndexResult& ix = st.indices[i];
    EXPECT_LE(ix.index + ix.nullity, static_cast<int>(ix.eigenvalues.size()));
    EXPECT_TRUE(std::is_sorted(ix.eigenvalues.begin(), ix.eigenvalues.end()));
    if (ix.rayleigh_constant < 0) {
      EXPECT_LT(ix.eigenvalues[0], 0.0);
      EXPECT_LE(ix.eigenvalues[0], ix.rayleigh_constant + 1e-6);
    }
    const IndexResult fine = free_boundary_index(w.curve, st.geodesics[i].path, 800);
    for (std::size_t k = 0; k < ix.eigenvalues.size(); ++k)
      EXPECT_LE(std::abs(fine.eigenvalues[k] - ix.eigenvalues[k]), 1e-4 * std::max(1.0, std::abs(ix.eigenvalues[k])));
  }
}

INSTANTIATE_TEST_SUITE_P(Fixtures, EveryFreeBoundaryGeodesic,
                         ::testing::Values("circle", "ellipse", "squircle", "hemisphere", "prolate_cap", "oblate_cap",
                                           "dumbbell"));

TEST(FreeBoundaryScan, DiscIsOneRotationalFamily) {
  const auto& st = star("circle");
  ASSERT_EQ(st.geodesics.size(), 1u);
  EXPECT_TRUE(st.geodesics[0].family);
  EXPECT_NEAR(st.geodesics[0].length, 2.0, 1e-9);
}

TEST(FreeBoundaryScan, EllipseHasExactlyTheAxes) {
  auto& w = workspace("ellipse");
  const double L = w.curve.length();
  const auto fb = find_free_boundary_geodesics(*w.geo, 64);
  ASSERT_EQ(fb.size(), 2u);
  for (const auto& f : fb) {
    EXPECT_FALSE(f.family);
    EXPECT_NEAR(std::abs(wrap_centered(f.s2 - f.s1, L)), 0.5 * L, 1e-6 * L);
    const double q = std::fmod(f.s1 / (0.25 * L), 1.0);
    EXPECT_TRUE(q < 1e-6 || q > 1 - 1e-6) << f.s1;
  }
}

TEST(FreeBoundaryScan, ProlateMeridianPassesThePole) {
  const auto& st = star("prolate_cap");
  ASSERT_EQ(st.geodesics.size(), 1u);
  double closest = 1e9;
  for (const Vec2& x : st.geodesics[0].path.working) closest = std::min(closest, x.norm());
  EXPECT_LT(closest, st.geodesics[0].path.step);  // the working chart puts the pole at the origin
}

TEST(FreeBoundaryScan, CylinderHasNone) {
  auto& w = workspace("cylinder");
  EXPECT_TRUE(find_free_boundary_geodesics(*w.geo, 64).empty());
}

TEST(FreeBoundaryScan, RejectsCoarseScans) {
  EXPECT_THROW(find_free_boundary_geodesics(*workspace("circle").geo, 32), std::invalid_argument);
}

TEST(FreeBoundaryScan, EndpointsAreOrthogonal) {
  for (const char* name : {"ellipse", "squircle", "dumbbell"}) {
    for (const auto& f : star(name).geodesics) {
      EXPECT_LE(std::abs(f.path.sigma_p), 1e-4) << name;
      EXPECT_LE(std::abs(f.path.sigma_q), 1e-4) << name;
    }
  }
}

TEST(PropertyStar, HoldsOnConvexPositiveFixtures) {
  for (const auto& name : star_fixtures()) {
    const auto& st = star(name);
    EXPECT_TRUE(st.holds) << name;
    EXPECT_TRUE(st.witnesses.empty()) << name;
    EXPECT_FALSE(st.geodesics.empty()) << name;
  }
}

TEST(PropertyStar, DumbbellNeckIsAStableWitness) {
  const auto& st = star("dumbbell");
  EXPECT_FALSE(st.holds);
  ASSERT_EQ(st.witnesses.size(), 1u);
  const int i = st.witnesses[0];
  EXPECT_GT(st.indices[i].eigenvalues[0], 0.0);
  EXPECT_EQ(st.indices[i].index, 0);
  // The neck joins the ends of the minor axis.
  const double L = workspace("dumbbell").curve.length();
  EXPECT_NEAR(st.geodesics[i].s1, 0.25 * L, 1e-6 * L);
  EXPECT_NEAR(st.geodesics[i].s2, 0.75 * L, 1e-6 * L);
  EXPECT_LT(st.geodesics[i].length, width_data("dumbbell").width.S);
}

class StarFixture : public ::testing::TestWithParam<std::string> {};

TEST_P(StarFixture, WidthIsRealized) {
  auto& w = workspace(GetParam());
  const auto& d = width_data(GetParam());
  const auto r = width_realization(*w.geo, d.width.S, d.report, star(GetParam()), 0.01 * w.curve.length());
  EXPECT_TRUE(r.holds());
  // A free-boundary minimizer at the width level has index one.
  if (r.minimizer_index) EXPECT_EQ(r.minimizer_index->index, 1);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, StarFixture, ::testing::ValuesIn(star_fixtures()));
