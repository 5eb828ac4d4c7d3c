#include "testing.hpp"

#include <algorithm>

namespace widthlab::testing {

std::string fixture_path(const std::string& name) { return std::string(WIDTHLAB_FIXTURES) + "/" + name + ".json"; }

RunConfig load_fixture(const std::string& name) { return load_run_config(fixture_path(name)); }

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"circle",      "ellipse",    "squircle", "hemisphere", "prolate_cap",
                                                 "oblate_cap", "cylinder",   "dumbbell", "u_shape"};
  return names;
}

std::vector<std::string> convex_fixture_names() {
  std::vector<std::string> out;
  for (const auto& n : fixture_names())
    if (load_fixture(n).totally_convex) out.push_back(n);
  return out;
}

std::vector<Vec2> interior_points(const BoundaryCurve& c, int count, unsigned seed) {
  const auto& w = c.working_samples();
  Vec2 lo = w[0], hi = w[0];
  for (const auto& x : w) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  if (c.deck().norm() > 0) {
    // Cylinder: the band between the boundary and the top of the chart.
    hi.y() = c.surface().domain().v_max;
    hi.x() = lo.x() + c.deck().x();
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  std::vector<Vec2> out;
  while (static_cast<int>(out.size()) < count) {
    Vec2 x(ux(rng), uy(rng));
    if (c.level(x) < -1e-3 && c.surface().working_contains(x, -1e-3)) out.push_back(x);
  }
  return out;
}

const PairField& Workspace::field(int n) {
  auto it = fields_.find(n);
  if (it == fields_.end()) it = fields_.emplace(n, geo->field(n)).first;
  return it->second;
}

const ScanResult& Workspace::scan() {
  if (!scan_) scan_ = std::make_unique<ScanResult>(scan_critical_pairs(*geo, field(config.grid.scan)));
  return *scan_;
}

Workspace& workspace(const std::string& name) {
  static std::map<std::string, std::unique_ptr<Workspace>> cache;
  auto& slot = cache[name];
  if (!slot) {
    const RunConfig config = load_fixture(name);
    slot.reset(new Workspace{config, build_curve(config), nullptr});
    slot->geo = std::make_unique<BoundaryGeodesics>(slot->curve, config.totally_convex, config.step_scale,
                                                    config.len_window);
  }
  return *slot;
}

}  // namespace widthlab::testing
