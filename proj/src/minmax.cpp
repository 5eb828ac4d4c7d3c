#include "widthlab/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

namespace widthlab {

namespace {

// One endpoint moves, or both move together; y - x changes by at most one.
constexpr int kMoves[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}};

// Quotient of the strip by the deck shift (x, y) -> (x + n, y + n):
// node (x mod n, k = y - x) with 0 <= k <= n.
struct Strip {
  const DistanceField& f;
  int n;
  explicit Strip(const DistanceField& field) : f(field), n(field.n) {}
  int size() const { return n * (n + 1); }
  int id(int x, int k) const { return k * n + ((x % n) + n) % n; }
  int x_of(int id) const { return id % n; }
  int k_of(int id) const { return id / n; }
  double value(int id) const { return f.at(x_of(id), x_of(id) + k_of(id)); }
};

}  // namespace

DistanceField distance_field(const BoundaryGeodesics& g, int n) {
  if (n < 8) throw std::invalid_argument("distance field needs at least 8 samples");
  if (g.curve().size() % n != 0) throw std::invalid_argument("field size must divide the curve sample count");
  return distance_field(g.field(n));
}

DistanceField distance_field(const PairField& p) {
  DistanceField f;
  f.n = p.n;
  f.length = p.length;
  f.d = p.d;
  return f;
}

DistanceField downsample(const DistanceField& f, int m) {
  if (m <= 0 || f.n % m != 0) throw std::invalid_argument("downsampled size must divide the field size");
  const int step = f.n / m;
  DistanceField out;
  out.n = m;
  out.length = f.length;
  out.d.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.d[static_cast<std::size_t>(i) * m + j] = f.at(i * step, j * step);
  return out;
}

WidthResult width_minmax(const DistanceField& f) {
  const Strip st(f);
  const int V = st.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(V, inf);
  std::vector<int> pred(V, -1), move(V, -1);
  std::vector<char> done(V, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (int x = 0; x < st.n; ++x) {
    const int id = st.id(x, 0);
    best[id] = st.value(id);
    queue.emplace(best[id], id);
  }
  int end = -1;
  while (!queue.empty()) {
    const auto [b, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (st.k_of(u) == st.n) {
      end = u;
      break;
    }
    const int x = st.x_of(u), k = st.k_of(u);
    for (int m = 0; m < 6; ++m) {
      const int dx = kMoves[m][0], dy = kMoves[m][1];
      const int k2 = k + dy - dx;
      if (k2 < 0 || k2 > st.n) continue;
      const int v = st.id(x + dx, k2);
      const double nb = std::max(b, st.value(v));
      if (nb < best[v]) {
        best[v] = nb;
        pred[v] = u;
        move[v] = m;
        queue.emplace(nb, v);
      }
    }
  }
  WidthResult r;
  r.S = best[end];
  std::vector<int> chain;
  for (int v = end; v != -1; v = pred[v]) chain.push_back(v);
  std::reverse(chain.begin(), chain.end());
  long x = st.x_of(chain.front()), y = x;
  r.optimal.lift.emplace_back(x, y);
  for (std::size_t i = 1; i < chain.size(); ++i) {
    x += kMoves[move[chain[i]]][0];
    y += kMoves[move[chain[i]]][1];
    r.optimal.lift.emplace_back(x, y);
  }
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (st.value(chain[i]) == r.S) {
      r.argmax_step = i;
      break;
    }
  }
  const auto& [ax, ay] = r.optimal.lift[r.argmax_step];
  r.argmax_pair = f.pair(static_cast<int>(ax % f.n), static_cast<int>(ay % f.n));
  return r;
}

double width_threshold(const DistanceField& f) {
  const Strip st(f);
  const int V = st.size();
  std::vector<double> levels;
  levels.reserve(V);
  for (int id = 0; id < V; ++id) levels.push_back(st.value(id));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<char> seen(V);
  std::vector<int> stack;
  auto connects = [&](double t) {
    std::fill(seen.begin(), seen.end(), 0);
    stack.clear();
    for (int x = 0; x < st.n; ++x) {
      const int id = st.id(x, 0);
      if (st.value(id) <= t) {
        seen[id] = 1;
        stack.push_back(id);
      }
    }
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (st.k_of(u) == st.n) return true;
      const int x = st.x_of(u), k = st.k_of(u);
      for (const auto& mv : kMoves) {
        const int k2 = k + mv[1] - mv[0];
        if (k2 < 0 || k2 > st.n) continue;
        const int v = st.id(x + mv[0], k2);
        if (!seen[v] && st.value(v) <= t) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return false;
  };
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (connects(levels[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return levels[lo];
}

double brute_force_width(const DistanceField& f, bool monotone) {
  if (f.n > 12) throw std::invalid_argument("brute force width is limited to 12 samples");
  const Strip st(f);
  const int V = st.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> B(static_cast<std::size_t>(V) * V, inf);
  auto at = [&](int u, int v) -> double& { return B[static_cast<std::size_t>(u) * V + v]; };
  for (int u = 0; u < V; ++u) {
    at(u, u) = st.value(u);
    const int x = st.x_of(u), k = st.k_of(u);
    for (const auto& mv : kMoves) {
      const int k2 = k + mv[1] - mv[0];
      if (k2 < 0 || k2 > st.n || (monotone && k2 < k)) continue;
      const int v = st.id(x + mv[0], k2);
      at(u, v) = std::min(at(u, v), std::max(st.value(u), st.value(v)));
    }
  }
  for (int w = 0; w < V; ++w)
    for (int u = 0; u < V; ++u) {
      const double uw = at(u, w);
      if (uw == inf) continue;
      for (int v = 0; v < V; ++v) at(u, v) = std::min(at(u, v), std::max(uw, at(w, v)));
    }
  double S = inf;
  for (int a = 0; a < st.n; ++a)
    for (int b = 0; b < st.n; ++b) S = std::min(S, at(st.id(a, 0), st.id(b, st.n)));
  return S;
}

double sweepout_max(const DistanceField& f, const Sweepout& w) {
  double m = 0.0;
  for (const auto& [x, y] : w.lift) m = std::max(m, f.at(static_cast<int>(x % f.n), static_cast<int>(y % f.n)));
  return m;
}

bool is_valid_sweepout(const Sweepout& w, int n) {
  if (w.lift.empty()) return false;
  if (w.lift.front().first != w.lift.front().second) return false;
  if (w.lift.back().second - w.lift.back().first != n) return false;
  for (std::size_t i = 0; i < w.lift.size(); ++i) {
    const long k = w.lift[i].second - w.lift[i].first;
    if (k < 0 || k > n) return false;
    if (i == 0) continue;
    const long dx = w.lift[i].first - w.lift[i - 1].first, dy = w.lift[i].second - w.lift[i - 1].second;
    if (std::abs(dx) > 1 || std::abs(dy) > 1 || (dx == 0 && dy == 0) || dx == -dy) return false;
  }
  return true;
}

Diameter diameter(const DistanceField& f) {
  Diameter r;
  for (int i = 0; i < f.n; ++i)
    for (int j = i + 1; j < f.n; ++j)
      if (f.at(i, j) > r.diam) {
        r.diam = f.at(i, j);
        r.i = i;
        r.j = j;
      }
  r.pair = f.pair(r.i, r.j);
  return r;
}

ConstantWidthTest constant_width_test(const DistanceField& f, double diam) {
  const int n = f.n;
  const double gap = 1e-3;
  ConstantWidthTest t;
  t.phi.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    int arg = i;
    for (int j = 0; j < n; ++j)
      if (f.at(i, j) > f.at(i, arg)) arg = j;
    t.phi[i] = arg;
    const double top = f.at(i, arg);
    // The near-maximal samples must form one cyclic run around the argmax.
    int runs = 0;
    for (int j = 0; j < n; ++j) {
      const bool in = f.at(i, j) >= (1 - gap) * top;
      const bool prev = f.at(i, j - 1) >= (1 - gap) * top;
      if (in && !prev) ++runs;
    }
    if (runs > 1) t.unique_farthest = false;
    if (top < diam * (1 - gap)) t.attains_diameter = false;
  }
  int winding = 0;
  for (int i = 0; i < n; ++i) {
    const int step = ((t.phi[(i + 1) % n] - t.phi[i]) % n + n) % n;
    if (step >= n / 2) t.monotone = false;
    winding += step;
  }
  if (winding != n) t.monotone = false;
  return t;
}

CriticalityReport classify_width_pair(const BoundaryGeodesics& g, const PairPoint& pp, PairPoint* refined,
                                      bool* polished) {
  PairPoint where = pp;
  bool moved = false;
  CriticalityReport r = classify_pair(g, pp, false);
  if (r.verdict != Verdict::kCritical && !g.curve().rotationally_symmetric()) {
    if (auto p = polish_critical_pair(g, pp)) {
      where = *p;
      moved = true;
      r = classify_pair(g, where, false);
    }
  }
  if (refined) *refined = where;
  if (polished) *polished = moved;
  return r;
}

Relations relations_report(const BoundaryGeodesics& g, const DistanceField& f, const WidthResult& w,
                           const ScanResult& scan) {
  Relations r;
  const double L = f.length;
  const double tol = 1e-6;
  r.S = w.S;
  r.length = L;
  const Diameter dm = diameter(f);
  r.diam = dm.diam;
  r.S_below_diam = r.S <= r.diam + tol;
  r.diam_below_half = r.diam <= 0.5 * L + tol;
  r.chain_holds = r.S_below_diam && r.diam_below_half;
  r.constant_width = constant_width_test(f, r.diam);
  for (int i = 0; i < f.n; ++i)
    for (int j = i + 1; j < f.n; ++j)
      r.arc_deviation = std::max(r.arc_deviation, std::abs(f.at(i, j) - intrinsic_distance(L, f.s(i), f.s(j))));
  r.arcs_minimize = r.arc_deviation <= 1e-4 * L;
  r.S_is_half_length = std::abs(r.S - 0.5 * L) <= 1e-3 * L;
  if (r.diam >= 0.5 * L - 1e-6 * L) {
    const auto ks = g.minimizers(dm.pair.s1, dm.pair.s2);
    int half = 0;
    for (const Connector& k : ks)
      if (std::abs(k.length - 0.5 * L) <= 1e-6 * L) ++half;
    r.half_length_pair_has_two_arcs = half >= 2;
  }
  r.critical_components = static_cast<int>(scan.components.size());
  bool covers = false;
  if (scan.components.size() == 1) {
    std::set<int> touched;
    for (const auto& [i, j] : scan.components.front().cells) {
      touched.insert(i);
      touched.insert(j);
    }
    covers = static_cast<int>(touched.size()) == scan.grid;
  }
  if (covers)
    r.critical_set = "circle of critical points";
  else if (scan.components.size() == 2)
    r.critical_set = "two critical points";
  else
    r.critical_set = std::to_string(scan.components.size()) + " critical components";
  r.min_component_distance = std::numeric_limits<double>::infinity();
  for (const auto& c : scan.components) r.min_component_distance = std::min(r.min_component_distance, c.report.distance);
  if (scan.components.empty()) r.min_component_distance = 0.0;
  r.width_pair_report = classify_width_pair(g, w.argmax_pair, &r.width_pair, &r.width_pair_polished);
  return r;
}

}  // namespace widthlab
