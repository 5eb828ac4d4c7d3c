#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <ostream>

#include "widthlab/birkhoff.hpp"
#include "widthlab/config.hpp"
#include "widthlab/minmax.hpp"
#include "widthlab/planar.hpp"
#include "widthlab/render.hpp"

namespace widthlab::cli {

namespace {

using ojson = nlohmann::ordered_json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

// Rounded to 9 significant digits so that JSON and CSV agree.
double r9(double x) { return std::isfinite(x) ? std::stod(num(x)) : x; }

struct Options {
  std::string command;
  std::string config;
  std::string out;
  int grid = 0;
  long seed = 0;
  bool json = false;
  double from = std::numeric_limits<double>::quiet_NaN();
  double to = std::numeric_limits<double>::quiet_NaN();
};

// Lazily computed pieces shared by the commands of one run.
class Session {
 public:
  Session(const Options& o) : opts_(o), config_(load_run_config(o.config)), curve_(build_curve(config_)) {
    if (o.grid) {
      if (o.grid < 8 || o.grid > 4096) throw ConfigError("--grid", "must lie in [8, 4096]");
      config_.grid.pairs = o.grid;
    }
    out_dir_ = o.out.empty() ? config_.output : o.out;
  }

  const RunConfig& config() const { return config_; }
  const BoundaryCurve& curve() const { return curve_; }
  double length() const { return curve_.length(); }

  const BoundaryGeodesics& geo() {
    if (!geo_)
      geo_ = std::make_unique<BoundaryGeodesics>(curve_, config_.totally_convex, config_.step_scale,
                                                 config_.len_window);
    return *geo_;
  }
  const PairField& field(int n) {
    auto it = fields_.find(n);
    if (it == fields_.end()) it = fields_.emplace(n, geo().field(n)).first;
    return it->second;
  }
  const DistanceField& distances() {
    if (!distances_) distances_ = distance_field(field(config_.grid.pairs));
    return *distances_;
  }
  const WidthResult& width() {
    if (!width_) width_ = width_minmax(distances());
    return *width_;
  }
  const ScanResult& scan() {
    if (!scan_) scan_ = scan_critical_pairs(geo(), field(config_.grid.scan));
    return *scan_;
  }
  const StarCheck& star() {
    if (!star_) star_ = property_star_check(geo(), std::max(64, config_.grid.fbg_scan));
    return *star_;
  }

  std::string file(const std::string& name) {
    std::filesystem::create_directories(out_dir_);
    return (std::filesystem::path(out_dir_) / name).string();
  }

 private:
  Options opts_;
  RunConfig config_;
  BoundaryCurve curve_;
  std::string out_dir_;
  std::unique_ptr<BoundaryGeodesics> geo_;
  std::map<int, PairField> fields_;
  std::optional<DistanceField> distances_;
  std::optional<WidthResult> width_;
  std::optional<ScanResult> scan_;
  std::optional<StarCheck> star_;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("--out", "cannot write '" + path + "'");
  f << text;
}

ojson pair_json(const PairPoint& p) { return ojson::array({r9(p.s1), r9(p.s2)}); }

ojson connector_json(const Connector& k) {
  return {{"length", r9(k.length)},
          {"alpha", r9(k.alpha)},
          {"sigma_p", r9(k.sigma_p)},
          {"sigma_q", r9(k.sigma_q)},
          {"boundary_arc", k.boundary_arc}};
}

ojson report_json(const CriticalityReport& r) {
  ojson j = {{"pair", pair_json(r.pair)}, {"distance", r9(r.distance)}, {"verdict", to_string(r.verdict)}};
  j["minimizers"] = ojson::array();
  for (const Connector& k : r.connectors) j["minimizers"].push_back(connector_json(k));
  if (r.verdict == Verdict::kRegular) {
    j["direction"] = ojson::array({r9(r.direction.x()), r9(r.direction.y())});
    j["margin"] = r9(r.margin);
  } else {
    j["witness"] = ojson::array();
    for (const auto& [i, wt] : r.witness) j["witness"].push_back(ojson::array({i, r9(wt)}));
  }
  j["free_boundary"] = r.free_boundary;
  j["simultaneously_stationary"] = r.simultaneously_stationary;
  if (r.simultaneously_stationary) j["stationary_c"] = r9(r.stationary_c);
  j["boundary_arc_pair"] = r.boundary_arc_pair;
  j["trivial"] = r.trivial;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

ojson index_json(const IndexResult& ix) {
  ojson ev = ojson::array();
  for (double l : ix.eigenvalues) ev.push_back(r9(l));
  return {{"eigenvalues", ev},
          {"index", ix.index},
          {"nullity", ix.nullity},
          {"eps", r9(ix.eps)},
          {"A_start", r9(ix.A_start)},
          {"A_end", r9(ix.A_end)},
          {"rayleigh_constant", r9(ix.rayleigh_constant)}};
}

ojson star_json(const StarCheck& st) {
  ojson list = ojson::array();
  for (std::size_t i = 0; i < st.geodesics.size(); ++i) {
    const auto& f = st.geodesics[i];
    list.push_back({{"s1", r9(f.s1)},
                    {"s2", r9(f.s2)},
                    {"length", r9(f.length)},
                    {"family", f.family},
                    {"index", index_json(st.indices[i])}});
  }
  return {{"holds", st.holds}, {"geodesics", list}, {"witnesses", st.witnesses}};
}

ojson scan_json(const ScanResult& scan) {
  ojson comps = ojson::array();
  for (const auto& c : scan.components) {
    ojson cells = ojson::array();
    for (const auto& [i, j] : c.cells) cells.push_back(ojson::array({i, j}));
    comps.push_back({{"location", pair_json(c.location)},
                     {"d_min", r9(c.d_min)},
                     {"d_max", r9(c.d_max)},
                     {"polished", c.polished},
                     {"cells", cells},
                     {"report", report_json(c.report)}});
  }
  return {{"grid", scan.grid}, {"flagged_cells", scan.flagged_cells}, {"components", comps}};
}

void emit(std::ostream& out, const Options& o, const ojson& j, const std::string& text) {
  if (o.json)
    out << j.dump(2) << '\n';
  else
    out << text;
}

int cmd_width(Session& s, const Options& o, std::ostream& out) {
  const DistanceField& f = s.distances();
  const WidthResult& w = s.width();
  std::string csv = "step,x,y,i,j,s1,s2,distance\n";
  for (std::size_t k = 0; k < w.optimal.lift.size(); ++k) {
    const auto [x, y] = w.optimal.lift[k];
    const int i = static_cast<int>(((x % f.n) + f.n) % f.n), j = static_cast<int>(((y % f.n) + f.n) % f.n);
    csv += std::to_string(k) + ',' + std::to_string(x) + ',' + std::to_string(y) + ',' + std::to_string(i) + ',' +
           std::to_string(j) + ',' + num(f.s(i)) + ',' + num(f.s(j)) + ',' + num(f.at(i, j)) + '\n';
  }
  const std::string path = s.file("sweepout.csv");
  write_file(path, csv);
  const ojson j = {{"command", "width"},         {"fixture", s.config().name}, {"grid", f.n},
                   {"length", r9(f.length)},     {"S", r9(w.S)},               {"argmax_pair", pair_json(w.argmax_pair)},
                   {"sweepout_csv", path}};
  emit(out, o, j, "S = " + num(w.S) + "\nL = " + num(f.length) + "\nsweepout: " + path + "\n");
  return kOk;
}

int cmd_diameter(Session& s, const Options& o, std::ostream& out) {
  const Diameter d = diameter(s.distances());
  const ojson j = {{"command", "diameter"}, {"fixture", s.config().name}, {"grid", s.distances().n},
                   {"diam", r9(d.diam)},    {"pair", pair_json(d.pair)}};
  emit(out, o, j, "diam = " + num(d.diam) + "\npair = " + num(d.pair.s1) + ", " + num(d.pair.s2) + "\n");
  return kOk;
}

int cmd_critical(Session& s, const Options& o, std::ostream& out) {
  const ScanResult& scan = s.scan();
  ojson j = scan_json(scan);
  j["fixture"] = s.config().name;
  const std::string path = s.file("critical.json");
  write_file(path, j.dump(2) + "\n");
  std::string text = "components = " + std::to_string(scan.components.size()) + "\n";
  for (const auto& c : scan.components)
    text += "  (" + num(c.location.s1) + ", " + num(c.location.s2) + ") d = " + num(c.report.distance) + " " +
            to_string(c.report.verdict) + "\n";
  text += "report: " + path + "\n";
  emit(out, o, j, text);
  return kOk;
}

int cmd_geodesic(Session& s, const Options& o, std::ostream& out) {
  if (std::isnan(o.from) || std::isnan(o.to)) throw ConfigError("--from/--to", "geodesic needs both endpoints");
  const auto ks = s.geo().minimizers(o.from, o.to);
  if (ks.empty()) throw NumericalError("no connector between the endpoints");
  std::string csv = "geodesic,node,u,v\n";
  ojson list = ojson::array();
  for (std::size_t g = 0; g < ks.size(); ++g) {
    const GeodesicPath p = s.geo().path(o.from, o.to, ks[g]);
    for (std::size_t k = 0; k < p.points.size(); ++k)
      csv += std::to_string(g) + ',' + std::to_string(k) + ',' + num(p.points[k].u) + ',' + num(p.points[k].v) + '\n';
    list.push_back(connector_json(ks[g]));
  }
  const std::string path = s.file("geodesic.csv");
  write_file(path, csv);
  const ojson j = {{"command", "geodesic"},  {"from", r9(o.from)},   {"to", r9(o.to)},
                   {"distance", r9(ks[0].length)}, {"minimizers", list}, {"path_csv", path}};
  emit(out, o, j,
       "d = " + num(ks[0].length) + "\nminimizers = " + std::to_string(ks.size()) + "\npaths: " + path + "\n");
  return kOk;
}

int cmd_birkhoff(Session& s, const Options& o, std::ostream& out) {
  BirkhoffOptions b = s.config().birkhoff;
  if (!std::isnan(o.from)) b.from = o.from;
  if (!std::isnan(o.to)) b.to = o.to;
  const BirkhoffResult r =
      birkhoff_shorten(s.curve(), birkhoff_start_path(s.curve(), b), b.segments, b.max_iters, s.config().step_scale);
  std::string csv = "iteration,length\n";
  for (std::size_t k = 0; k < r.trace.size(); ++k) csv += std::to_string(k) + ',' + num(r.trace[k]) + '\n';
  const std::string path = s.file("birkhoff_trace.csv");
  write_file(path, csv);
  const bool geo = r.outcome == BirkhoffResult::Outcome::kFreeBoundaryGeodesic;
  ojson j = {{"command", "birkhoff"},
             {"outcome", geo ? "free_boundary_geodesic" : "point"},
             {"iterations", r.iterations},
             {"length", r9(r.trace.back())},
             {"self_intersecting", r.self_intersecting},
             {"trace_csv", path}};
  std::string text = std::string("outcome = ") + (geo ? "free_boundary_geodesic" : "point") +
                     "\nlength = " + num(r.trace.back()) + "\niterations = " + std::to_string(r.iterations) + "\n";
  if (r.geodesic) {
    j["endpoints"] = ojson::array({r9(r.start_s), r9(r.end_s)});
    j["sigma"] = ojson::array({r9(r.geodesic->sigma_p), r9(r.geodesic->sigma_q)});
    text += "endpoints = " + num(r.start_s) + ", " + num(r.end_s) + "\n";
  }
  if (r.self_intersecting) text += "warning: the limit polyline intersects itself\n";
  text += "trace: " + path + "\n";
  emit(out, o, j, text);
  return kOk;
}

int cmd_fbg(Session& s, const Options& o, std::ostream& out) {
  const StarCheck& st = s.star();
  std::string csv = "id,s1,s2,length,family,index,nullity,lambda1,lambda2,lambda3,lambda4,lambda5,lambda6\n";
  std::string text;
  for (std::size_t i = 0; i < st.geodesics.size(); ++i) {
    const auto& f = st.geodesics[i];
    const auto& ix = st.indices[i];
    csv += std::to_string(i) + ',' + num(f.s1) + ',' + num(f.s2) + ',' + num(f.length) + ',' +
           (f.family ? "1" : "0") + ',' + std::to_string(ix.index) + ',' + std::to_string(ix.nullity);
    for (std::size_t k = 0; k < 6; ++k) csv += ',' + (k < ix.eigenvalues.size() ? num(ix.eigenvalues[k]) : "");
    csv += '\n';
    text += "  (" + num(f.s1) + ", " + num(f.s2) + ") length " + num(f.length) + " index " +
            std::to_string(ix.index) + (f.family ? " (rotational family)" : "") + "\n";
  }
  const std::string path = s.file("fbg.csv");
  write_file(path, csv);
  ojson j = star_json(st);
  j["command"] = "fbg";
  j["csv"] = path;
  emit(out, o, j,
       "free-boundary geodesics = " + std::to_string(st.geodesics.size()) + "\n" + text +
           "stable geodesics present = " + (st.holds ? "no" : "yes") + "\ntable: " + path + "\n");
  return kOk;
}

ojson planar_json(const BoundaryCurve& c, const DirectionalWidthTable& t) {
  const PlanarWidth p = planar_width_diameter(c, t);
  ojson j = {{"w", r9(p.w)}, {"diam", r9(p.diam)}, {"argmin", r9(p.argmin)}, {"argmax", r9(p.argmax)}};
  const auto& A = c.curvature();
  if (*std::min_element(A.begin(), A.end()) >= -1e-8) {
    const CauchyCrofton cc = cauchy_crofton_check(c, t, p.w);
    j["cauchy_crofton"] = {{"integral", r9(cc.integral)}, {"two_L", r9(cc.two_L)},   {"error", r9(cc.error)},
                           {"ratio", r9(cc.ratio)},       {"ratio_ok", cc.ratio_ok}, {"equality", cc.equality}};
  } else {
    j["cauchy_crofton"] = nullptr;  // non-convex curve
  }
  return j;
}

int cmd_planar(Session& s, const Options& o, std::ostream& out) {
  const DirectionalWidthTable t = width_table(s.curve(), 4096);
  std::string csv = "theta,w\n";
  for (std::size_t i = 0; i < t.thetas.size(); ++i) csv += num(t.thetas[i]) + ',' + num(t.w[i]) + '\n';
  const std::string path = s.file("width_table.csv");
  write_file(path, csv);
  ojson j = planar_json(s.curve(), t);
  j["table_csv"] = "width_table.csv";  // relative to the output directory
  write_file(s.file("planar.json"), j.dump(2) + "\n");
  j["table_csv"] = path;
  std::string text = "w = " + num(j["w"].get<double>()) + "\ndiam = " + num(j["diam"].get<double>()) + "\n";
  if (!j["cauchy_crofton"].is_null())
    text += "integral of w = " + num(j["cauchy_crofton"]["integral"].get<double>()) +
            "\n2L = " + num(j["cauchy_crofton"]["two_L"].get<double>()) + "\n";
  text += "table: " + path + "\n";
  emit(out, o, j, text);
  return kOk;
}

int cmd_report(Session& s, const Options& o, std::ostream& out) {
  const WidthResult& w = s.width();
  const Relations rel = relations_report(s.geo(), s.distances(), w, s.scan());
  const auto& cw = rel.constant_width;
  ojson j = {{"fixture", s.config().name},
             {"surface", to_string(s.curve().surface().kind())},
             {"totally_convex", s.config().totally_convex},
             {"length", r9(rel.length)},
             {"grid", {{"pairs", s.distances().n}, {"scan", s.scan().grid}}},
             {"S", r9(rel.S)},
             {"diam", r9(rel.diam)},
             {"chain", {{"holds", rel.chain_holds}, {"S_below_diam", rel.S_below_diam}, {"diam_below_half", rel.diam_below_half}}},
             {"constant_width",
              {{"holds", cw.holds()},
               {"unique_farthest", cw.unique_farthest},
               {"attains_diameter", cw.attains_diameter},
               {"monotone", cw.monotone}}}};
  ojson half = {{"holds", rel.arcs_minimize && rel.S_is_half_length},
                {"arcs_minimize", rel.arcs_minimize},
                {"max_arc_deviation", r9(rel.arc_deviation)},
                {"S_is_half_length", rel.S_is_half_length}};
  if (rel.half_length_pair_has_two_arcs) half["diameter_pair_has_two_arcs"] = *rel.half_length_pair_has_two_arcs;
  j["half_length_width"] = half;
  j["critical"] = {{"components", rel.critical_components},
                   {"set", rel.critical_set},
                   {"min_component_distance", r9(rel.min_component_distance)}};
  j["width_pair"] = report_json(rel.width_pair_report);
  j["width_pair"]["refined"] = rel.width_pair_polished;
  if (s.config().totally_convex) {
    const StarCheck& st = s.star();
    j["free_boundary"] = star_json(st);
    const WidthRealization wr =
        width_realization(s.geo(), rel.S, rel.width_pair_report, st, 0.01 * rel.length);
    j["width_realization"] = {{"holds", wr.holds()},
                              {"index_one_minimizer", wr.index_one_minimizer},
                              {"stationary_pair", wr.stationary_pair}};
    if (wr.minimizer_index) j["width_realization"]["minimizer_index"] = wr.minimizer_index->index;
  }
  if (s.curve().plane()) {
    j["planar"] = planar_json(s.curve(), width_table(s.curve(), 4096));
    j["planar"]["S_minus_w"] = r9(rel.S - j["planar"]["w"].get<double>());
  }
  const std::string path = s.file("report.json");
  write_file(path, j.dump(2) + "\n");
  emit(out, o, j,
       "S = " + num(rel.S) + "\ndiam = " + num(rel.diam) + "\nL = " + num(rel.length) +
           "\ncritical set: " + rel.critical_set + "\nwidth pair: " + to_string(rel.width_pair_report.verdict) +
           "\nreport: " + path + "\n");
  return kOk;
}

int cmd_render(Session& s, const Options& o, std::ostream& out) {
  const std::string svg =
      render_svg(s.geo(), s.distances(), s.width(), find_free_boundary_geodesics(s.geo(), std::max(64, s.config().grid.fbg_scan)),
                 s.config().render_frames, s.config().name);
  const std::string path = s.file("render.svg");
  write_file(path, svg);
  emit(out, o, {{"command", "render"}, {"svg", path}, {"bytes", svg.size()}}, "figure: " + path + "\n");
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Min-max width, critical pairs and free-boundary geodesics of a boundary curve", "widthlab"};
  app.require_subcommand(1);
  Options o;
  std::string positional;
  auto common = [&](CLI::App* sub) {
    sub->add_option("config_file", positional, "Run configuration (JSON)");
    sub->add_option("--config", o.config, "Run configuration (JSON)");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--grid", o.grid, "Pair grid size N");
    sub->add_option("--seed", o.seed, "Reserved; no command is stochastic");
    sub->add_flag("--json", o.json, "Machine-readable output");
    return sub;
  };
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"width", "Min-max width S and the optimal sweepout"},
      {"diameter", "Largest boundary distance"},
      {"critical", "Critical-pair scan"},
      {"geodesic", "Minimizing geodesics between two boundary points"},
      {"birkhoff", "Free-boundary chord shortening"},
      {"fbg", "Free-boundary geodesics and their index"},
      {"planar", "Directional width table and Cauchy-Crofton check"},
      {"report", "Full relations report"},
      {"render", "SVG figure"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = common(app.add_subcommand(name, help));
    if (name == "geodesic" || name == "birkhoff") {
      sub->add_option("--from", o.from, name == "geodesic" ? "Start arclength" : "Start, as a fraction of L");
      sub->add_option("--to", o.to, name == "geodesic" ? "End arclength" : "End, as a fraction of L");
    }
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << ojson{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return kUsage;
  }
  o.command = app.get_subcommands().front()->get_name();
  if (o.config.empty()) o.config = positional;
  if (o.config.empty()) {
    err << ojson{{"error", "config"}, {"field", "--config"}, {"message", "no configuration given"}}.dump() << '\n';
    return kConfig;
  }

  try {
    Session s(o);
    if (o.command == "width") return cmd_width(s, o, out);
    if (o.command == "diameter") return cmd_diameter(s, o, out);
    if (o.command == "critical") return cmd_critical(s, o, out);
    if (o.command == "geodesic") return cmd_geodesic(s, o, out);
    if (o.command == "birkhoff") return cmd_birkhoff(s, o, out);
    if (o.command == "fbg") return cmd_fbg(s, o, out);
    if (o.command == "planar") return cmd_planar(s, o, out);
    if (o.command == "report") return cmd_report(s, o, out);
    if (o.command == "render") return cmd_render(s, o, out);
  } catch (const ConfigError& e) {
    err << ojson{{"error", "config"}, {"field", e.field()}, {"message", e.message()}}.dump() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    err << ojson{{"error", "config"}, {"field", ""}, {"message", e.what()}}.dump() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    err << ojson{{"error", "numerical"}, {"message", e.what()}}.dump() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace widthlab::cli
