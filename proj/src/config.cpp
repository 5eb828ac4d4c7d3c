#include "widthlab/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "widthlab/json_fields.hpp"

namespace widthlab {

using nlohmann::json;

namespace {

int bounded(FieldReader& r, const std::string& key, int fallback, int lo, int hi) {
  const int v = r.integer_or(key, fallback);
  if (v < lo || v > hi)
    throw ConfigError(r.path_of(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

}  // namespace

RunConfig parse_run_config(const json& doc, const std::string& default_name) {
  FieldReader r(doc, "");
  RunConfig c;
  c.name = r.text_or("name", default_name);
  c.surface = load_surface(r.required("surface"), "/surface");
  c.curve = load_curve_spec(r.required("curve"), "/curve");
  c.totally_convex = r.flag_or("totally_convex", false);
  if (const json* g = r.optional("grid")) {
    FieldReader gr(*g, "/grid");
    c.grid.samples = bounded(gr, "samples", c.grid.samples, 16, 8192);
    c.grid.pairs = bounded(gr, "pairs", c.grid.pairs, 8, 2048);
    c.grid.scan = bounded(gr, "scan", c.grid.scan, 32, 1024);
    c.grid.fbg_scan = bounded(gr, "fbg_scan", c.grid.fbg_scan, 64, 4096);
    gr.reject_unknown();
  }
  if (c.grid.samples % c.grid.pairs != 0) throw ConfigError("/grid/pairs", "must divide /grid/samples");
  if (c.grid.samples % c.grid.scan != 0) throw ConfigError("/grid/scan", "must divide /grid/samples");
  if (const json* t = r.optional("tolerances")) {
    FieldReader tr(*t, "/tolerances");
    c.step_scale = tr.positive_or("geodesic_step", c.step_scale);
    c.len_window = tr.positive_or("length_window", c.len_window);
    tr.reject_unknown();
  }
  c.output = r.text_or("output", "out/" + c.name);
  if (const json* b = r.optional("birkhoff")) {
    FieldReader br(*b, "/birkhoff");
    c.birkhoff.from = br.number_or("from", c.birkhoff.from);
    c.birkhoff.to = br.number_or("to", c.birkhoff.to);
    c.birkhoff.segments = bounded(br, "segments", c.birkhoff.segments, 2, 256);
    c.birkhoff.bend = br.number_or("bend", c.birkhoff.bend);
    c.birkhoff.max_iters = bounded(br, "max_iters", c.birkhoff.max_iters, 1, 1000000);
    br.reject_unknown();
  }
  if (const json* rd = r.optional("render")) {
    FieldReader rr(*rd, "/render");
    c.render_frames = bounded(rr, "frames", c.render_frames, 0, 64);
    rr.reject_unknown();
  }
  r.reject_unknown();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("malformed document: ") + e.what());
  }
  return parse_run_config(doc, std::filesystem::path(path).stem().string());
}

BoundaryCurve build_curve(const RunConfig& config) {
  return build_curve(config.curve, config.surface, config.grid.samples);
}

}  // namespace widthlab
