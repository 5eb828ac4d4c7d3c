#pragma once

#include <json.hpp>
#include <string>

#include "widthlab/curve.hpp"
#include "widthlab/surface.hpp"

namespace widthlab {

struct GridSizes {
  int samples = 512;   // boundary samples
  int pairs = 256;     // distance field size N
  int scan = 128;      // critical-pair scan resolution
  int fbg_scan = 64;   // free-boundary geodesic scan
};

struct BirkhoffOptions {
  double from = 0.0;  // start, as a fraction of L
  double to = 0.5;    // end, as a fraction of L
  int segments = 8;
  double bend = 0.0;  // opposite sideways offsets of the two inner vertices, chart units
  int max_iters = 20000;
};

struct RunConfig {
  std::string name;
  SurfaceChart surface;
  CurveSpec curve;
  bool totally_convex = false;
  GridSizes grid;
  double step_scale = 1e-3;  // geodesic step as a fraction of the working diameter
  double len_window = 1e-4;  // relative window for minimizer multiplicity
  std::string output;
  BirkhoffOptions birkhoff;
  int render_frames = 6;
};

RunConfig parse_run_config(const nlohmann::json& doc, const std::string& default_name = "run");
RunConfig load_run_config(const std::string& path);

BoundaryCurve build_curve(const RunConfig& config);

}  // namespace widthlab
