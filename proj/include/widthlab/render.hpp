#pragma once

#include <string>
#include <vector>

#include "widthlab/birkhoff.hpp"
#include "widthlab/minmax.hpp"

namespace widthlab {

// SVG overlay of the curve, `frames` pairs along the optimal sweepout with
// their minimizers, the minimizers at the width level and the free-boundary
// geodesics.  Output depends only on the inputs (fixed number formatting).
std::string render_svg(const BoundaryGeodesics& g, const DistanceField& f, const WidthResult& w,
                       const std::vector<FreeBoundaryGeodesic>& fbg, int frames, const std::string& title);

}  // namespace widthlab
