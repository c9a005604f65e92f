#pragma once

#include <string>

#include "nntopo/report.hpp"

namespace nntopo {

struct HeatmapScale {
  double min = 0.0;
  double max = 1.0;
};

/// Data min/max over non-empty cells, falling back to [0, 1] when every
/// cell holds the same value (or there are none).
HeatmapScale heatmap_scale(const CsvMatrix& m);

/// One rect per non-empty cell, colored on a linear scale between the
/// scale's extremes; empty cells are not drawn. Layer names label both
/// axes and the min/max are printed under the grid.
std::string render_heatmap_svg(const CsvMatrix& m, const std::string& title = {});

}  // namespace nntopo
