#include "nntopo/heatmap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nntopo {

namespace {

constexpr int kCell = 36;
constexpr int kMargin = 64;

// Low end is a pale blue, high end a dark blue.
constexpr std::array<double, 3> kLow = {247, 251, 255};
constexpr std::array<double, 3> kHigh = {8, 48, 107};

std::string color_for(double value, const HeatmapScale& s) {
  double t = (value - s.min) / (s.max - s.min);
  t = std::clamp(t, 0.0, 1.0);
  std::array<int, 3> rgb{};
  for (std::size_t c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(kLow[c] + t * (kHigh[c] - kLow[c])));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

HeatmapScale heatmap_scale(const CsvMatrix& m) {
  bool seen = false;
  HeatmapScale s;
  for (const auto& cell : m.cells) {
    if (!cell) continue;
    if (!seen) {
      s.min = s.max = *cell;
      seen = true;
    } else {
      s.min = std::min(s.min, *cell);
      s.max = std::max(s.max, *cell);
    }
  }
  if (!seen || s.min == s.max) return {0.0, 1.0};
  return s;
}

std::string render_heatmap_svg(const CsvMatrix& m, const std::string& title) {
  const auto scale = heatmap_scale(m);
  const int l = static_cast<int>(m.size());
  const int grid = l * kCell;
  const int width = kMargin + grid + 16;
  const int height = kMargin + grid + 48;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  if (!title.empty()) {
    svg << "<title>" << escape(title) << "</title>\n";
  }
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";

  for (int c = 0; c < l; ++c) {
    svg << "<text class=\"col-label\" x=\"" << kMargin + c * kCell + kCell / 2
        << "\" y=\"" << kMargin - 8 << "\" text-anchor=\"middle\">"
        << escape(m.names[static_cast<std::size_t>(c)]) << "</text>\n";
  }
  for (int r = 0; r < l; ++r) {
    svg << "<text class=\"row-label\" x=\"" << kMargin - 8 << "\" y=\""
        << kMargin + r * kCell + kCell / 2 + 4 << "\" text-anchor=\"end\">"
        << escape(m.names[static_cast<std::size_t>(r)]) << "</text>\n";
  }

  for (int r = 0; r < l; ++r) {
    for (int c = 0; c < l; ++c) {
      const auto& cell = m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      if (!cell) continue;
      svg << "<rect class=\"cell\" x=\"" << kMargin + c * kCell << "\" y=\""
          << kMargin + r * kCell << "\" width=\"" << kCell << "\" height=\"" << kCell
          << "\" fill=\"" << color_for(*cell, scale) << "\"><title>"
          << escape(m.names[static_cast<std::size_t>(r)]) << ','
          << escape(m.names[static_cast<std::size_t>(c)]) << ' '
          << format_decimal(*cell) << "</title></rect>\n";
    }
  }

  const int legend_y = kMargin + grid + 24;
  svg << "<text class=\"scale\" x=\"" << kMargin << "\" y=\"" << legend_y
      << "\">min " << format_decimal(scale.min) << " (" << color_for(scale.min, scale)
      << ")  max " << format_decimal(scale.max) << " ("
      << color_for(scale.max, scale) << ")</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace nntopo
