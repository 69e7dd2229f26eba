#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fgmm/types.hpp"

namespace fgmm::harness {

using Rgb = std::array<std::uint8_t, 3>;

/// Eight evenly spaced stops of the viridis map, 0 -> 1.
inline constexpr std::array<Rgb, 8> viridis_stops = {{
    {0x44, 0x01, 0x54},
    {0x46, 0x32, 0x7e},
    {0x36, 0x5c, 0x8d},
    {0x27, 0x7f, 0x8e},
    {0x1f, 0xa1, 0x87},
    {0x4a, 0xc1, 0x6d},
    {0xa0, 0xda, 0x39},
    {0xfd, 0xe7, 0x25},
}};

/// Piecewise-linear interpolation between the stops; t is clamped to [0, 1].
Rgb ramp_color(double t);
std::string hex_color(const Rgb& c);

struct Heatmap {
  std::vector<double> x;  // column coordinates
  std::vector<double> y;  // row coordinates
  Matrixd values;         // rows follow y, columns follow x
  std::string title;
  std::string x_label;
  std::string y_label;
  double vmin = 0.0;
  double vmax = 1.0;
};

/// Standalone SVG: one rect per cell (y grows upward), axis ticks and a
/// colour bar.
std::string render_svg(const Heatmap& map);

}  // namespace fgmm::harness
