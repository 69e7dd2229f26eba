#include "fgmm/harness/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fgmm::harness {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// About six evenly spaced tick indices including both ends.
std::vector<std::size_t> ticks(std::size_t count) {
  std::vector<std::size_t> out;
  if (count == 0) return out;
  const std::size_t stride = std::max<std::size_t>(1, (count + 4) / 5);
  for (std::size_t i = 0; i < count; i += stride) out.push_back(i);
  if (out.back() != count - 1) out.push_back(count - 1);
  return out;
}

}  // namespace

Rgb ramp_color(double t) {
  if (std::isnan(t)) t = 0;
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * double(viridis_stops.size() - 1);
  const std::size_t lo = std::min<std::size_t>(std::size_t(pos), viridis_stops.size() - 2);
  const double frac = pos - double(lo);
  Rgb out;
  for (int c = 0; c < 3; ++c) {
    const double a = viridis_stops[lo][c], b = viridis_stops[lo + 1][c];
    out[c] = std::uint8_t(std::lround(a + (b - a) * frac));
  }
  return out;
}

std::string hex_color(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

std::string render_svg(const Heatmap& map) {
  const std::size_t nx = map.x.size(), ny = map.y.size();
  require(Index(ny) == map.values.rows() && Index(nx) == map.values.cols(), "render_svg: values do not match axes");
  const double cell = std::clamp(480.0 / double(std::max<std::size_t>({nx, ny, 1})), 4.0, 40.0);
  const double left = 70, top = 40, plot_w = cell * double(nx), plot_h = cell * double(ny);
  const double bar_x = left + plot_w + 30, width = bar_x + 80, height = top + plot_h + 60;
  const double span = map.vmax > map.vmin ? map.vmax - map.vmin : 1.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width, 6) << "\" height=\"" << num(height, 6)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(left + plot_w / 2, 6) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
      << escape(map.title) << "</text>\n";
  svg << "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t r = 0; r < ny; ++r) {
    for (std::size_t c = 0; c < nx; ++c) {
      const double v = map.values(Index(r), Index(c));
      const double px = left + cell * double(c);
      const double py = top + plot_h - cell * double(r + 1);
      svg << "<rect x=\"" << num(px, 6) << "\" y=\"" << num(py, 6) << "\" width=\"" << num(cell, 6)
          << "\" height=\"" << num(cell, 6) << "\" fill=\"" << hex_color(ramp_color((v - map.vmin) / span))
          << "\"><title>" << num(map.x[c], 4) << ", " << num(map.y[r], 4) << ": " << num(v, 4)
          << "</title></rect>\n";
    }
  }
  svg << "</g>\n";
  svg << "<rect x=\"" << num(left, 6) << "\" y=\"" << num(top, 6) << "\" width=\"" << num(plot_w, 6)
      << "\" height=\"" << num(plot_h, 6) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (std::size_t c : ticks(nx)) {
    const double px = left + cell * (double(c) + 0.5);
    svg << "<text x=\"" << num(px, 6) << "\" y=\"" << num(top + plot_h + 15, 6) << "\" text-anchor=\"middle\">"
        << num(map.x[c]) << "</text>\n";
  }
  for (std::size_t r : ticks(ny)) {
    const double py = top + plot_h - cell * (double(r) + 0.5);
    svg << "<text x=\"" << num(left - 6, 6) << "\" y=\"" << num(py + 4, 6) << "\" text-anchor=\"end\">"
        << num(map.y[r]) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + plot_w / 2, 6) << "\" y=\"" << num(top + plot_h + 38, 6)
      << "\" text-anchor=\"middle\">" << escape(map.x_label) << "</text>\n";
  svg << "<text transform=\"translate(18," << num(top + plot_h / 2, 6)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(map.y_label) << "</text>\n";

  // colour bar, one band per ramp segment plus the end labels
  svg << "<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n";
  for (std::size_t i = 0; i < viridis_stops.size(); ++i)
    svg << "<stop offset=\"" << num(double(i) / double(viridis_stops.size() - 1), 4) << "\" stop-color=\""
        << hex_color(viridis_stops[i]) << "\"/>\n";
  svg << "</linearGradient></defs>\n";
  svg << "<rect x=\"" << num(bar_x, 6) << "\" y=\"" << num(top, 6) << "\" width=\"16\" height=\"" << num(plot_h, 6)
      << "\" fill=\"url(#ramp)\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << num(bar_x + 22, 6) << "\" y=\"" << num(top + 8, 6) << "\">" << num(map.vmax) << "</text>\n";
  svg << "<text x=\"" << num(bar_x + 22, 6) << "\" y=\"" << num(top + plot_h, 6) << "\">" << num(map.vmin)
      << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fgmm::harness
