// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data map: variability (x, fixed range [0, 0.5]) against confidence
// (y, fixed range [0, 1]), one circle per sample, filled by correctness bin.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "cartography/dynamics.hpp"
#include "cartography/error.hpp"
#include "cartography/text.hpp"

namespace cartography {

struct Margins {
  double top = 40;
  double right = 150;
  double bottom = 60;
  double left = 70;
};

struct MapStyle {
  int width_px = 800;
  int height_px = 600;
  double point_radius_px = 1.5;
  // One color per correctness bin 0..E. Empty selects default_palette(E).
  std::vector<std::string> palette;
  Margins margins;
};

struct PlotRect {
  double x0, y0, x1, y1;  // pixel bounds; y grows downward

  double x_of(double variability) const noexcept { return x0 + std::clamp(variability, 0.0, 0.5) / 0.5 * (x1 - x0); }
  double y_of(double confidence) const noexcept { return y1 - std::clamp(confidence, 0.0, 1.0) * (y1 - y0); }
};

inline PlotRect plot_rect(const MapStyle& style) noexcept {
  return {style.margins.left, style.margins.top, style.width_px - style.margins.right,
          style.height_px - style.margins.bottom};
}

// Red (never correct) through pale yellow to blue (always correct).
inline std::vector<std::string> default_palette(std::size_t epochs) {
  constexpr std::array<std::array<double, 3>, 3> stops = {{{215, 25, 28}, {255, 255, 191}, {44, 123, 182}}};
  std::vector<std::string> out;
  for (std::size_t k = 0; k <= epochs; ++k) {
    const double t = epochs == 0 ? 1.0 : static_cast<double>(k) / static_cast<double>(epochs);
    const std::size_t seg = t < 0.5 ? 0 : 1;
    const double u = seg == 0 ? t * 2 : (t - 0.5) * 2;
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c)
      rgb[c] = static_cast<int>(std::lround(stops[seg][c] + u * (stops[seg + 1][c] - stops[seg][c])));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    out.emplace_back(buf);
  }
  return out;
}

inline std::string xml_escape(std::string_view s) {
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

inline std::string render_map(const std::vector<TrainingDynamics>& dynamics, const MapStyle& style = {}) {
  if (style.width_px <= 0 || style.height_px <= 0 || !(style.point_radius_px > 0))
    throw UsageError("map dimensions and point radius must be positive");
  const PlotRect rect = plot_rect(style);
  if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0)) throw UsageError("margins leave no room for the plot");

  std::size_t epochs = 0;
  bool have_epochs = false;
  for (const auto& d : dynamics) {
    if (have_epochs && d.epochs != epochs)
      throw DataError("dynamics mix epoch counts " + std::to_string(epochs) + " and " + std::to_string(d.epochs));
    epochs = d.epochs;
    have_epochs = true;
  }
  if (!have_epochs && !style.palette.empty()) epochs = style.palette.size() - 1;
  const bool legend_entries = have_epochs || !style.palette.empty();
  const std::vector<std::string> palette = style.palette.empty() ? default_palette(epochs) : style.palette;
  if (palette.size() != epochs + 1)
    throw UsageError("palette has " + std::to_string(palette.size()) + " colors, need " + std::to_string(epochs + 1));

  const auto px = [](double v) { return text::format_fixed(v, 3); };
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  svg += "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" \"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width_px) +
         "\" height=\"" + std::to_string(style.height_px) + "\" viewBox=\"0 0 " + std::to_string(style.width_px) +
         ' ' + std::to_string(style.height_px) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(style.width_px) + "\" height=\"" +
         std::to_string(style.height_px) + "\" fill=\"#ffffff\"/>\n";

  // Axes and ticks.
  svg += "<g id=\"axes\" stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n";
  svg += "<rect x=\"" + px(rect.x0) + "\" y=\"" + px(rect.y0) + "\" width=\"" + px(rect.x1 - rect.x0) +
         "\" height=\"" + px(rect.y1 - rect.y0) + "\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double x = rect.x_of(i / 10.0);
    svg += "<line x1=\"" + px(x) + "\" y1=\"" + px(rect.y1) + "\" x2=\"" + px(x) + "\" y2=\"" + px(rect.y1 + 5) + "\"/>\n";
  }
  for (int i = 0; i <= 10; ++i) {
    const double y = rect.y_of(i / 10.0);
    svg += "<line x1=\"" + px(rect.x0 - 5) + "\" y1=\"" + px(y) + "\" x2=\"" + px(rect.x0) + "\" y2=\"" + px(y) + "\"/>\n";
  }
  svg += "</g>\n";
  svg += "<g id=\"tick-labels\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#000000\">\n";
  for (int i = 0; i <= 5; ++i)
    svg += "<text x=\"" + px(rect.x_of(i / 10.0)) + "\" y=\"" + px(rect.y1 + 18) + "\" text-anchor=\"middle\">" +
           text::format_fixed(i / 10.0, 1) + "</text>\n";
  for (int i = 0; i <= 10; ++i)
    svg += "<text x=\"" + px(rect.x0 - 8) + "\" y=\"" + px(rect.y_of(i / 10.0) + 4) + "\" text-anchor=\"end\">" +
           text::format_fixed(i / 10.0, 1) + "</text>\n";
  svg += "<text x=\"" + px((rect.x0 + rect.x1) / 2) + "\" y=\"" + px(rect.y1 + 40) +
         "\" text-anchor=\"middle\" font-size=\"13\">variability</text>\n";
  svg += "<text x=\"" + px(rect.x0 - 45) + "\" y=\"" + px((rect.y0 + rect.y1) / 2) + "\" text-anchor=\"middle\" " +
         "font-size=\"13\" transform=\"rotate(-90 " + px(rect.x0 - 45) + ' ' + px((rect.y0 + rect.y1) / 2) +
         ")\">confidence</text>\n";
  svg += "</g>\n";

  // Points, in input order.
  svg += "<g id=\"points\" stroke=\"none\">\n";
  const std::string radius = text::format_fixed(style.point_radius_px, 3);
  for (const auto& d : dynamics) {
    const std::size_t bin = std::min(d.correct_epochs(), epochs);
    svg += "<circle cx=\"" + px(rect.x_of(d.variability)) + "\" cy=\"" + px(rect.y_of(d.confidence)) + "\" r=\"" +
           radius + "\" fill=\"" + xml_escape(palette[bin]) + "\"/>\n";
  }
  svg += "</g>\n";

  // Legend, highest correctness first.
  const double lx = rect.x1 + 20;
  double ly = rect.y0 + 10;
  svg += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<text x=\"" + px(lx) + "\" y=\"" + px(ly) + "\" font-size=\"12\">correctness</text>\n";
  if (legend_entries) {
    for (std::size_t k = epochs + 1; k-- > 0;) {
      ly += 16;
      svg += "<rect x=\"" + px(lx) + "\" y=\"" + px(ly - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
             xml_escape(palette[k]) + "\"/>\n";
      svg += "<text x=\"" + px(lx + 16) + "\" y=\"" + px(ly) + "\">" + std::to_string(k) + '/' +
             std::to_string(epochs) + "</text>\n";
    }
  }
  svg += "</g>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace cartography
