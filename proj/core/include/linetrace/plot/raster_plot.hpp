// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "linetrace/imaging/image.hpp"

namespace linetrace::plot {

using Color = std::array<std::uint8_t, 3>;

inline constexpr Color kBlue{31, 119, 180};
inline constexpr Color kOrange{255, 127, 14};
inline constexpr Color kGreen{44, 160, 44};
inline constexpr Color kRed{214, 39, 40};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  Color color = kBlue;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Non-finite points are skipped. Throws ShapeError when x and y differ in
/// length.
imaging::RgbImage render_line_chart(const LineChart& chart, int width = 800, int height = 500);

/// Charts tiled row-major into a grid of `cols` columns.
imaging::RgbImage render_panels(const std::vector<LineChart>& charts, int cols, int panel_width = 640,
                                int panel_height = 400);

struct HeatmapChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::vector<double>> cells;  ///< [row][col], row 0 drawn at the top
  double x_min = 0.0, x_max = 1.0;         ///< axis tick range for columns
  double y_min = 0.0, y_max = 1.0;         ///< axis tick range for rows, top to bottom
};

imaging::RgbImage render_heatmap(const HeatmapChart& chart, int width = 700, int height = 600);

/// Draws ASCII text with a 5x7 bitmap font (letters render in upper case).
void draw_text(imaging::RgbImage& img, int x, int y, const std::string& text, Color color, int scale = 1);

}  // namespace linetrace::plot
