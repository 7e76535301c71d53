// SPDX-License-Identifier: Apache-2.0
#include "linetrace/plot/raster_plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "linetrace/error.hpp"

namespace linetrace::plot {

using imaging::RgbImage;

namespace {

// 5x7 glyphs, one string of 35 characters per glyph, '#' = ink.
const std::map<char, const char*>& font() {
  static const std::map<char, const char*> glyphs = {
      {'0', ".###.#...##..###.#.###..##...#.###."}, {'1', "..#...##....#....#....#....#...###."},
      {'2', ".###.#...#....#...#...#...#...#####"}, {'3', "#####...#...#.....#.....##...#.###."},
      {'4', "...#...##..#.#.#..#.#####...#....#."}, {'5', "#####.....####.....#....##...#.###."},
      {'6', "..##..#...#....####.#...##...#.###."}, {'7', "#####....#...#...#...#....#....#..."},
      {'8', ".###.#...##...#.###.#...##...#.###."}, {'9', ".###.#...##...#.####....#...#..##.."},
      {'A', ".###.#...##...#######...##...##...#"}, {'B', "####.#...##...#####.#...##...#####."},
      {'C', ".###.#...##....#....#....#...#.###."}, {'D', "###..#..#.#...##...##...##..#.###.."},
      {'E', "######....#....####.#....#....#####"}, {'F', "######....#....####.#....#....#...."},
      {'G', ".###.#...##....#.####...##...#.####"}, {'H', "#...##...##...#######...##...##...#"},
      {'I', ".###...#....#....#....#....#...###."}, {'J', "..###...#....#....#....##..#..##..."},
      {'K', "#...##..#.#.#..##...#.#..#..#.#...#"}, {'L', "#....#....#....#....#....#....#####"},
      {'M', "#...###.###.#.##.#.##...##...##...#"}, {'N', "#...##...###..##.#.##..###...##...#"},
      {'O', ".###.#...##...##...##...##...#.###."}, {'P', "####.#...##...#####.#....#....#...."},
      {'Q', ".###.#...##...##...##.#.##..#..##.#"}, {'R', "####.#...##...#####.#.#..#..#.#...#"},
      {'S', ".####.....#.....###.....#....#####."}, {'T', "#####..#....#....#....#....#....#.."},
      {'U', "#...##...##...##...##...##...#.###."}, {'V', "#...##...##...##...##...#.#.#...#.."},
      {'W', "#...##...##...##.#.##.#.##.#..#.#.."}, {'X', "#...##...#.#.#...#...#.#.#...##...#"},
      {'Y', "#...##...#.#.#...#....#....#....#.."}, {'Z', "#####....#...#...#...#...#....#####"},
      {'.', "..............................##..."}, {'-', "...............###................."},
      {'+', "......#....#..#####..#....#........"}, {'(', "...#...#...#....#....#.....#.....#."},
      {')', ".#.....#.....#....#....#...#...#..."}, {':', ".....##...##.......##...##........."},
      {'/', ".....#...#...#...#...#.....#......."},  {'_', "..............................#####"},
      {',', ".....................##....#...#..."}, {'%', "##...##..#...#...#...#...#..##...##"},
      {'=', "..........#####.....#####.........."}, {' ', "..................................."},
      {'x', ".....#...#.#.#...#...#.#.#...#....."}, {'e', "..........###.#...######....###...."},
      {'|', "..#....#....#....#....#....#....#.."}, {'<', "...#...#...#...#.....#.....#.....#."},
      {'>', ".#.....#.....#.....#...#...#...#..."}, {'*', "......#..#.#.#.###.#.#.#..#........"},
  };
  return glyphs;
}

void put(RgbImage& img, int x, int y, Color c) {
  if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
  img.set(x, y, c);
}

void fill_rect(RgbImage& img, int x0, int y0, int x1, int y1, Color c) {
  for (int y = std::max(0, y0); y < std::min(img.height(), y1); ++y)
    for (int x = std::max(0, x0); x < std::min(img.width(), x1); ++x) img.set(x, y, c);
}

void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, Color c, int thickness = 1) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    for (int t = 0; t < thickness; ++t)
      for (int u = 0; u < thickness; ++u) put(img, x0 + t - thickness / 2, y0 + u - thickness / 2, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

int text_width(const std::string& s, int scale) { return static_cast<int>(s.size()) * 6 * scale; }

std::string tick_label(double v) {
  char buf[32];
  if (v != 0.0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-3))
    std::snprintf(buf, sizeof buf, "%.1e", v);
  else
    std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Roughly five "nice" ticks covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

void draw_vertical_text(RgbImage& img, int x, int y, const std::string& text, Color c) {
  // Stacked characters, top to bottom.
  for (std::size_t i = 0; i < text.size(); ++i) draw_text(img, x, y + static_cast<int>(i) * 9, std::string(1, text[i]), c);
}

void draw_line_chart(RgbImage& img, int ox, int oy, int width, int height, const LineChart& chart) {
  const Color black{0, 0, 0}, grid{225, 225, 225};
  fill_rect(img, ox, oy, ox + width, oy + height, {255, 255, 255});
  const int left = ox + 70, right = ox + width - 20, top = oy + 30, bottom = oy + height - 45;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size()) throw ShapeError("line chart series '" + s.label + "': x and y differ in length");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return left + static_cast<int>(std::lround((x - xmin) / (xmax - xmin) * (right - left))); };
  auto py = [&](double y) { return bottom - static_cast<int>(std::lround((y - ymin) / (ymax - ymin) * (bottom - top))); };

  for (double t : nice_ticks(ymin, ymax)) {
    const int y = py(t);
    draw_line(img, left, y, right, y, grid);
    const std::string s = tick_label(t);
    draw_text(img, left - 6 - text_width(s, 1), y - 3, s, black);
  }
  for (double t : nice_ticks(xmin, xmax)) {
    const int x = px(t);
    draw_line(img, x, top, x, bottom, grid);
    const std::string s = tick_label(t);
    draw_text(img, x - text_width(s, 1) / 2, bottom + 6, s, black);
  }
  draw_line(img, left, top, left, bottom, black);
  draw_line(img, left, bottom, right, bottom, black);

  for (const auto& s : chart.series) {
    bool have = false;
    int lx = 0, ly = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        have = false;
        continue;
      }
      const int x = px(s.x[i]), y = py(s.y[i]);
      if (have) draw_line(img, lx, ly, x, y, s.color, 2);
      else put(img, x, y, s.color);
      lx = x;
      ly = y;
      have = true;
    }
  }

  draw_text(img, ox + (width - text_width(chart.title, 2)) / 2, oy + 8, chart.title, black, 2);
  draw_text(img, (left + right - text_width(chart.x_label, 1)) / 2, bottom + 22, chart.x_label, black);
  draw_vertical_text(img, ox + 8, top + 10, chart.y_label, black);

  int ly = top + 6;
  for (const auto& s : chart.series) {
    if (s.label.empty()) continue;
    const int lx = right - text_width(s.label, 1) - 24;
    fill_rect(img, lx, ly + 2, lx + 14, ly + 5, s.color);
    draw_text(img, lx + 18, ly, s.label, black);
    ly += 12;
  }
}

Color viridis_like(double t) {
  // Piecewise-linear ramp through dark blue, teal, green, yellow.
  static const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double u = t - i;
  Color c{};
  for (int k = 0; k < 3; ++k)
    c[k] = static_cast<std::uint8_t>(std::lround(stops[i][k] * (1 - u) + stops[i + 1][k] * u));
  return c;
}

}  // namespace

void draw_text(RgbImage& img, int x, int y, const std::string& text, Color color, int scale) {
  const auto& f = font();
  int cx = x;
  for (char ch : text) {
    auto it = f.find(ch);
    if (it == f.end()) it = f.find(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    if (it != f.end()) {
      for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 5; ++c)
          if (it->second[r * 5 + c] == '#') fill_rect(img, cx + c * scale, y + r * scale, cx + (c + 1) * scale, y + (r + 1) * scale, color);
    }
    cx += 6 * scale;
  }
}

RgbImage render_line_chart(const LineChart& chart, int width, int height) {
  RgbImage img(width, height);
  draw_line_chart(img, 0, 0, width, height, chart);
  return img;
}

RgbImage render_panels(const std::vector<LineChart>& charts, int cols, int panel_width, int panel_height) {
  if (cols <= 0 || charts.empty()) throw std::invalid_argument("render_panels: need charts and cols > 0");
  const int rows = (static_cast<int>(charts.size()) + cols - 1) / cols;
  RgbImage img(cols * panel_width, rows * panel_height);
  fill_rect(img, 0, 0, img.width(), img.height(), {255, 255, 255});
  for (std::size_t i = 0; i < charts.size(); ++i) {
    const int r = static_cast<int>(i) / cols, c = static_cast<int>(i) % cols;
    draw_line_chart(img, c * panel_width, r * panel_height, panel_width, panel_height, charts[i]);
  }
  return img;
}

RgbImage render_heatmap(const HeatmapChart& chart, int width, int height) {
  if (chart.cells.empty() || chart.cells[0].empty()) throw ShapeError("heatmap: no cells");
  const std::size_t rows = chart.cells.size(), cols = chart.cells[0].size();
  for (const auto& r : chart.cells)
    if (r.size() != cols) throw ShapeError("heatmap: ragged rows");
  RgbImage img(width, height);
  const Color black{0, 0, 0};
  fill_rect(img, 0, 0, width, height, {255, 255, 255});
  const int left = 70, right = width - 90, top = 40, bottom = height - 45;
  double vmax = 0.0;
  for (const auto& r : chart.cells)
    for (double v : r) vmax = std::max(vmax, v);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const int x0 = left + static_cast<int>(c * (right - left) / cols);
      const int x1 = left + static_cast<int>((c + 1) * (right - left) / cols);
      const int y0 = top + static_cast<int>(r * (bottom - top) / rows);
      const int y1 = top + static_cast<int>((r + 1) * (bottom - top) / rows);
      fill_rect(img, x0, y0, x1, y1, viridis_like(vmax > 0.0 ? chart.cells[r][c] / vmax : 0.0));
    }
  for (double t : nice_ticks(chart.x_min, chart.x_max)) {
    const int x = left + static_cast<int>(std::lround((t - chart.x_min) / (chart.x_max - chart.x_min) * (right - left)));
    draw_line(img, x, bottom, x, bottom + 4, black);
    const std::string s = tick_label(t);
    draw_text(img, x - text_width(s, 1) / 2, bottom + 7, s, black);
  }
  for (double t : nice_ticks(std::min(chart.y_min, chart.y_max), std::max(chart.y_min, chart.y_max))) {
    const int y = top + static_cast<int>(std::lround((t - chart.y_min) / (chart.y_max - chart.y_min) * (bottom - top)));
    draw_line(img, left - 4, y, left, y, black);
    const std::string s = tick_label(t);
    draw_text(img, left - 8 - text_width(s, 1), y - 3, s, black);
  }
  // Colour bar.
  for (int y = top; y < bottom; ++y)
    fill_rect(img, right + 20, y, right + 35, y + 1, viridis_like(1.0 - static_cast<double>(y - top) / (bottom - top)));
  draw_text(img, right + 40, top, tick_label(vmax), black);
  draw_text(img, right + 40, bottom - 7, "0", black);
  draw_text(img, (width - text_width(chart.title, 2)) / 2, 10, chart.title, black, 2);
  draw_text(img, (left + right - text_width(chart.x_label, 1)) / 2, bottom + 22, chart.x_label, black);
  draw_vertical_text(img, 8, top + 10, chart.y_label, black);
  return img;
}

}  // namespace linetrace::plot
