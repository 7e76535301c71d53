// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "linetrace/error.hpp"
#include "linetrace/imaging/png_io.hpp"
#include "linetrace/plot/raster_plot.hpp"
#include "test_support.hpp"

using namespace linetrace;
using namespace linetrace::plot;

namespace {

std::size_t count_color(const imaging::RgbImage& img, Color c) {
  std::size_t n = 0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      n += img.at(x, y, 0) == c[0] && img.at(x, y, 1) == c[1] && img.at(x, y, 2) == c[2];
  return n;
}

LineChart loss_chart() {
  LineChart c{"Loss", "epoch", "mse", {}};
  Series train{"train", {}, {}, kBlue}, val{"val", {}, {}, kOrange};
  for (int e = 1; e <= 30; ++e) {
    train.x.push_back(e);
    train.y.push_back(1.0 / e);
    val.x.push_back(e);
    val.y.push_back(1.2 / e + 0.01);
  }
  c.series = {train, val};
  return c;
}

}  // namespace

TEST(Plot, LineChartDrawsEachSeries) {
  const imaging::RgbImage img = render_line_chart(loss_chart(), 640, 400);
  EXPECT_EQ(img.width(), 640);
  EXPECT_EQ(img.height(), 400);
  EXPECT_GT(count_color(img, kBlue), 300u);
  EXPECT_GT(count_color(img, kOrange), 300u);
  EXPECT_EQ(count_color(img, kGreen), 0u);
  EXPECT_EQ(img, render_line_chart(loss_chart(), 640, 400));
}

TEST(Plot, SkipsNonFiniteAndRejectsRagged) {
  LineChart c = loss_chart();
  c.series[0].y[4] = std::nan("");
  c.series[1].y[7] = INFINITY;
  EXPECT_NO_THROW(render_line_chart(c));
  c.series[0].x.pop_back();
  EXPECT_THROW(render_line_chart(c), ShapeError);
  EXPECT_NO_THROW(render_line_chart(LineChart{"empty", "", "", {}}));
}

TEST(Plot, PanelsTile) {
  const imaging::RgbImage img = render_panels({loss_chart(), loss_chart(), loss_chart()}, 2, 300, 200);
  EXPECT_EQ(img.width(), 600);
  EXPECT_EQ(img.height(), 400);
  EXPECT_THROW(render_panels({}, 2), std::invalid_argument);
}

TEST(Plot, HeatmapAndPngOutput) {
  HeatmapChart h{"Angular", "value", "bin", {{0, 1, 2}, {3, 4, 5}}, -1, 1, 1, -1};
  const imaging::RgbImage img = render_heatmap(h, 500, 400);
  EXPECT_EQ(img.width(), 500);
  EXPECT_GT(count_color(img, {253, 231, 37}), 1000u);  // the maximum cell
  EXPECT_THROW(render_heatmap(HeatmapChart{}), ShapeError);
  h.cells[1].pop_back();
  EXPECT_THROW(render_heatmap(h), ShapeError);

  linetrace::testing::TempDir dir("plot");
  imaging::write_png(img, dir / "h.png");
  EXPECT_EQ(imaging::read_png(dir / "h.png"), img);
}

TEST(Plot, TextUsesTheBitmapFont) {
  imaging::RgbImage img(40, 12);
  draw_text(img, 1, 1, "A", {255, 0, 0});
  const std::size_t a = count_color(img, {255, 0, 0});
  EXPECT_GT(a, 8u);
  imaging::RgbImage lower(40, 12);
  draw_text(lower, 1, 1, "a", {255, 0, 0});
  EXPECT_EQ(lower, img);
  imaging::RgbImage big(40, 24);
  draw_text(big, 1, 1, "A", {255, 0, 0}, 2);
  EXPECT_EQ(count_color(big, {255, 0, 0}), 4 * a);
}
