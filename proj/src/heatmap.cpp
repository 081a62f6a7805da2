// Copyright 2026 The itabnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "itabnet/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "itabnet/errors.hpp"
#include "itabnet/png.hpp"

namespace itabnet {
namespace {

// Samples of the viridis map at nine evenly spaced points.
constexpr std::array<std::array<double, 3>, 9> kRamp = {{
    {68, 1, 84},
    {72, 40, 120},
    {62, 74, 137},
    {49, 104, 142},
    {38, 130, 142},
    {31, 158, 137},
    {53, 183, 121},
    {109, 205, 89},
    {253, 231, 37},
}};

struct Canvas {
  std::uint32_t width, height;
  std::vector<std::uint8_t> rgb;

  Canvas(std::uint32_t w, std::uint32_t h) : width(w), height(h), rgb(std::size_t{w} * h * 3, 255) {}

  void fill(std::uint32_t x0, std::uint32_t y0, std::uint32_t w, std::uint32_t h,
            std::array<std::uint8_t, 3> c) {
    for (std::uint32_t y = y0; y < y0 + h; ++y) {
      for (std::uint32_t x = x0; x < x0 + w; ++x) {
        auto* p = rgb.data() + (std::size_t{y} * width + x) * 3;
        p[0] = c[0];
        p[1] = c[1];
        p[2] = c[2];
      }
    }
  }
};

template <typename ValueFn>
void DrawPanel(Canvas& canvas, std::uint32_t x0, std::size_t rows, std::size_t cols,
               const HeatmapStyle& style, ValueFn value) {
  const auto cw = static_cast<std::uint32_t>(style.cell_width);
  const auto rh = static_cast<std::uint32_t>(style.row_height);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      canvas.fill(x0 + static_cast<std::uint32_t>(c) * cw, static_cast<std::uint32_t>(r) * rh, cw,
                  rh, heat_color(value(r, c)));
    }
  }
}

}  // namespace

std::array<std::uint8_t, 3> heat_color(double v) {
  if (!(v >= 0.0)) v = 0.0;  // also maps NaN to the low end
  v = std::min(v, 1.0);
  const double pos = v * static_cast<double>(kRamp.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), kRamp.size() - 2);
  const double t = pos - static_cast<double>(i);
  std::array<std::uint8_t, 3> c{};
  for (int ch = 0; ch < 3; ++ch) {
    const double x = kRamp[i][ch] + t * (kRamp[i + 1][ch] - kRamp[i][ch]);
    c[ch] = static_cast<std::uint8_t>(std::lround(x));
  }
  return c;
}

std::vector<std::filesystem::path> render_heatmap(const MaskTensor& masks,
                                                  const std::vector<std::string>& feature_names,
                                                  const std::filesystem::path& out_dir,
                                                  const HeatmapStyle& style) {
  if (masks.empty()) throw InputError("empty mask tensor");
  if (feature_names.size() != masks.n_features()) {
    throw InputError("one feature name per mask column is required");
  }
  if (style.cell_width < 1 || style.row_height < 1 || style.panel_gap < 0) {
    throw ConfigError("heatmap style sizes must be positive");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir.string());
  }
  const std::size_t k = masks.n_steps(), n = masks.n_samples(), d = masks.n_features();
  const auto panel_w = static_cast<std::uint32_t>(d * static_cast<std::size_t>(style.cell_width));
  const auto height = static_cast<std::uint32_t>(n * static_cast<std::size_t>(style.row_height));

  std::vector<std::filesystem::path> paths;
  for (std::size_t s = 0; s < k; ++s) {
    Canvas canvas(panel_w, height);
    const Matrix& m = masks.steps[s];
    DrawPanel(canvas, 0, n, d, style, [&](std::size_t r, std::size_t c) { return m(r, c); });
    paths.push_back(out_dir / ("mask_" + std::to_string(s) + ".png"));
    write_png_rgb(paths.back(), canvas.width, canvas.height, canvas.rgb);
  }

  // Cyclic pairs (0,1), (1,2), ..., (K-1,0); K = 2 has the single pair (0,1).
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (k == 1) {
    pairs.emplace_back(0, 0);
  } else if (k == 2) {
    pairs.emplace_back(0, 1);
  } else {
    for (std::size_t s = 0; s < k; ++s) pairs.emplace_back(s, (s + 1) % k);
  }
  const auto gap = static_cast<std::uint32_t>(style.panel_gap);
  const auto np = static_cast<std::uint32_t>(pairs.size());
  Canvas canvas(np * panel_w + (np - 1) * gap, height);
  for (std::uint32_t p = 0; p < np; ++p) {
    const Matrix& a = masks.steps[pairs[p].first];
    const Matrix& b = masks.steps[pairs[p].second];
    DrawPanel(canvas, p * (panel_w + gap), n, d, style, [&](std::size_t r, std::size_t c) {
      return std::min(1.0, a(r, c) + b(r, c));
    });
  }
  paths.push_back(out_dir / "stacked_pairs.png");
  write_png_rgb(paths.back(), canvas.width, canvas.height, canvas.rgb);
  return paths;
}

}  // namespace itabnet
