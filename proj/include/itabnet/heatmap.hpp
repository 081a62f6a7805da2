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


#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "itabnet/model.hpp"

namespace itabnet {

struct HeatmapStyle {
  int cell_width = 12;  // pixels per feature column
  int row_height = 1;   // pixels per sample
  int panel_gap = 6;    // between panels of stacked_pairs.png
};

// Viridis-like ramp; v is clamped to [0, 1].
std::array<std::uint8_t, 3> heat_color(double v);

// Writes mask_<k>.png per step (samples down, features across, fixed [0, 1]
// scale) and stacked_pairs.png with one panel per cyclic step pair showing
// min(1, m_i + m_j). Returns the paths in that order.
std::vector<std::filesystem::path> render_heatmap(const MaskTensor& masks,
                                                  const std::vector<std::string>& feature_names,
                                                  const std::filesystem::path& out_dir,
                                                  const HeatmapStyle& style = {});

}  // namespace itabnet
