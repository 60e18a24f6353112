// Copyright 2026 The txc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TXC_SYNTHETIC_VIDEO_H_
#define TXC_SYNTHETIC_VIDEO_H_

#include <cstdint>
#include <vector>

#include "txc/dataset.h"
#include "txc/frame.h"
#include "txc/texture_mask.h"

namespace txc {

// BT.601 full-range RGB -> 4:2:0, chroma from 2x2 averages.
Frame RgbToFrame(const RgbImage& image);

struct PanningVideoConfig {
  int width = 176;
  int height = 144;
  int frames = 64;
  int pan_x = 2;  // background displacement per frame, pixels
  int pan_y = 0;
  int blobs = 2;  // moving smooth foreground objects
  double texture_scale = 1.5;
};

struct SyntheticVideo {
  Sequence sequence;
  // A cell is texture when none of its pixels belongs to the foreground.
  std::vector<TextureMask> masks;
};

// Procedural texture background panning at a constant rate, a static smooth
// gradient band along the bottom, and shaded ellipses drifting about 1 px per
// frame.
SyntheticVideo GeneratePanningVideo(const PanningVideoConfig& config,
                                    uint64_t seed);

}  // namespace txc

#endif  // TXC_SYNTHETIC_VIDEO_H_
