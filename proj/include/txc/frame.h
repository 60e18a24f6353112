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

#ifndef TXC_FRAME_H_
#define TXC_FRAME_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace txc {

constexpr int kBlockGrid = 16;

// One 8-bit sample plane, row-major with no stride padding.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> samples;

  Plane() = default;
  Plane(int w, int h, uint8_t fill = 0);

  uint8_t at(int x, int y) const {
    return samples[static_cast<size_t>(y) * width + x];
  }
  uint8_t& at(int x, int y) {
    return samples[static_cast<size_t>(y) * width + x];
  }
  // Edge-replicated access for any integer coordinate.
  uint8_t ClampedAt(long long x, long long y) const;

  std::span<const uint8_t> Row(int y) const {
    return {samples.data() + static_cast<size_t>(y) * width,
            static_cast<size_t>(width)};
  }
  const uint8_t* RowPtr(int y) const {
    return samples.data() + static_cast<size_t>(y) * width;
  }
  uint8_t* RowPtr(int y) { return samples.data() + static_cast<size_t>(y) * width; }

  bool operator==(const Plane&) const = default;
};

enum class PlaneId { kY, kU, kV };

// Planar YUV 4:2:0 picture. `display_width/height` keep the source dimensions
// when the planes have been padded out to the 16x16 block grid.
struct Frame {
  Plane y;
  Plane u;
  Plane v;
  int display_width = 0;
  int display_height = 0;
  int frame_index = 0;

  // Allocates a frame of the given luma size filled with constant values.
  static Frame Blank(int width, int height, uint8_t luma = 0,
                     uint8_t chroma = 128);

  int width() const { return y.width; }
  int height() const { return y.height; }
  bool IsGridAligned() const {
    return width() % kBlockGrid == 0 && height() % kBlockGrid == 0;
  }

  const Plane& plane(PlaneId id) const;
  Plane& plane(PlaneId id);

  bool SamplesEqual(const Frame& other) const {
    return y == other.y && u == other.u && v == other.v;
  }
};

inline int ChromaSize(int luma_size) { return (luma_size + 1) / 2; }

struct Sequence {
  std::vector<Frame> frames;
  int fps_num = 30;
  int fps_den = 1;

  bool empty() const { return frames.empty(); }
  size_t size() const { return frames.size(); }
};

// Square block addressed in luma coordinates.
struct BlockRect {
  int x = 0;
  int y = 0;
  int size = kBlockGrid;

  bool operator==(const BlockRect&) const = default;
};

// Rounds the luma dimensions up to multiples of 16 by edge replication. The
// display dimensions are carried over unchanged, so the call is idempotent.
Frame PadFrame(const Frame& frame);

// Copies the rect out of one plane. Chroma rects use halved coordinates and a
// halved size. Throws Error when the rect leaves the plane.
std::vector<uint8_t> ExtractBlock(const Frame& frame, const BlockRect& rect,
                                  PlaneId plane);

}  // namespace txc

#endif  // TXC_FRAME_H_
