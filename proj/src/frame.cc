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

#include "txc/frame.h"

#include <algorithm>
#include <string>

#include "txc/error.h"

namespace txc {

Plane::Plane(int w, int h, uint8_t fill)
    : width(w), height(h), samples(static_cast<size_t>(w) * h, fill) {}

uint8_t Plane::ClampedAt(long long x, long long y) const {
  const long long cx = std::clamp<long long>(x, 0, width - 1);
  const long long cy = std::clamp<long long>(y, 0, height - 1);
  return samples[static_cast<size_t>(cy) * width + static_cast<size_t>(cx)];
}

Frame Frame::Blank(int width, int height, uint8_t luma, uint8_t chroma) {
  Frame f;
  f.y = Plane(width, height, luma);
  f.u = Plane(ChromaSize(width), ChromaSize(height), chroma);
  f.v = Plane(ChromaSize(width), ChromaSize(height), chroma);
  f.display_width = width;
  f.display_height = height;
  return f;
}

const Plane& Frame::plane(PlaneId id) const {
  switch (id) {
    case PlaneId::kY: return y;
    case PlaneId::kU: return u;
    case PlaneId::kV: return v;
  }
  return y;
}

Plane& Frame::plane(PlaneId id) {
  return const_cast<Plane&>(std::as_const(*this).plane(id));
}

namespace {

Plane PadPlane(const Plane& src, int width, int height) {
  if (src.width == width && src.height == height) return src;
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.at(x, y) = src.ClampedAt(x, y);
  }
  return out;
}

int RoundUp(int v, int m) { return (v + m - 1) / m * m; }

}  // namespace

Frame PadFrame(const Frame& frame) {
  const int w = RoundUp(frame.width(), kBlockGrid);
  const int h = RoundUp(frame.height(), kBlockGrid);
  Frame out;
  out.y = PadPlane(frame.y, w, h);
  out.u = PadPlane(frame.u, w / 2, h / 2);
  out.v = PadPlane(frame.v, w / 2, h / 2);
  out.display_width = frame.display_width;
  out.display_height = frame.display_height;
  out.frame_index = frame.frame_index;
  return out;
}

std::vector<uint8_t> ExtractBlock(const Frame& frame, const BlockRect& rect,
                                  PlaneId plane) {
  const bool chroma = plane != PlaneId::kY;
  const int x0 = chroma ? rect.x / 2 : rect.x;
  const int y0 = chroma ? rect.y / 2 : rect.y;
  const int size = chroma ? rect.size / 2 : rect.size;
  const Plane& p = frame.plane(plane);
  if (size <= 0 || rect.x < 0 || rect.y < 0 || x0 + size > p.width ||
      y0 + size > p.height) {
    throw Error("block rect (" + std::to_string(rect.x) + "," +
                std::to_string(rect.y) + "," + std::to_string(rect.size) +
                ") out of bounds");
  }
  std::vector<uint8_t> out;
  out.reserve(static_cast<size_t>(size) * size);
  for (int y = 0; y < size; ++y) {
    const auto row = p.Row(y0 + y).subspan(x0, size);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace txc
