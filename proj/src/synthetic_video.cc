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

#include "txc/synthetic_video.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "txc/error.h"

namespace txc {
namespace {

uint8_t Clip(double v) {
  return static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

struct Blob {
  double cx, cy, rx, ry, vx, vy;
  std::array<double, 3> color;
};

}  // namespace

Frame RgbToFrame(const RgbImage& image) {
  Frame f = Frame::Blank(image.width, image.height);
  const int cw = f.u.width;
  const int ch = f.u.height;
  std::vector<double> u(static_cast<size_t>(image.width) * image.height);
  std::vector<double> v(u.size());
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const size_t i = static_cast<size_t>(y) * image.width + x;
      const double r = image.rgb[3 * i];
      const double g = image.rgb[3 * i + 1];
      const double b = image.rgb[3 * i + 2];
      f.y.at(x, y) = Clip(0.299 * r + 0.587 * g + 0.114 * b);
      u[i] = 128 - 0.168736 * r - 0.331264 * g + 0.5 * b;
      v[i] = 128 + 0.5 * r - 0.418688 * g - 0.081312 * b;
    }
  }
  for (int cy = 0; cy < ch; ++cy) {
    for (int cx = 0; cx < cw; ++cx) {
      double su = 0, sv = 0;
      int n = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int x = 2 * cx + dx;
          const int y = 2 * cy + dy;
          if (x >= image.width || y >= image.height) continue;
          const size_t i = static_cast<size_t>(y) * image.width + x;
          su += u[i];
          sv += v[i];
          ++n;
        }
      }
      f.u.at(cx, cy) = Clip(su / n);
      f.v.at(cx, cy) = Clip(sv / n);
    }
  }
  return f;
}

SyntheticVideo GeneratePanningVideo(const PanningVideoConfig& config,
                                    uint64_t seed) {
  if (config.width < 16 || config.height < 16 || config.frames < 1) {
    throw Error("synthetic video needs at least one 16x16 frame");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ProceduralTexture texture =
      ProceduralTexture::Random(rng, TextureKind::kRandomPhase);
  const int w = config.width;
  const int h = config.height;
  const int band = h / 4;  // static gradient band height

  std::array<double, 3> band_top, band_bottom;
  for (int c = 0; c < 3; ++c) {
    band_top[c] = 60 + 140 * unit(rng);
    band_bottom[c] = 60 + 140 * unit(rng);
  }
  std::vector<Blob> blobs;
  for (int i = 0; i < config.blobs; ++i) {
    Blob b;
    b.rx = w * (0.08 + 0.07 * unit(rng));
    b.ry = h * (0.10 + 0.08 * unit(rng));
    b.cx = b.rx + (w - 2 * b.rx) * unit(rng);
    b.cy = b.ry + (h - band - 2 * b.ry) * unit(rng);
    const double angle = 2 * M_PI * unit(rng);
    b.vx = std::cos(angle);
    b.vy = std::sin(angle);
    for (auto& c : b.color) c = 40 + 180 * unit(rng);
    blobs.push_back(b);
  }

  SyntheticVideo out;
  const int grid_w = (w + kBlockGrid - 1) / kBlockGrid;
  const int grid_h = (h + kBlockGrid - 1) / kBlockGrid;
  for (int t = 0; t < config.frames; ++t) {
    RgbImage img = texture.Render(w, h, config.texture_scale, config.pan_x * t,
                                  config.pan_y * t);
    std::vector<uint8_t> fg(static_cast<size_t>(w) * h, 0);
    for (int y = h - band; y < h; ++y) {
      const double a = static_cast<double>(y - (h - band)) / std::max(1, band - 1);
      for (int x = 0; x < w; ++x) {
        uint8_t* px = &img.rgb[(static_cast<size_t>(y) * w + x) * 3];
        for (int c = 0; c < 3; ++c) {
          px[c] = Clip(band_top[c] * (1 - a) + band_bottom[c] * a +
                       10.0 * x / w);
        }
        fg[static_cast<size_t>(y) * w + x] = 1;
      }
    }
    for (const auto& b : blobs) {
      const int x0 = std::max(0, static_cast<int>(std::floor(b.cx - b.rx)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(b.cx + b.rx)));
      const int y0 = std::max(0, static_cast<int>(std::floor(b.cy - b.ry)));
      const int y1 = std::min(h - 1, static_cast<int>(std::ceil(b.cy + b.ry)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double dx = (x - b.cx) / b.rx;
          const double dy = (y - b.cy) / b.ry;
          const double r2 = dx * dx + dy * dy;
          if (r2 > 1) continue;
          const double shade = 0.7 + 0.3 * (1 - r2) - 0.1 * dx;
          uint8_t* px = &img.rgb[(static_cast<size_t>(y) * w + x) * 3];
          for (int c = 0; c < 3; ++c) px[c] = Clip(b.color[c] * shade);
          fg[static_cast<size_t>(y) * w + x] = 1;
        }
      }
    }
    Frame f = RgbToFrame(img);
    f.frame_index = t;
    out.sequence.frames.push_back(std::move(f));

    TextureMask mask =
        TextureMask::Uniform(grid_w, grid_h, BlockLabel::kTexture);
    mask.frame_index = t;
    for (int y = 0; y < grid_h * kBlockGrid; ++y) {
      for (int x = 0; x < grid_w * kBlockGrid; ++x) {
        // Padding replicates the last row/column, so it inherits their class.
        const int sx = std::min(x, w - 1);
        const int sy = std::min(y, h - 1);
        if (fg[static_cast<size_t>(sy) * w + sx]) {
          mask.Set(x / kBlockGrid, y / kBlockGrid, BlockLabel::kNonTexture);
        }
      }
    }
    for (int by = 0; by < grid_h; ++by) {
      for (int bx = 0; bx < grid_w; ++bx) {
        mask.probs[static_cast<size_t>(by) * grid_w + bx] =
            mask.IsTexture(bx, by) ? 1.0f : 0.0f;
      }
    }
    out.masks.push_back(std::move(mask));

    for (auto& b : blobs) {
      b.cx += b.vx;
      b.cy += b.vy;
      if (b.cx - b.rx < 0 || b.cx + b.rx > w) b.vx = -b.vx;
      if (b.cy - b.ry < 0 || b.cy + b.ry > h - band) b.vy = -b.vy;
    }
  }
  return out;
}

}  // namespace txc
