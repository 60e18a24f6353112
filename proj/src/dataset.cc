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

#include "txc/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "txc/error.h"

namespace txc {

void PatchDataset::Add(const Patch& patch, int label) {
  if (label != kTextureClass && label != kNonTextureClass) {
    throw Error("patch label out of range");
  }
  patches.push_back(patch);
  labels.push_back(label);
  ++class_counts[label];
}

void PatchDataset::Append(const PatchDataset& other) {
  for (size_t i = 0; i < other.size(); ++i) Add(other.patches[i], other.labels[i]);
}

RgbImage Crop(const RgbImage& image, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || x + w > image.width || y + h > image.height) {
    throw Error("crop outside image");
  }
  RgbImage out(w, h);
  for (int r = 0; r < h; ++r) {
    std::memcpy(&out.at(0, r, 0),
                image.rgb.data() + (static_cast<size_t>(y + r) * image.width + x) * 3,
                static_cast<size_t>(w) * 3);
  }
  return out;
}

namespace {

struct Tap {
  int index;
  double weight;
};

// Source coverage of each output cell along one axis.
std::vector<std::vector<Tap>> AreaTaps(int src, int dst) {
  std::vector<std::vector<Tap>> taps(dst);
  const double step = static_cast<double>(src) / dst;
  for (int o = 0; o < dst; ++o) {
    const double lo = o * step;
    const double hi = (o + 1) * step;
    for (int s = static_cast<int>(std::floor(lo));
         s < std::min(src, static_cast<int>(std::ceil(hi))); ++s) {
      const double w = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
      if (w > 1e-12) taps[o].push_back({s, w});
    }
  }
  return taps;
}

}  // namespace

RgbImage AreaResize(const RgbImage& image, int width, int height) {
  if (width <= 0 || height <= 0 || image.width <= 0 || image.height <= 0) {
    throw Error("resize to or from an empty image");
  }
  const auto tx = AreaTaps(image.width, width);
  const auto ty = AreaTaps(image.height, height);
  const double norm = (static_cast<double>(image.width) / width) *
                      (static_cast<double>(image.height) / height);
  RgbImage out(width, height);
  for (int oy = 0; oy < height; ++oy) {
    for (int ox = 0; ox < width; ++ox) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (const Tap& vy : ty[oy]) {
          double row = 0;
          for (const Tap& vx : tx[ox]) row += vx.weight * image.at(vx.index, vy.index, c);
          acc += vy.weight * row;
        }
        out.at(ox, oy, c) = static_cast<uint8_t>(
            std::clamp(std::floor(acc / norm + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

Patch ToPatch(const RgbImage& image16) {
  if (image16.width != kPatchSize || image16.height != kPatchSize) {
    throw Error("patch must be 16x16");
  }
  Patch p{};
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < kPatchSize; ++y) {
      for (int x = 0; x < kPatchSize; ++x) {
        p[(c * kPatchSize + y) * kPatchSize + x] = image16.at(x, y, c);
      }
    }
  }
  return p;
}

PatchDataset PreparePatches(std::span<const RgbImage> sources, int label) {
  PatchDataset out;
  for (const RgbImage& src : sources) {
    if (label == kNonTextureClass) {
      out.Add(ToPatch(AreaResize(src, kPatchSize, kPatchSize)), label);
      continue;
    }
    if (src.width < 128 || src.height < 128) {
      throw Error("texture source smaller than the 128x128 crop");
    }
    for (int crop : {256, 128}) {
      for (int y = 0; y + crop <= src.height; y += crop) {
        for (int x = 0; x + crop <= src.width; x += crop) {
          out.Add(ToPatch(AreaResize(Crop(src, x, y, crop, crop), kPatchSize,
                                     kPatchSize)),
                  label);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Procedural content

namespace {

using Rng = std::mt19937_64;

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

uint8_t Clamp8(double v) {
  return static_cast<uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

// Hash-based lattice value in [-1, 1].
double LatticeValue(uint64_t seed, long long i, long long j) {
  uint64_t h = seed ^ (static_cast<uint64_t>(i) * 0x9E3779B97F4A7C15ull) ^
               (static_cast<uint64_t>(j) * 0xC2B2AE3D27D4EB4Full);
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ull;
  h ^= h >> 33;
  return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

double SmoothNoise(uint64_t seed, double u, double v) {
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const long long i = static_cast<long long>(fu);
  const long long j = static_cast<long long>(fv);
  double a = u - fu;
  double b = v - fv;
  a = a * a * (3 - 2 * a);
  b = b * b * (3 - 2 * b);
  const double v00 = LatticeValue(seed, i, j);
  const double v10 = LatticeValue(seed, i + 1, j);
  const double v01 = LatticeValue(seed, i, j + 1);
  const double v11 = LatticeValue(seed, i + 1, j + 1);
  return (1 - b) * ((1 - a) * v00 + a * v10) + b * ((1 - a) * v01 + a * v11);
}

std::array<double, 4> RandomWave(Rng& rng, double min_period,
                                 double max_period, double weight) {
  const double period = Uniform(rng, min_period, max_period);
  const double theta = Uniform(rng, 0, std::numbers::pi);
  return {std::cos(theta) / period, std::sin(theta) / period,
          Uniform(rng, 0, 2 * std::numbers::pi), weight};
}

}  // namespace

ProceduralTexture ProceduralTexture::Random(std::mt19937_64& rng) {
  return Random(rng, static_cast<TextureKind>(UniformInt(rng, 0, 3)));
}

ProceduralTexture ProceduralTexture::Random(std::mt19937_64& rng,
                                            TextureKind kind) {
  ProceduralTexture t;
  t.kind = kind;
  for (double& b : t.base) b = Uniform(rng, 70, 185);
  for (double& c : t.tint) c = Uniform(rng, 0.7, 1.0);
  t.amplitude = Uniform(rng, 40, 80);
  t.angle = Uniform(rng, 0, std::numbers::pi);
  t.lattice_seed = rng();
  switch (kind) {
    case TextureKind::kGrating: {
      const int n = UniformInt(rng, 1, 2);
      for (int i = 0; i < n; ++i) t.waves.push_back(RandomWave(rng, 2.5, 6, 1));
      break;
    }
    case TextureKind::kRandomPhase:
      for (int i = 0; i < 16; ++i) {
        t.waves.push_back(RandomWave(rng, 2, 6, Uniform(rng, 0.3, 1)));
      }
      break;
    case TextureKind::kCheckerboard:
      t.cell = Uniform(rng, 1.5, 4);
      break;
    case TextureKind::kFilteredNoise:
      t.cell = Uniform(rng, 1.5, 3);
      break;
  }
  return t;
}

RgbImage ProceduralTexture::Render(int w, int h, double scale, int x0,
                                   int y0) const {
  RgbImage out(w, h);
  double sum_w = 0;
  double sum_sq = 0;
  for (const auto& wv : waves) {
    sum_w += wv[3];
    sum_sq += wv[3] * wv[3];
  }
  // Few waves: normalize by peak. Many: by roughly two standard deviations.
  const double wave_norm = waves.size() > 2 ? 1.0 / std::sqrt(2 * sum_sq)
                                            : 1.0 / std::max(1e-9, sum_w);
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = (x0 + x + 0.5) / scale;
      const double v = (y0 + y + 0.5) / scale;
      double value = 0;
      switch (kind) {
        case TextureKind::kGrating:
        case TextureKind::kRandomPhase:
          for (const auto& wv : waves) {
            value += wv[3] * std::sin(2 * std::numbers::pi *
                                          (wv[0] * u + wv[1] * v) + wv[2]);
          }
          value = std::clamp(value * wave_norm, -1.0, 1.0);
          break;
        case TextureKind::kCheckerboard: {
          const double ru = (ca * u + sa * v) / cell;
          const double rv = (-sa * u + ca * v) / cell;
          const long long parity = static_cast<long long>(std::floor(ru)) +
                                   static_cast<long long>(std::floor(rv));
          value = (parity & 1) ? 1.0 : -1.0;
          break;
        }
        case TextureKind::kFilteredNoise:
          value = 0.75 * SmoothNoise(lattice_seed, u / cell, v / cell) +
                  0.25 * SmoothNoise(lattice_seed + 1, 2 * u / cell,
                                     2 * v / cell);
          value = std::clamp(value * 1.6, -1.0, 1.0);
          break;
      }
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = Clamp8(base[c] + amplitude * tint[c] * value);
      }
    }
  }
  return out;
}

RgbImage RenderScene(std::mt19937_64& rng, int size) {
  RgbImage img(size, size);
  std::array<double, 3> c0;
  std::array<double, 3> c1;
  for (int c = 0; c < 3; ++c) {
    c0[c] = Uniform(rng, 20, 235);
    c1[c] = std::clamp(c0[c] + Uniform(rng, -80, 80), 0.0, 255.0);
  }
  const double theta = Uniform(rng, 0, 2 * std::numbers::pi);
  const double gx = std::cos(theta) / size;
  const double gy = std::sin(theta) / size;

  struct Shape {
    int type;  // 0 disc, 1 rectangle, 2 half-plane
    double cx, cy, r, hw, hh, nx, ny;
    std::array<double, 3> color;
  };
  std::vector<Shape> shapes;
  const int style = UniformInt(rng, 0, 2);  // gradient, isolated, composite
  const int count = style == 0 ? 0 : style == 1 ? UniformInt(rng, 1, 2)
                                                : UniformInt(rng, 3, 5);
  for (int i = 0; i < count; ++i) {
    Shape s{};
    s.type = UniformInt(rng, 0, 2);
    s.cx = Uniform(rng, 0, size);
    s.cy = Uniform(rng, 0, size);
    s.r = Uniform(rng, 0.2, 0.45) * size;
    s.hw = Uniform(rng, 0.15, 0.4) * size;
    s.hh = Uniform(rng, 0.15, 0.4) * size;
    const double a = Uniform(rng, 0, 2 * std::numbers::pi);
    s.nx = std::cos(a);
    s.ny = std::sin(a);
    for (double& c : s.color) c = Uniform(rng, 10, 245);
    shapes.push_back(s);
  }
  const double noise_sigma = Uniform(rng, 0, 3);
  std::normal_distribution<double> noise(0, 1);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double t = std::clamp(0.5 + gx * (x - size / 2.0) +
                                      gy * (y - size / 2.0), 0.0, 1.0);
      std::array<double, 3> px;
      for (int c = 0; c < 3; ++c) px[c] = c0[c] * (1 - t) + c1[c] * t;
      for (const Shape& s : shapes) {
        const double dx = x + 0.5 - s.cx;
        const double dy = y + 0.5 - s.cy;
        bool inside = false;
        if (s.type == 0) inside = dx * dx + dy * dy <= s.r * s.r;
        if (s.type == 1) inside = std::abs(dx) <= s.hw && std::abs(dy) <= s.hh;
        if (s.type == 2) inside = dx * s.nx + dy * s.ny > 0;
        if (inside) px = s.color;
      }
      const double n = noise_sigma * noise(rng);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = Clamp8(px[c] + n);
    }
  }
  return img;
}

PatchDataset SynthesizeDataset(const SynthConfig& config, uint64_t seed) {
  if (config.texture_count < 0 || !(config.nontexture_ratio >= 0) ||
      config.texture_source_size < 128 || config.scene_size < 1) {
    throw Error("invalid synthetic dataset configuration");
  }
  Rng rng(seed);
  PatchDataset data;
  // Source scale chosen so both crop sizes keep visible high-frequency
  // content after area averaging.
  const double source_scale = config.texture_source_size / 256.0 * 12.0;
  while (data.class_counts[kTextureClass] < config.texture_count) {
    const ProceduralTexture tex = ProceduralTexture::Random(rng);
    const RgbImage src = tex.Render(config.texture_source_size,
                                    config.texture_source_size, source_scale,
                                    UniformInt(rng, 0, 4096),
                                    UniformInt(rng, 0, 4096));
    const RgbImage one[] = {src};
    const PatchDataset patches = PreparePatches(one, kTextureClass);
    for (size_t i = 0; i < patches.size() &&
                       data.class_counts[kTextureClass] < config.texture_count;
         ++i) {
      data.Add(patches.patches[i], kTextureClass);
    }
  }
  const int nontexture = static_cast<int>(
      std::lround(config.texture_count * config.nontexture_ratio));
  for (int i = 0; i < nontexture; ++i) {
    const RgbImage scene[] = {RenderScene(rng, config.scene_size)};
    data.Add(PreparePatches(scene, kNonTextureClass).patches[0],
             kNonTextureClass);
  }
  return data;
}

std::pair<PatchDataset, PatchDataset> SplitDataset(const PatchDataset& data,
                                                   double fraction,
                                                   uint64_t seed) {
  Rng rng(seed);
  PatchDataset keep;
  PatchDataset held;
  for (int cls : {kTextureClass, kNonTextureClass}) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < data.size(); ++i) {
      if (data.labels[i] == cls) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const size_t n_held = static_cast<size_t>(std::lround(fraction * idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) {
      (k < n_held ? held : keep).Add(data.patches[idx[k]], cls);
    }
  }
  return {std::move(keep), std::move(held)};
}

namespace {
constexpr char kDatasetMagic[4] = {'T', 'X', 'D', 'S'};
}  // namespace

void SaveDataset(const PatchDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(kDatasetMagic, 4);
  const uint32_t n = static_cast<uint32_t>(data.size());
  out.write(reinterpret_cast<const char*>(&n), 4);
  for (size_t i = 0; i < data.size(); ++i) {
    out.put(static_cast<char>(data.labels[i]));
    out.write(reinterpret_cast<const char*>(data.patches[i].data()),
              kPatchValues);
  }
  if (!out) throw Error("failed to write " + path.string());
}

PatchDataset LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kDatasetMagic, 4) != 0) {
    throw Error(path.string() + ": not a TXDS dataset");
  }
  uint32_t n = 0;
  in.read(reinterpret_cast<char*>(&n), 4);
  if (in.gcount() != 4) throw Error("truncated dataset");
  PatchDataset data;
  for (uint32_t i = 0; i < n; ++i) {
    const int label = in.get();
    Patch p{};
    in.read(reinterpret_cast<char*>(p.data()), kPatchValues);
    if (!in) throw Error("truncated dataset");
    data.Add(p, label);
  }
  return data;
}

}  // namespace txc
