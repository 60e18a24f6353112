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

#ifndef TXC_DATASET_H_
#define TXC_DATASET_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace txc {

// Network class indices.
inline constexpr int kTextureClass = 0;
inline constexpr int kNonTextureClass = 1;

inline constexpr int kPatchSize = 16;
inline constexpr int kPatchValues = 3 * kPatchSize * kPatchSize;

// Interleaved 8-bit RGB image.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;

  RgbImage() = default;
  RgbImage(int w, int h, uint8_t fill = 0)
      : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3, fill) {}

  uint8_t at(int x, int y, int c) const {
    return rgb[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  uint8_t& at(int x, int y, int c) {
    return rgb[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
};

// Planar R, G, B 16x16 patch.
using Patch = std::array<uint8_t, kPatchValues>;

struct PatchDataset {
  std::vector<Patch> patches;
  std::vector<int> labels;
  std::array<int, 2> class_counts{0, 0};

  void Add(const Patch& patch, int label);
  void Append(const PatchDataset& other);
  size_t size() const { return patches.size(); }
  bool operator==(const PatchDataset&) const = default;
};

RgbImage Crop(const RgbImage& image, int x, int y, int w, int h);

// Area-averaging (box filter) resize with fractional pixel coverage, results
// rounded to nearest.
RgbImage AreaResize(const RgbImage& image, int width, int height);

Patch ToPatch(const RgbImage& image16);

// Texture sources are tiled into non-overlapping 256x256 and 128x128 crops,
// each resized to 16x16 (a 512x512 source yields 4 + 16 patches). Non-texture
// sources are resized whole. Throws Error if a texture source is smaller than
// 128x128.
PatchDataset PreparePatches(std::span<const RgbImage> sources, int label);

enum class TextureKind { kGrating, kCheckerboard, kRandomPhase, kFilteredNoise };

// Procedural texture with periods expressed in output pixels at scale 1;
// Render multiplies every spatial period by `scale`.
struct ProceduralTexture {
  TextureKind kind = TextureKind::kGrating;
  std::array<double, 3> base{128, 128, 128};
  std::array<double, 3> tint{1, 1, 1};
  double amplitude = 60;
  // Up to 16 plane waves (gratings and random-phase textures).
  std::vector<std::array<double, 4>> waves;  // fx, fy, phase, weight
  double cell = 4;                           // checker / noise lattice size
  double angle = 0;
  uint64_t lattice_seed = 0;

  static ProceduralTexture Random(std::mt19937_64& rng);
  static ProceduralTexture Random(std::mt19937_64& rng, TextureKind kind);
  // Renders the window [x0, x0+w) x [y0, y0+h) of the infinite texture.
  RgbImage Render(int w, int h, double scale, int x0 = 0, int y0 = 0) const;
};

// Smooth non-texture scene: gradient background with a few flat shapes and
// weak noise.
RgbImage RenderScene(std::mt19937_64& rng, int size);

struct SynthConfig {
  int texture_count = 2000;
  // Non-texture patches per texture patch; default mirrors 36148 / 1740.
  double nontexture_ratio = 36148.0 / 1740.0;
  int texture_source_size = 256;
  int scene_size = 64;
};

PatchDataset SynthesizeDataset(const SynthConfig& config, uint64_t seed);

// Stratified split; the first `fraction` of each class (after a seeded
// shuffle) goes to the second dataset.
std::pair<PatchDataset, PatchDataset> SplitDataset(const PatchDataset& data,
                                                   double fraction,
                                                   uint64_t seed);

// "TXDS" file: magic, u32 count, then per patch u8 label + 768 samples.
void SaveDataset(const PatchDataset& data, const std::filesystem::path& path);
PatchDataset LoadDataset(const std::filesystem::path& path);

}  // namespace txc

#endif  // TXC_DATASET_H_
