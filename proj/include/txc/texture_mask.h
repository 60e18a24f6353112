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

#ifndef TXC_TEXTURE_MASK_H_
#define TXC_TEXTURE_MASK_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "txc/frame.h"

namespace txc {

enum class BlockLabel : uint8_t { kNonTexture = 0, kTexture = 1 };

// One label per 16x16 luma block of a padded frame, with the classifier's
// texture probability alongside.
struct TextureMask {
  int grid_w = 0;
  int grid_h = 0;
  std::vector<BlockLabel> labels;
  std::vector<float> probs;
  int frame_index = 0;

  static TextureMask Uniform(int grid_w, int grid_h, BlockLabel label);
  // Grid sized for a padded frame.
  static TextureMask ForFrame(const Frame& frame, BlockLabel label);

  bool IsTexture(int bx, int by) const {
    return labels[static_cast<size_t>(by) * grid_w + bx] == BlockLabel::kTexture;
  }
  void Set(int bx, int by, BlockLabel label) {
    labels[static_cast<size_t>(by) * grid_w + bx] = label;
  }
  int TextureCount() const;
  bool Matches(const Frame& padded) const {
    return grid_w * kBlockGrid == padded.width() &&
           grid_h * kBlockGrid == padded.height();
  }
};

// Relabels 4-connected texture components smaller than `min_region_blocks` as
// non-texture. Probabilities are left untouched.
TextureMask CleanMask(const TextureMask& mask, int min_region_blocks);

// Binary PGM (P5), one byte per block: 255 texture, 0 non-texture.
void WriteMaskPgm(const TextureMask& mask, const std::filesystem::path& path);
TextureMask ReadMaskPgm(const std::filesystem::path& path);
// Sidecar text: grid_w grid_h, then one row of probabilities per grid row.
void WriteMaskProbs(const TextureMask& mask, const std::filesystem::path& path);
void ReadMaskProbs(TextureMask& mask, const std::filesystem::path& path);

// `<dir>/<stem>.mask.<index>.pgm`
std::filesystem::path MaskPath(const std::filesystem::path& dir,
                               const std::string& stem, int index);
std::filesystem::path MaskProbsPath(const std::filesystem::path& dir,
                                    const std::string& stem, int index);
void WriteMasks(const std::vector<TextureMask>& masks,
                const std::filesystem::path& dir, const std::string& stem);
// Loads masks 0..count-1 for `stem`. When no file carries the stem, falls
// back to the only stem present in `dir`.
std::vector<TextureMask> LoadMasks(const std::filesystem::path& dir,
                                   const std::string& stem, int count);

}  // namespace txc

#endif  // TXC_TEXTURE_MASK_H_
