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

#ifndef TXC_CODEC_H_
#define TXC_CODEC_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "txc/frame.h"
#include "txc/global_motion.h"
#include "txc/texture_mask.h"

namespace txc {

inline constexpr int kBitstreamVersion = 1;
inline constexpr int kSuperblockSize = 64;
inline constexpr int kMinBlockSize = 16;
inline constexpr int kMaxMvMagnitude = 1024;
// magic(4) version(1) width(2) height(2) frame_count(2) gf(1) model(1)
inline constexpr size_t kFileHeaderBytes = 13;

enum class FrameType : uint8_t { kKey = 0, kInter = 1 };

// Values are the 2-bit mode codes written to the stream.
enum class BlockMode : uint8_t {
  kIntraDc = 0,
  kInterMv = 1,
  kGlobalWarp = 2,
  kTexture = 3,
};

const char* BlockModeName(BlockMode mode);

struct EncoderConfig {
  int gf_group_size = 8;
  int q_level = 24;
  bool texture_mode = true;
  MotionModelKind model = MotionModelKind::kRotZoom;
  int search_range = 32;  // INTER_MV search, pixels
  MotionSearchConfig motion;
  bool trace = false;

  void Validate() const;
};

inline double Lambda(int q_level) { return 0.85 * q_level * q_level; }

inline FrameType FrameTypeAt(int index, int gf_group_size) {
  return index % gf_group_size == 0 ? FrameType::kKey : FrameType::kInter;
}

// A block qualifies for texture coding when every grid cell it covers is
// texture in `cur_mask`, and the bounding box of its warped footprint, grown
// by one pixel for interpolation support, stays inside the reference frame and
// touches only texture cells of `ref_mask`.
bool IsTextureBlock(const BlockRect& rect, const TextureMask& cur_mask,
                    const TextureMask& ref_mask, const AffineMotion& m);

struct FrameStats {
  int frame_index = 0;
  FrameType type = FrameType::kKey;
  int q_level = 0;
  size_t bits = 0;  // 8 x bytes of frame header + payload
  int texture_blocks = 0;
  double texture_area_fraction = 0;
  std::array<int, 4> mode_counts{};  // leaf blocks per BlockMode
  AffineMotion motion;               // as transmitted (Q16.16)
  bool motion_fell_back = false;
  std::string motion_warning;
};

struct TraceEntry {
  int frame = 0;
  BlockRect rect;
  BlockMode mode = BlockMode::kIntraDc;
  int mv_x = 0;
  int mv_y = 0;
};

struct EncodeResult {
  std::vector<uint8_t> bitstream;
  std::vector<FrameStats> stats;
  std::vector<Frame> recon;  // padded reconstructions
  std::vector<TraceEntry> trace;
  size_t container_bytes = 0;  // file header + footer
};

// Motion carried in each frame's global-motion slot. KEY frames get identity.
// With texture mode on, inter frames use motion fitted on the current frame's
// texture cells against the group's KEY frame; otherwise (or when a frame has
// no texture cells) a whole-frame fit. Depends only on the source frames, so
// callers sweeping q levels can compute it once.
std::vector<MotionEstimate> EstimateSequenceMotion(
    const std::vector<Frame>& padded, const std::vector<TextureMask>& masks,
    const EncoderConfig& config);

EncodeResult EncodeSequence(const Sequence& seq,
                            const std::vector<TextureMask>& masks,
                            const EncoderConfig& config,
                            const std::vector<MotionEstimate>* motion = nullptr);

struct DecodedFrameInfo {
  FrameType type = FrameType::kKey;
  int q_level = 0;
  bool has_motion = false;
  AffineMotion motion;
};

struct StreamInfo {
  int width = 0;   // display size
  int height = 0;
  int frame_count = 0;
  int gf_group_size = 0;
  MotionModelKind model = MotionModelKind::kRotZoom;
  std::vector<DecodedFrameInfo> frames;
};

// Returns padded reconstructions carrying the display size. Verifies the
// per-frame checksums in the footer.
Sequence DecodeSequence(std::span<const uint8_t> bitstream,
                        StreamInfo* info = nullptr);

uint32_t FrameChecksum(const Frame& frame);

// Per-frame stats as a JSON document.
std::string StatsToJson(const std::vector<FrameStats>& stats,
                        size_t file_bytes);

}  // namespace txc

#endif  // TXC_CODEC_H_
