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

#ifndef TXC_BLOCK_CODER_H_
#define TXC_BLOCK_CODER_H_

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "txc/bitio.h"
#include "txc/codec.h"
#include "txc/frame.h"
#include "txc/global_motion.h"

namespace txc {

struct MotionVector {
  int x = 0;
  int y = 0;
  bool operator==(const MotionVector&) const = default;
};

struct LeafDecision {
  BlockRect rect;
  BlockMode mode = BlockMode::kIntraDc;
  MotionVector mv;
};

// Leaves of one superblock in coding order. Internal nodes are implied: a node
// without a matching leaf is split.
using SuperblockPlan = std::vector<LeafDecision>;

// What a frame's blocks may predict from.
struct FrameContext {
  FrameType type = FrameType::kKey;
  int q_level = 24;
  int width = 0;  // padded luma size
  int height = 0;
  const Frame* prev = nullptr;    // INTER_MV reference
  const Frame* warped = nullptr;  // texture reference warped by `motion`
  AffineMotion motion;
};

// Pixels of one block: luma size x size, chroma size/2 x size/2.
struct BlockPixels {
  BlockRect rect;
  std::array<std::vector<uint8_t>, 3> planes;
  explicit BlockPixels(const BlockRect& r);
};

// Quantized levels: luma 16x16 TUs then U and V 8x8 TUs, raster order within
// each plane.
using LeafLevels = std::vector<std::vector<int32_t>>;

// DC prediction only reads reconstructed samples bordering the superblock
// (row above, column left), so leaves inside one superblock are independent.
void PredictLeaf(const FrameContext& ctx, const Frame& recon, int sb_x,
                 int sb_y, const LeafDecision& leaf, BlockPixels* pred);

// pred + dequantized residual, clipped to 8 bits.
void ReconstructLeaf(const BlockPixels& pred, const LeafLevels& levels, int q,
                     BlockPixels* out);

bool SplitFlagCoded(const FrameContext& ctx, const BlockRect& rect);

// Writes the leaf syntax (split flag, mode, vector, coefficients).
void WriteLeaf(BitWriter& w, const FrameContext& ctx, const LeafDecision& leaf,
               const LeafLevels& levels);
size_t LeafBits(const FrameContext& ctx, const LeafDecision& leaf,
                const LeafLevels& levels);
void WriteTu(BitWriter& w, std::span<const int32_t> levels, int n);

struct LeafEval {
  LeafDecision leaf;
  LeafLevels levels;
  BlockPixels recon;
  double ssd = 0;
  size_t bits = 0;
  double cost = 0;
};

class SuperblockEncoder {
 public:
  SuperblockEncoder(const FrameContext& ctx, const Frame& source, Frame& recon,
                    int search_range);

  // Blocks for which this returns true are coded TEXTURE without further
  // search or splitting.
  void set_texture_decision(std::function<bool(const BlockRect&)> decide) {
    texture_decision_ = std::move(decide);
  }
  void set_lambda(double lambda) { lambda_ = lambda; }
  double lambda() const { return lambda_; }

  // Rate-distortion search; leaves `recon` untouched.
  SuperblockPlan Search(int sb_x, int sb_y, double* cost = nullptr);

  LeafEval EvaluateLeaf(int sb_x, int sb_y, const LeafDecision& leaf) const;

  // Integer vector for INTER_MV by diamond search.
  MotionVector SearchMv(const BlockRect& rect) const;

  // Writes `plan` and commits its reconstruction. Returns SSD + lambda * bits.
  double Encode(int sb_x, int sb_y, const SuperblockPlan& plan, BitWriter& w);

  // Cost of `plan` without writing or committing.
  double PlanCost(int sb_x, int sb_y, const SuperblockPlan& plan) const;

 private:
  double SearchNode(int sb_x, int sb_y, const BlockRect& rect,
                    SuperblockPlan* plan);
  uint32_t MvSad(const BlockRect& rect, MotionVector mv) const;

  FrameContext ctx_;
  const Frame& source_;
  Frame& recon_;
  int search_range_;
  double lambda_;
  std::function<bool(const BlockRect&)> texture_decision_;
};

// Parses one superblock and writes its reconstruction into `recon`.
void DecodeSuperblock(BitReader& r, const FrameContext& ctx, int sb_x,
                      int sb_y, Frame& recon,
                      std::vector<LeafDecision>* leaves = nullptr);

}  // namespace txc

#endif  // TXC_BLOCK_CODER_H_
