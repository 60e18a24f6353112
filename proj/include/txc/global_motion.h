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

#ifndef TXC_GLOBAL_MOTION_H_
#define TXC_GLOBAL_MOTION_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "txc/frame.h"
#include "txc/texture_mask.h"

namespace txc {

// Maps current-frame luma coordinates into the reference frame:
//   x' = a11*x + a12*y + tx,  y' = a21*x + a22*y + ty.
struct AffineMotion {
  double a11 = 1;
  double a12 = 0;
  double a21 = 0;
  double a22 = 1;
  double tx = 0;
  double ty = 0;

  static AffineMotion Identity() { return {}; }
  static AffineMotion Translation(double tx, double ty) {
    return {1, 0, 0, 1, tx, ty};
  }
  // zoom * rotation(angle) plus translation.
  static AffineMotion RotZoom(double zoom, double angle_rad, double tx,
                              double ty);

  std::array<double, 2> Map(double x, double y) const {
    return {a11 * x + a12 * y + tx, a21 * x + a22 * y + ty};
  }
  double Det() const { return a11 * a22 - a12 * a21; }
  bool IsFinite() const;

  // Q16.16 fixed point in the order a11, a12, a21, a22, tx, ty.
  std::array<int32_t, 6> ToFixed() const;
  static AffineMotion FromFixed(const std::array<int32_t, 6>& q);
  // Round trip through Q16.16; this is what the codec transmits and warps.
  AffineMotion Quantized() const { return FromFixed(ToFixed()); }

  std::string ToString() const;
  bool operator==(const AffineMotion&) const = default;
};

enum class MotionModelKind : uint8_t {
  kTranslation = 0,  // tx, ty
  kRotZoom = 1,      // a11 = a22, a21 = -a12, tx, ty
  kAffine = 2,
};

const char* MotionModelName(MotionModelKind kind);
MotionModelKind ParseMotionModel(const std::string& name);
int MinimalSampleSize(MotionModelKind kind);

struct MotionSearchConfig {
  int search_range = 32;
  double ransac_threshold = 1.5;
  int ransac_iterations = 200;
  uint64_t ransac_seed = 1;
};

// Luma point in the current frame and its match in the reference.
struct Correspondence {
  double x = 0;
  double y = 0;
  double ref_x = 0;
  double ref_y = 0;
};

struct MotionEstimate {
  AffineMotion motion;
  MotionModelKind kind = MotionModelKind::kRotZoom;
  double inlier_fraction = 0;
  int correspondences = 0;
  // Set when the requested model was replaced by a translational one (too
  // few texture cells or a degenerate fit).
  bool fell_back = false;
  std::string warning;
};

struct BlockMatch {
  int dx = 0;
  int dy = 0;
  uint32_t sad = UINT32_MAX;
};

// Exhaustive integer search of a size x size luma block over [-range, range]^2,
// restricted to displacements that keep the block inside the reference.
// Ties prefer smaller |dx| + |dy|, then raster order. The reference variant
// reads samples one at a time; FullSearch walks rows with a vectorizable SAD.
BlockMatch FullSearchReference(const Plane& cur, const Plane& ref, int x,
                               int y, int size, int range);
BlockMatch FullSearch(const Plane& cur, const Plane& ref, int x, int y,
                      int size, int range);

// FullSearch for many blocks; OpenMP-parallel over blocks.
std::vector<BlockMatch> MatchBlocks(const Plane& cur, const Plane& ref,
                                    std::span<const std::array<int, 2>> origins,
                                    int size, int range);

// Refines an integer match to 1/8 pel by bilinear SAD descent (half, quarter,
// eighth steps). Returns the fractional offset added to (dx, dy).
std::array<double, 2> RefineSubpel(const Plane& cur, const Plane& ref, int x,
                                   int y, int size, const BlockMatch& match);

// Block-matching correspondences at the centers of every texture cell.
std::vector<Correspondence> TextureCorrespondences(
    const Frame& cur, const Frame& ref, const TextureMask& cur_mask,
    const MotionSearchConfig& config);

// Least-squares fit of `kind` to every correspondence. Throws Error when the
// system is singular.
AffineMotion FitMotion(std::span<const Correspondence> points,
                       MotionModelKind kind);

double ResidualPx(const AffineMotion& m, const Correspondence& c);

// RANSAC + least-squares refit of `kind` over texture-cell correspondences
// of `cur` against `ref`. Fewer than 6 texture cells forces a translational
// model; none at all throws Error("no texture region"). A fit whose
// determinant leaves [0.25, 4] falls back to the best translation.
MotionEstimate EstimateTextureMotion(const Frame& cur, const Frame& ref,
                                     const TextureMask& cur_mask,
                                     MotionModelKind kind,
                                     const MotionSearchConfig& config = {});

// Bilinear sampling at Q16.16 motion, edge-clamped, 1/256-pel weights. Fills a
// w x h block whose top-left destination pixel is (x0, y0). `chroma` halves
// the translation.
void WarpBlock(const Plane& ref, const AffineMotion& m, bool chroma, int x0,
               int y0, int w, int h, uint8_t* dst, int dst_stride);
Frame WarpFrame(const Frame& ref, const AffineMotion& m);

// Mapped corners (x, y), (x+s-1, y), (x, y+s-1), (x+s-1, y+s-1).
std::array<std::array<double, 2>, 4> WarpRect(const AffineMotion& m,
                                              const BlockRect& rect);

}  // namespace txc

#endif  // TXC_GLOBAL_MOTION_H_
