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

#include "txc/block_coder.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "txc/error.h"
#include "txc/transform.h"

namespace txc {
namespace {

constexpr int kMaxLevel = 1 << 20;

int TuSize(int plane) { return plane == 0 ? 16 : 8; }

int PlaneBlockSize(const BlockRect& rect, int plane) {
  return plane == 0 ? rect.size : rect.size / 2;
}

// Counts bits with the BitWriter interface.
struct BitCounter {
  void PutBit(int) { ++bits; }
  void PutBits(uint32_t, int count) { bits += count; }
  void PutUe(uint32_t v) { bits += BitWriter::UeLength(v); }
  void PutSe(int32_t v) { bits += BitWriter::SeLength(v); }
  size_t bits = 0;
};

template <typename Sink>
void EmitTu(Sink& w, std::span<const int32_t> levels, int n) {
  const auto scan = ZigZag(n);
  uint32_t nnz = 0;
  for (int32_t l : levels) nnz += l != 0;
  w.PutUe(nnz);
  uint32_t run = 0;
  for (int pos : scan) {
    const int32_t l = levels[pos];
    if (l == 0) {
      ++run;
      continue;
    }
    w.PutUe(run);
    w.PutBit(l < 0);
    w.PutUe(static_cast<uint32_t>(std::abs(l)) - 1);
    run = 0;
  }
}

template <typename Sink>
void EmitLeaf(Sink& w, const FrameContext& ctx, const LeafDecision& leaf,
              const LeafLevels& levels) {
  if (ctx.type == FrameType::kKey && leaf.mode != BlockMode::kIntraDc) {
    throw Error("KEY frames are intra only");
  }
  if (SplitFlagCoded(ctx, leaf.rect)) w.PutBit(0);
  if (ctx.type == FrameType::kInter) {
    w.PutBits(static_cast<uint32_t>(leaf.mode), 2);
  }
  if (leaf.mode == BlockMode::kInterMv) {
    w.PutSe(leaf.mv.x);
    w.PutSe(leaf.mv.y);
  }
  if (leaf.mode == BlockMode::kTexture) return;
  const int tus = (leaf.rect.size / 16) * (leaf.rect.size / 16);
  if (static_cast<int>(levels.size()) != 3 * tus) {
    throw Error("leaf coefficient layout mismatch");
  }
  for (int t = 0; t < 3 * tus; ++t) EmitTu(w, levels[t], t < tus ? 16 : 8);
}

std::vector<int32_t> ReadTu(BitReader& r, int n) {
  const uint32_t count = static_cast<uint32_t>(n * n);
  std::vector<int32_t> levels(count, 0);
  const uint32_t nnz = r.GetUe();
  if (nnz > count) throw Error("coefficient count out of range");
  const auto scan = ZigZag(n);
  uint64_t pos = 0;
  for (uint32_t k = 0; k < nnz; ++k) {
    pos += r.GetUe();
    if (pos >= count) throw Error("coefficient run past end of block");
    const bool negative = r.GetBit();
    const uint64_t mag = uint64_t{r.GetUe()} + 1;
    if (mag > kMaxLevel) throw Error("coefficient level out of range");
    levels[scan[pos]] = negative ? -static_cast<int32_t>(mag)
                                 : static_cast<int32_t>(mag);
    ++pos;
  }
  return levels;
}

bool Inside(const FrameContext& ctx, const BlockRect& r) {
  return r.x < ctx.width && r.y < ctx.height;
}

bool Fits(const FrameContext& ctx, const BlockRect& r) {
  return r.x + r.size <= ctx.width && r.y + r.size <= ctx.height;
}

std::array<BlockRect, 4> Children(const BlockRect& r) {
  const int h = r.size / 2;
  return {BlockRect{r.x, r.y, h}, BlockRect{r.x + h, r.y, h},
          BlockRect{r.x, r.y + h, h}, BlockRect{r.x + h, r.y + h, h}};
}

void CheckFrameSize(const FrameContext& ctx, const Frame& f) {
  if (f.width() != ctx.width || f.height() != ctx.height) {
    throw Error("frame size does not match coding context");
  }
}

}  // namespace

const char* BlockModeName(BlockMode mode) {
  switch (mode) {
    case BlockMode::kIntraDc: return "intra_dc";
    case BlockMode::kInterMv: return "inter_mv";
    case BlockMode::kGlobalWarp: return "global_warp";
    case BlockMode::kTexture: return "texture";
  }
  return "?";
}

BlockPixels::BlockPixels(const BlockRect& r) : rect(r) {
  const size_t luma = static_cast<size_t>(r.size) * r.size;
  planes[0].assign(luma, 0);
  planes[1].assign(luma / 4, 0);
  planes[2].assign(luma / 4, 0);
}

void PredictLeaf(const FrameContext& ctx, const Frame& recon, int sb_x,
                 int sb_y, const LeafDecision& leaf, BlockPixels* pred) {
  const BlockRect& r = leaf.rect;
  for (int p = 0; p < 3; ++p) {
    const int div = p == 0 ? 1 : 2;
    const int bx = r.x / div;
    const int by = r.y / div;
    const int bs = PlaneBlockSize(r, p);
    uint8_t* dst = pred->planes[p].data();
    const auto id = static_cast<PlaneId>(p);
    switch (leaf.mode) {
      case BlockMode::kIntraDc: {
        const Plane& cur = recon.plane(id);
        const int sx = sb_x / div;
        const int sy = sb_y / div;
        int sum = 0;
        int count = 0;
        if (sy > 0) {
          for (int i = 0; i < bs; ++i) sum += cur.at(bx + i, sy - 1);
          count += bs;
        }
        if (sx > 0) {
          for (int j = 0; j < bs; ++j) sum += cur.at(sx - 1, by + j);
          count += bs;
        }
        const int dc = count > 0 ? (sum + count / 2) / count : 128;
        std::fill(dst, dst + bs * bs, static_cast<uint8_t>(dc));
        break;
      }
      case BlockMode::kInterMv: {
        if (ctx.prev == nullptr) throw Error("INTER_MV without a reference");
        const Plane& ref = ctx.prev->plane(id);
        if (p == 0) {
          for (int j = 0; j < bs; ++j) {
            for (int i = 0; i < bs; ++i) {
              dst[j * bs + i] = ref.ClampedAt(bx + i + leaf.mv.x,
                                              by + j + leaf.mv.y);
            }
          }
          break;
        }
        // Chroma at half-pel: positions in half-sample units.
        for (int j = 0; j < bs; ++j) {
          const long long hy = 2LL * (by + j) + leaf.mv.y;
          const long long iy = hy >> 1;
          const int fy = static_cast<int>(hy & 1);
          for (int i = 0; i < bs; ++i) {
            const long long hx = 2LL * (bx + i) + leaf.mv.x;
            const long long ix = hx >> 1;
            const int fx = static_cast<int>(hx & 1);
            const int v = (2 - fx) * (2 - fy) * ref.ClampedAt(ix, iy) +
                          fx * (2 - fy) * ref.ClampedAt(ix + 1, iy) +
                          (2 - fx) * fy * ref.ClampedAt(ix, iy + 1) +
                          fx * fy * ref.ClampedAt(ix + 1, iy + 1);
            dst[j * bs + i] = static_cast<uint8_t>((v + 2) >> 2);
          }
        }
        break;
      }
      case BlockMode::kGlobalWarp:
      case BlockMode::kTexture: {
        if (ctx.warped == nullptr) throw Error("warp mode without a reference");
        const Plane& ref = ctx.warped->plane(id);
        for (int j = 0; j < bs; ++j) {
          std::copy_n(ref.RowPtr(by + j) + bx, bs, dst + j * bs);
        }
        break;
      }
    }
  }
}

void ReconstructLeaf(const BlockPixels& pred, const LeafLevels& levels, int q,
                     BlockPixels* out) {
  out->rect = pred.rect;
  out->planes = pred.planes;
  if (levels.empty()) return;
  const int tus_side = pred.rect.size / 16;
  for (int p = 0; p < 3; ++p) {
    const int n = TuSize(p);
    const int bs = PlaneBlockSize(pred.rect, p);
    for (int ty = 0; ty < tus_side; ++ty) {
      for (int tx = 0; tx < tus_side; ++tx) {
        const int t = p * tus_side * tus_side + ty * tus_side + tx;
        const auto res = InverseTransformQuantize(levels[t], n, q);
        for (int j = 0; j < n; ++j) {
          for (int i = 0; i < n; ++i) {
            const size_t idx =
                static_cast<size_t>(ty * n + j) * bs + tx * n + i;
            out->planes[p][idx] = static_cast<uint8_t>(
                std::clamp(pred.planes[p][idx] + res[j * n + i], 0, 255));
          }
        }
      }
    }
  }
}

bool SplitFlagCoded(const FrameContext& ctx, const BlockRect& rect) {
  return rect.size > kMinBlockSize && Fits(ctx, rect);
}

void WriteLeaf(BitWriter& w, const FrameContext& ctx, const LeafDecision& leaf,
               const LeafLevels& levels) {
  EmitLeaf(w, ctx, leaf, levels);
}

size_t LeafBits(const FrameContext& ctx, const LeafDecision& leaf,
                const LeafLevels& levels) {
  BitCounter c;
  EmitLeaf(c, ctx, leaf, levels);
  return c.bits;
}

void WriteTu(BitWriter& w, std::span<const int32_t> levels, int n) {
  EmitTu(w, levels, n);
}

// ---------------------------------------------------------------------------

SuperblockEncoder::SuperblockEncoder(const FrameContext& ctx,
                                     const Frame& source, Frame& recon,
                                     int search_range)
    : ctx_(ctx),
      source_(source),
      recon_(recon),
      search_range_(search_range),
      lambda_(Lambda(ctx.q_level)) {
  CheckFrameSize(ctx_, source_);
  CheckFrameSize(ctx_, recon_);
}

LeafEval SuperblockEncoder::EvaluateLeaf(int sb_x, int sb_y,
                                         const LeafDecision& leaf) const {
  const BlockRect& r = leaf.rect;
  BlockPixels pred(r);
  PredictLeaf(ctx_, recon_, sb_x, sb_y, leaf, &pred);
  LeafEval e{leaf, {}, BlockPixels(r)};
  if (leaf.mode != BlockMode::kTexture) {
    const int tus_side = r.size / 16;
    e.levels.reserve(3 * tus_side * tus_side);
    for (int p = 0; p < 3; ++p) {
      const int n = TuSize(p);
      const int bs = PlaneBlockSize(r, p);
      const int div = p == 0 ? 1 : 2;
      const Plane& src = source_.plane(static_cast<PlaneId>(p));
      std::vector<int32_t> residual(static_cast<size_t>(n) * n);
      for (int ty = 0; ty < tus_side; ++ty) {
        for (int tx = 0; tx < tus_side; ++tx) {
          bool any = false;
          for (int j = 0; j < n; ++j) {
            const uint8_t* s = src.RowPtr(r.y / div + ty * n + j) + r.x / div +
                               tx * n;
            const uint8_t* pr =
                pred.planes[p].data() + static_cast<size_t>(ty * n + j) * bs +
                tx * n;
            for (int i = 0; i < n; ++i) {
              residual[j * n + i] = s[i] - pr[i];
              any = any || residual[j * n + i] != 0;
            }
          }
          e.levels.push_back(
              any ? TransformQuantize(residual, n, ctx_.q_level)
                  : std::vector<int32_t>(residual.size(), 0));
        }
      }
    }
  }
  ReconstructLeaf(pred, e.levels, ctx_.q_level, &e.recon);
  double ssd = 0;
  for (int p = 0; p < 3; ++p) {
    const int bs = PlaneBlockSize(r, p);
    const int div = p == 0 ? 1 : 2;
    const Plane& src = source_.plane(static_cast<PlaneId>(p));
    for (int j = 0; j < bs; ++j) {
      const uint8_t* s = src.RowPtr(r.y / div + j) + r.x / div;
      const uint8_t* rc = e.recon.planes[p].data() + static_cast<size_t>(j) * bs;
      for (int i = 0; i < bs; ++i) {
        const int d = s[i] - rc[i];
        ssd += d * d;
      }
    }
  }
  e.ssd = ssd;
  e.bits = LeafBits(ctx_, leaf, e.levels);
  e.cost = ssd + lambda_ * static_cast<double>(e.bits);
  return e;
}

uint32_t SuperblockEncoder::MvSad(const BlockRect& r, MotionVector mv) const {
  const Plane& cur = source_.y;
  const Plane& ref = ctx_.prev->y;
  uint32_t sad = 0;
  const bool inside = r.x + mv.x >= 0 && r.y + mv.y >= 0 &&
                      r.x + mv.x + r.size <= ref.width &&
                      r.y + mv.y + r.size <= ref.height;
  for (int j = 0; j < r.size; ++j) {
    const uint8_t* a = cur.RowPtr(r.y + j) + r.x;
    if (inside) {
      const uint8_t* b = ref.RowPtr(r.y + mv.y + j) + r.x + mv.x;
      for (int i = 0; i < r.size; ++i) sad += std::abs(a[i] - b[i]);
    } else {
      for (int i = 0; i < r.size; ++i) {
        sad += std::abs(a[i] - ref.ClampedAt(r.x + mv.x + i, r.y + mv.y + j));
      }
    }
  }
  return sad;
}

MotionVector SuperblockEncoder::SearchMv(const BlockRect& r) const {
  if (ctx_.prev == nullptr) throw Error("INTER_MV without a reference");
  const double cx = r.x + (r.size - 1) / 2.0;
  const double cy = r.y + (r.size - 1) / 2.0;
  const auto mapped = ctx_.motion.Map(cx, cy);
  auto clamp_range = [&](double v) {
    if (!std::isfinite(v)) return 0;
    return static_cast<int>(
        std::clamp(std::round(v), -static_cast<double>(search_range_),
                   static_cast<double>(search_range_)));
  };
  MotionVector best{};
  uint32_t best_sad = MvSad(r, best);
  const MotionVector gm{clamp_range(mapped[0] - cx), clamp_range(mapped[1] - cy)};
  if (!(gm == best)) {
    const uint32_t sad = MvSad(r, gm);
    if (sad < best_sad) {
      best = gm;
      best_sad = sad;
    }
  }
  for (int step : {8, 4, 2, 1}) {
    bool moved = true;
    while (moved) {
      moved = false;
      const MotionVector center = best;
      const MotionVector cand[4] = {{center.x + step, center.y},
                                    {center.x - step, center.y},
                                    {center.x, center.y + step},
                                    {center.x, center.y - step}};
      for (const auto& c : cand) {
        if (std::abs(c.x) > search_range_ || std::abs(c.y) > search_range_) {
          continue;
        }
        const uint32_t sad = MvSad(r, c);
        if (sad < best_sad) {
          best = c;
          best_sad = sad;
          moved = true;
        }
      }
    }
  }
  return best;
}

double SuperblockEncoder::SearchNode(int sb_x, int sb_y, const BlockRect& r,
                                     SuperblockPlan* plan) {
  if (!Inside(ctx_, r)) return 0;
  if (!Fits(ctx_, r)) {
    double total = 0;
    for (const auto& c : Children(r)) total += SearchNode(sb_x, sb_y, c, plan);
    return total;
  }
  if (texture_decision_ && texture_decision_(r)) {
    const LeafDecision leaf{r, BlockMode::kTexture, {}};
    plan->push_back(leaf);
    return EvaluateLeaf(sb_x, sb_y, leaf).cost;
  }
  // Candidates in tie-break priority; a later one must be strictly cheaper.
  std::vector<LeafDecision> candidates;
  if (ctx_.type == FrameType::kInter) {
    candidates.push_back({r, BlockMode::kGlobalWarp, {}});
    candidates.push_back({r, BlockMode::kInterMv, SearchMv(r)});
  }
  candidates.push_back({r, BlockMode::kIntraDc, {}});
  LeafDecision best_leaf;
  double best = 0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const double cost = EvaluateLeaf(sb_x, sb_y, candidates[i]).cost;
    if (i == 0 || cost < best) {
      best = cost;
      best_leaf = candidates[i];
    }
  }
  if (r.size > kMinBlockSize) {
    SuperblockPlan children;
    double split = lambda_;  // split flag
    for (const auto& c : Children(r)) {
      split += SearchNode(sb_x, sb_y, c, &children);
    }
    if (split < best) {
      plan->insert(plan->end(), children.begin(), children.end());
      return split;
    }
  }
  plan->push_back(best_leaf);
  return best;
}

SuperblockPlan SuperblockEncoder::Search(int sb_x, int sb_y, double* cost) {
  SuperblockPlan plan;
  const double c =
      SearchNode(sb_x, sb_y, BlockRect{sb_x, sb_y, kSuperblockSize}, &plan);
  if (cost != nullptr) *cost = c;
  return plan;
}

namespace {

struct PlanWalk {
  const FrameContext& ctx;
  const SuperblockEncoder& enc;
  const SuperblockPlan& plan;
  int sb_x;
  int sb_y;
  BitWriter* writer;
  std::vector<LeafEval>* evals;

  double Node(const BlockRect& r) {
    if (!Inside(ctx, r)) return 0;
    double total = 0;
    if (!Fits(ctx, r)) {
      for (const auto& c : Children(r)) total += Node(c);
      return total;
    }
    const auto it = std::find_if(plan.begin(), plan.end(),
                                 [&](const LeafDecision& l) {
                                   return l.rect == r;
                                 });
    if (it != plan.end()) {
      LeafEval e = enc.EvaluateLeaf(sb_x, sb_y, *it);
      if (writer != nullptr) WriteLeaf(*writer, ctx, e.leaf, e.levels);
      total = e.cost;
      if (evals != nullptr) evals->push_back(std::move(e));
      return total;
    }
    if (r.size <= kMinBlockSize) throw Error("superblock plan is incomplete");
    if (writer != nullptr) writer->PutBit(1);
    total = enc.lambda();
    for (const auto& c : Children(r)) total += Node(c);
    return total;
  }
};

}  // namespace

double SuperblockEncoder::PlanCost(int sb_x, int sb_y,
                                   const SuperblockPlan& plan) const {
  PlanWalk walk{ctx_, *this, plan, sb_x, sb_y, nullptr, nullptr};
  return walk.Node(BlockRect{sb_x, sb_y, kSuperblockSize});
}

double SuperblockEncoder::Encode(int sb_x, int sb_y, const SuperblockPlan& plan,
                                 BitWriter& w) {
  std::vector<LeafEval> evals;
  PlanWalk walk{ctx_, *this, plan, sb_x, sb_y, &w, &evals};
  const double cost = walk.Node(BlockRect{sb_x, sb_y, kSuperblockSize});
  for (const auto& e : evals) {
    for (int p = 0; p < 3; ++p) {
      const int div = p == 0 ? 1 : 2;
      const int bs = PlaneBlockSize(e.leaf.rect, p);
      Plane& dst = recon_.plane(static_cast<PlaneId>(p));
      for (int j = 0; j < bs; ++j) {
        std::copy_n(e.recon.planes[p].data() + static_cast<size_t>(j) * bs, bs,
                    dst.RowPtr(e.leaf.rect.y / div + j) + e.leaf.rect.x / div);
      }
    }
  }
  return cost;
}

// ---------------------------------------------------------------------------

namespace {

void DecodeNode(BitReader& r, const FrameContext& ctx, int sb_x, int sb_y,
                const BlockRect& rect, Frame& recon,
                std::vector<LeafDecision>* leaves) {
  if (!Inside(ctx, rect)) return;
  bool split = !Fits(ctx, rect);
  if (!split && SplitFlagCoded(ctx, rect)) split = r.GetBit();
  if (split) {
    for (const auto& c : Children(rect)) {
      DecodeNode(r, ctx, sb_x, sb_y, c, recon, leaves);
    }
    return;
  }
  LeafDecision leaf{rect, BlockMode::kIntraDc, {}};
  if (ctx.type == FrameType::kInter) {
    leaf.mode = static_cast<BlockMode>(r.GetBits(2));
  }
  if (leaf.mode == BlockMode::kInterMv) {
    leaf.mv.x = r.GetSe();
    leaf.mv.y = r.GetSe();
    if (std::abs(leaf.mv.x) > kMaxMvMagnitude ||
        std::abs(leaf.mv.y) > kMaxMvMagnitude) {
      throw Error("motion vector out of range");
    }
  }
  LeafLevels levels;
  if (leaf.mode != BlockMode::kTexture) {
    const int tus = (rect.size / 16) * (rect.size / 16);
    for (int t = 0; t < 3 * tus; ++t) levels.push_back(ReadTu(r, t < tus ? 16 : 8));
  }
  BlockPixels pred(rect);
  PredictLeaf(ctx, recon, sb_x, sb_y, leaf, &pred);
  BlockPixels out(rect);
  ReconstructLeaf(pred, levels, ctx.q_level, &out);
  for (int p = 0; p < 3; ++p) {
    const int div = p == 0 ? 1 : 2;
    const int bs = PlaneBlockSize(rect, p);
    Plane& dst = recon.plane(static_cast<PlaneId>(p));
    for (int j = 0; j < bs; ++j) {
      std::copy_n(out.planes[p].data() + static_cast<size_t>(j) * bs, bs,
                  dst.RowPtr(rect.y / div + j) + rect.x / div);
    }
  }
  if (leaves != nullptr) leaves->push_back(leaf);
}

}  // namespace

void DecodeSuperblock(BitReader& r, const FrameContext& ctx, int sb_x,
                      int sb_y, Frame& recon,
                      std::vector<LeafDecision>* leaves) {
  CheckFrameSize(ctx, recon);
  DecodeNode(r, ctx, sb_x, sb_y, BlockRect{sb_x, sb_y, kSuperblockSize}, recon,
             leaves);
}

}  // namespace txc
