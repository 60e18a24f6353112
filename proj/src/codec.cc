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

#include "txc/codec.h"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include "json.hpp"

#include "txc/bitio.h"
#include "txc/block_coder.h"
#include "txc/error.h"

namespace txc {
namespace {

constexpr char kMagic[4] = {'T', 'X', 'C', '1'};

int RoundUp16(int v) { return (v + kBlockGrid - 1) / kBlockGrid * kBlockGrid; }

bool CellsAllTexture(const TextureMask& mask, int x0, int y0, int x1, int y1) {
  // Inclusive pixel range -> inclusive cell range.
  const int cx0 = x0 / kBlockGrid;
  const int cy0 = y0 / kBlockGrid;
  const int cx1 = x1 / kBlockGrid;
  const int cy1 = y1 / kBlockGrid;
  if (cx0 < 0 || cy0 < 0 || cx1 >= mask.grid_w || cy1 >= mask.grid_h) {
    return false;
  }
  for (int cy = cy0; cy <= cy1; ++cy) {
    for (int cx = cx0; cx <= cx1; ++cx) {
      if (!mask.IsTexture(cx, cy)) return false;
    }
  }
  return true;
}

}  // namespace

void EncoderConfig::Validate() const {
  if (gf_group_size < 4 || gf_group_size > 16) {
    throw Error("gf_group_size must be in [4, 16]");
  }
  if (q_level < 1 || q_level > 63) throw Error("q_level must be in [1, 63]");
  if (search_range < 0 || search_range > kMaxMvMagnitude) {
    throw Error("search range out of bounds");
  }
  if (motion.search_range < 0 || motion.ransac_iterations < 1 ||
      !(motion.ransac_threshold > 0)) {
    throw Error("invalid motion search configuration");
  }
}

bool IsTextureBlock(const BlockRect& rect, const TextureMask& cur_mask,
                    const TextureMask& ref_mask, const AffineMotion& m) {
  if (!CellsAllTexture(cur_mask, rect.x, rect.y, rect.x + rect.size - 1,
                       rect.y + rect.size - 1)) {
    return false;
  }
  const auto corners = WarpRect(m, rect);
  double min_x = corners[0][0], max_x = corners[0][0];
  double min_y = corners[0][1], max_y = corners[0][1];
  for (const auto& c : corners) {
    min_x = std::min(min_x, c[0]);
    max_x = std::max(max_x, c[0]);
    min_y = std::min(min_y, c[1]);
    max_y = std::max(max_y, c[1]);
  }
  min_x -= 1;
  min_y -= 1;
  max_x += 1;
  max_y += 1;
  const double width = static_cast<double>(ref_mask.grid_w) * kBlockGrid;
  const double height = static_cast<double>(ref_mask.grid_h) * kBlockGrid;
  // Negated comparisons also reject NaN.
  if (!(min_x >= 0 && min_y >= 0 && max_x < width && max_y < height)) {
    return false;
  }
  return CellsAllTexture(ref_mask, static_cast<int>(min_x),
                         static_cast<int>(min_y), static_cast<int>(max_x),
                         static_cast<int>(max_y));
}

std::vector<MotionEstimate> EstimateSequenceMotion(
    const std::vector<Frame>& padded, const std::vector<TextureMask>& masks,
    const EncoderConfig& config) {
  std::vector<MotionEstimate> out(padded.size());
  int key = 0;
  for (size_t i = 0; i < padded.size(); ++i) {
    const int idx = static_cast<int>(i);
    if (FrameTypeAt(idx, config.gf_group_size) == FrameType::kKey) {
      key = idx;
      out[i].kind = config.model;
      continue;
    }
    const bool texture = config.texture_mode && i < masks.size() &&
                         masks[i].TextureCount() > 0;
    const TextureMask whole =
        TextureMask::ForFrame(padded[i], BlockLabel::kTexture);
    out[i] = EstimateTextureMotion(padded[i], padded[key],
                                   texture ? masks[i] : whole, config.model,
                                   config.motion);
  }
  return out;
}

uint32_t FrameChecksum(const Frame& frame) {
  uLong crc = crc32(0L, Z_NULL, 0);
  for (const Plane* p : {&frame.y, &frame.u, &frame.v}) {
    crc = crc32(crc, p->samples.data(), static_cast<uInt>(p->samples.size()));
  }
  return static_cast<uint32_t>(crc);
}

EncodeResult EncodeSequence(const Sequence& seq,
                            const std::vector<TextureMask>& masks,
                            const EncoderConfig& config,
                            const std::vector<MotionEstimate>* motion) {
  config.Validate();
  if (seq.empty()) throw Error("cannot encode an empty sequence");
  if (seq.size() > 0xffff) throw Error("too many frames");
  std::vector<Frame> padded;
  padded.reserve(seq.size());
  for (const auto& f : seq.frames) padded.push_back(PadFrame(f));
  const int width = padded[0].width();
  const int height = padded[0].height();
  const int display_w = padded[0].display_width;
  const int display_h = padded[0].display_height;
  if (display_w > 0xffff || display_h > 0xffff) {
    throw Error("frame dimensions exceed the container limit");
  }
  for (const auto& f : padded) {
    if (f.width() != width || f.height() != height ||
        f.display_width != display_w || f.display_height != display_h) {
      throw Error("frames differ in size");
    }
  }
  if (config.texture_mode) {
    if (masks.size() < padded.size()) {
      throw Error("missing texture mask for frame " +
                  std::to_string(masks.size()));
    }
    for (size_t i = 0; i < padded.size(); ++i) {
      if (!masks[i].Matches(padded[i])) {
        throw Error("mask dimensions do not match frame " + std::to_string(i));
      }
    }
  }
  std::vector<MotionEstimate> estimated;
  if (motion == nullptr) {
    estimated = EstimateSequenceMotion(padded, masks, config);
    motion = &estimated;
  }
  if (motion->size() != padded.size()) throw Error("motion list size mismatch");

  EncodeResult result;
  auto& out = result.bitstream;
  out.insert(out.end(), kMagic, kMagic + 4);
  PutU8(out, kBitstreamVersion);
  PutU16(out, display_w);
  PutU16(out, display_h);
  PutU16(out, static_cast<uint32_t>(padded.size()));
  PutU8(out, config.gf_group_size);
  PutU8(out, static_cast<uint32_t>(config.model));

  int key = 0;
  for (size_t i = 0; i < padded.size(); ++i) {
    const int idx = static_cast<int>(i);
    FrameContext ctx;
    ctx.type = FrameTypeAt(idx, config.gf_group_size);
    ctx.q_level = config.q_level;
    ctx.width = width;
    ctx.height = height;
    FrameStats st;
    st.frame_index = idx;
    st.type = ctx.type;
    st.q_level = config.q_level;

    const size_t frame_start = out.size();
    PutU8(out, static_cast<uint32_t>(ctx.type));
    PutU8(out, config.q_level);
    Frame warped;
    if (ctx.type == FrameType::kKey) {
      key = idx;
    } else {
      const auto fixed = (*motion)[i].motion.ToFixed();
      for (int32_t v : fixed) PutU32(out, static_cast<uint32_t>(v));
      ctx.motion = AffineMotion::FromFixed(fixed);
      warped = WarpFrame(result.recon[key], ctx.motion);
      ctx.warped = &warped;
      ctx.prev = &result.recon[i - 1];
      st.motion = ctx.motion;
      st.motion_fell_back = (*motion)[i].fell_back;
      st.motion_warning = (*motion)[i].warning;
    }

    Frame recon = Frame::Blank(width, height, 0, 0);
    recon.display_width = display_w;
    recon.display_height = display_h;
    recon.frame_index = idx;
    SuperblockEncoder enc(ctx, padded[i], recon, config.search_range);
    if (config.texture_mode && ctx.type == FrameType::kInter) {
      const TextureMask& cur_mask = masks[i];
      const TextureMask& ref_mask = masks[key];
      const AffineMotion m = ctx.motion;
      enc.set_texture_decision([&cur_mask, &ref_mask, m](const BlockRect& r) {
        return IsTextureBlock(r, cur_mask, ref_mask, m);
      });
    }
    BitWriter w;
    long long texture_area = 0;
    for (int sb_y = 0; sb_y < height; sb_y += kSuperblockSize) {
      for (int sb_x = 0; sb_x < width; sb_x += kSuperblockSize) {
        const SuperblockPlan plan = enc.Search(sb_x, sb_y);
        enc.Encode(sb_x, sb_y, plan, w);
        for (const auto& leaf : plan) {
          ++st.mode_counts[static_cast<int>(leaf.mode)];
          if (leaf.mode == BlockMode::kTexture) {
            ++st.texture_blocks;
            texture_area += static_cast<long long>(leaf.rect.size) *
                            leaf.rect.size;
          }
          if (config.trace) {
            result.trace.push_back(
                {idx, leaf.rect, leaf.mode, leaf.mv.x, leaf.mv.y});
          }
        }
      }
    }
    w.ByteAlign();
    out.insert(out.end(), w.bytes().begin(), w.bytes().end());
    st.bits = 8 * (out.size() - frame_start);
    st.texture_area_fraction =
        static_cast<double>(texture_area) / (static_cast<double>(width) * height);
    result.stats.push_back(st);
    result.recon.push_back(std::move(recon));
  }
  for (const auto& r : result.recon) PutU32(out, FrameChecksum(r));
  result.container_bytes = kFileHeaderBytes + 4 * padded.size();
  return result;
}

Sequence DecodeSequence(std::span<const uint8_t> bitstream, StreamInfo* info) {
  ByteReader br(bitstream);
  if (bitstream.size() < 4 || !std::equal(kMagic, kMagic + 4, bitstream.begin())) {
    throw Error("not a TXC1 bitstream (bad magic)");
  }
  br.Skip(4);
  if (br.U8() != kBitstreamVersion) throw Error("unsupported bitstream version");
  StreamInfo si;
  si.width = static_cast<int>(br.U16());
  si.height = static_cast<int>(br.U16());
  si.frame_count = static_cast<int>(br.U16());
  si.gf_group_size = static_cast<int>(br.U8());
  const uint32_t model = br.U8();
  if (si.width == 0 || si.height == 0) throw Error("invalid frame dimensions");
  if (si.frame_count == 0) throw Error("stream has no frames");
  if (si.gf_group_size < 4 || si.gf_group_size > 16) {
    throw Error("gf_group_size out of range");
  }
  if (model > static_cast<uint32_t>(MotionModelKind::kAffine)) {
    throw Error("motion model out of range");
  }
  si.model = static_cast<MotionModelKind>(model);
  const int width = RoundUp16(si.width);
  const int height = RoundUp16(si.height);

  Sequence seq;
  int key = 0;
  for (int i = 0; i < si.frame_count; ++i) {
    FrameContext ctx;
    ctx.width = width;
    ctx.height = height;
    const uint32_t type = br.U8();
    if (type > 1) throw Error("frame type out of range");
    ctx.type = static_cast<FrameType>(type);
    if (ctx.type != FrameTypeAt(i, si.gf_group_size)) {
      throw Error("unexpected frame type at frame " + std::to_string(i));
    }
    ctx.q_level = static_cast<int>(br.U8());
    if (ctx.q_level < 1 || ctx.q_level > 63) throw Error("q_level out of range");
    DecodedFrameInfo fi;
    fi.type = ctx.type;
    fi.q_level = ctx.q_level;
    Frame warped;
    if (ctx.type == FrameType::kKey) {
      key = i;
    } else {
      std::array<int32_t, 6> fixed{};
      for (auto& v : fixed) v = static_cast<int32_t>(br.U32());
      ctx.motion = AffineMotion::FromFixed(fixed);
      fi.has_motion = true;
      fi.motion = ctx.motion;
      warped = WarpFrame(seq.frames[key], ctx.motion);
      ctx.warped = &warped;
      ctx.prev = &seq.frames[i - 1];
    }
    Frame recon = Frame::Blank(width, height, 0, 0);
    recon.display_width = si.width;
    recon.display_height = si.height;
    recon.frame_index = i;
    BitReader r(br.Rest());
    for (int sb_y = 0; sb_y < height; sb_y += kSuperblockSize) {
      for (int sb_x = 0; sb_x < width; sb_x += kSuperblockSize) {
        DecodeSuperblock(r, ctx, sb_x, sb_y, recon);
      }
    }
    br.Skip(r.byte_position());
    seq.frames.push_back(std::move(recon));
    si.frames.push_back(fi);
  }
  for (int i = 0; i < si.frame_count; ++i) {
    if (br.U32() != FrameChecksum(seq.frames[i])) {
      throw Error("reconstruction checksum mismatch at frame " +
                  std::to_string(i));
    }
  }
  if (br.remaining() != 0) throw Error("trailing data after footer");
  if (info != nullptr) *info = std::move(si);
  return seq;
}

std::string StatsToJson(const std::vector<FrameStats>& stats,
                        size_t file_bytes) {
  nlohmann::ordered_json doc;
  size_t total = 0;
  auto frames = nlohmann::ordered_json::array();
  for (const auto& s : stats) {
    total += s.bits;
    nlohmann::ordered_json f;
    f["index"] = s.frame_index;
    f["type"] = s.type == FrameType::kKey ? "key" : "inter";
    f["q_level"] = s.q_level;
    f["bits"] = s.bits;
    f["texture_blocks"] = s.texture_blocks;
    f["texture_area_fraction"] = s.texture_area_fraction;
    nlohmann::ordered_json modes;
    for (int m = 0; m < 4; ++m) {
      modes[BlockModeName(static_cast<BlockMode>(m))] = s.mode_counts[m];
    }
    f["modes"] = modes;
    if (s.type == FrameType::kInter) {
      f["motion"] = s.motion.ToFixed();
      f["motion_fell_back"] = s.motion_fell_back;
    }
    frames.push_back(f);
  }
  doc["frame_count"] = stats.size();
  doc["file_bytes"] = file_bytes;
  doc["frame_bits_total"] = total;
  doc["container_bits"] = 8 * file_bytes - total;
  doc["bits_per_frame"] =
      stats.empty() ? 0.0 : 8.0 * file_bytes / static_cast<double>(stats.size());
  doc["frames"] = frames;
  return doc.dump(2) + "\n";
}

}  // namespace txc
