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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "test_util.h"
#include "txc/analyzer.h"
#include "txc/dataset.h"
#include "txc/error.h"
#include "txc/nn/net.h"
#include "txc/texture_mask.h"

namespace txc {
namespace {

using test::ExpectError;

RgbImage NoiseImage(int w, int h, std::mt19937_64& rng) {
  RgbImage img(w, h);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& v : img.rgb) v = static_cast<uint8_t>(d(rng));
  return img;
}

TEST(PreparePatches, TilesTextureSources) {
  std::mt19937_64 rng(1);
  const std::vector<RgbImage> src{NoiseImage(512, 512, rng)};
  const PatchDataset d = PreparePatches(src, kTextureClass);
  EXPECT_EQ(d.size(), 20u);
  EXPECT_EQ(d.class_counts[kTextureClass], 20);
  EXPECT_EQ(d.class_counts[kNonTextureClass], 0);
}

TEST(PreparePatches, NonTextureSourcesResizedWhole) {
  std::mt19937_64 rng(2);
  const std::vector<RgbImage> src{NoiseImage(64, 64, rng), NoiseImage(40, 90, rng)};
  const PatchDataset d = PreparePatches(src, kNonTextureClass);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.class_counts[kNonTextureClass], 2);
}

TEST(PreparePatches, ConstantSourceGivesConstantPatches) {
  const std::vector<RgbImage> src{RgbImage(512, 384, 77)};
  const PatchDataset d = PreparePatches(src, kTextureClass);
  EXPECT_EQ(d.size(), 2u + 12u);  // 2x1 crops of 256, 4x3 of 128
  for (const Patch& p : d.patches) {
    for (uint8_t v : p) EXPECT_EQ(v, 77);
  }
}

TEST(PreparePatches, AreaAverageOfFirstCrop) {
  std::mt19937_64 rng(3);
  const RgbImage img = NoiseImage(256, 256, rng);
  const PatchDataset d = PreparePatches(std::vector<RgbImage>{img}, kTextureClass);
  ASSERT_EQ(d.size(), 5u);
  const Patch& p = d.patches[0];
  for (int c = 0; c < 3; ++c) {
    for (int py = 0; py < 16; ++py) {
      for (int px = 0; px < 16; ++px) {
        int sum = 0;
        for (int y = 0; y < 16; ++y) {
          for (int x = 0; x < 16; ++x) sum += img.at(px * 16 + x, py * 16 + y, c);
        }
        const int mean = static_cast<int>(std::lround(sum / 256.0));
        EXPECT_EQ(p[(c * 16 + py) * 16 + px], mean);
      }
    }
  }
}

TEST(PreparePatches, RejectsSmallTextureSource) {
  const std::vector<RgbImage> src{RgbImage(100, 300)};
  ExpectError([&] { PreparePatches(src, kTextureClass); }, "smaller than");
}

TEST(AreaResize, FractionalCoverage) {
  RgbImage img(3, 1);
  for (int x = 0; x < 3; ++x) {
    for (int c = 0; c < 3; ++c) img.at(x, 0, c) = static_cast<uint8_t>(30 * x);
  }
  // Output pixel 0 covers source [0, 1.5): (0 * 1 + 30 * 0.5) / 1.5 = 10.
  const RgbImage out = AreaResize(img, 2, 1);
  EXPECT_EQ(out.at(0, 0, 0), 10);
  EXPECT_EQ(out.at(1, 0, 0), 50);
}

TEST(ProceduralTexture, GratingIsPeriodic) {
  ProceduralTexture t;
  t.kind = TextureKind::kGrating;
  t.waves = {{0.25, 0, 0.3, 1}};  // period 4 px along x
  const RgbImage img = t.Render(40, 3, 1.0);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x + 4 < 40; ++x) {
      EXPECT_LE(std::abs(img.at(x, y, 0) - img.at(x + 4, y, 0)), 1);
      EXPECT_EQ(img.at(x, y, 1), img.at(x, 0, 1));
    }
  }
  int half_period_diff = 0;
  for (int x = 0; x + 2 < 40; ++x) {
    half_period_diff += std::abs(img.at(x, 0, 0) - img.at(x + 2, 0, 0));
  }
  EXPECT_GT(half_period_diff, 38 * 20);
  // Scale stretches the period.
  const RgbImage wide = t.Render(40, 1, 2.0);
  for (int x = 0; x + 8 < 40; ++x) {
    EXPECT_LE(std::abs(wide.at(x, 0, 0) - wide.at(x + 8, 0, 0)), 1);
  }
}

TEST(SynthesizeDataset, DeterministicWithRequestedRatio) {
  SynthConfig cfg;
  cfg.texture_count = 60;
  const PatchDataset a = SynthesizeDataset(cfg, 9);
  const PatchDataset b = SynthesizeDataset(cfg, 9);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.class_counts[kTextureClass], 60);
  const double ratio = static_cast<double>(a.class_counts[kNonTextureClass]) /
                       a.class_counts[kTextureClass];
  EXPECT_NEAR(ratio, 36148.0 / 1740.0, 0.01 * 36148.0 / 1740.0);
  EXPECT_NE(SynthesizeDataset(cfg, 10), a);
}

TEST(SynthesizeDataset, DefaultCountsMatchImbalance) {
  const SynthConfig cfg;
  const double nontexture = std::round(cfg.texture_count * cfg.nontexture_ratio);
  EXPECT_NEAR(nontexture / cfg.texture_count, 20.78, 0.01);
}

TEST(Dataset, SaveLoadAndSplit) {
  SynthConfig cfg;
  cfg.texture_count = 20;
  const PatchDataset d = SynthesizeDataset(cfg, 4);
  test::TempDir dir("ds");
  SaveDataset(d, dir.path() / "d.txds");
  EXPECT_EQ(LoadDataset(dir.path() / "d.txds"), d);

  const auto [keep, held] = SplitDataset(d, 0.1, 5);
  EXPECT_EQ(keep.size() + held.size(), d.size());
  EXPECT_EQ(held.class_counts[kTextureClass], 2);
  EXPECT_EQ(held.class_counts[kNonTextureClass],
            static_cast<int>(std::lround(0.1 * d.class_counts[kNonTextureClass])));

  std::ofstream(dir.path() / "bad.txds") << "NOPE";
  EXPECT_THROW(LoadDataset(dir.path() / "bad.txds"), Error);
}

// Flat patches (non-texture) against uniform noise (texture).
PatchDataset ToyDataset(int per_class, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, 255);
  PatchDataset data;
  for (int i = 0; i < per_class; ++i) {
    Patch flat;
    flat.fill(static_cast<uint8_t>(d(rng)));
    data.Add(flat, kNonTextureClass);
    Patch noise;
    for (auto& v : noise) v = static_cast<uint8_t>(d(rng));
    data.Add(noise, kTextureClass);
  }
  return data;
}

nn::TrainConfig ToyConfig(int epochs) {
  nn::TrainConfig cfg;
  cfg.batch_size = 32;
  cfg.epochs = epochs;
  cfg.rng_seed = 3;
  return cfg;
}

std::string Serialize(nn::Net<float>& net) {
  std::ostringstream out;
  nn::SaveParams(net, out);
  return out.str();
}

TEST(TrainClassifier, SeparableToySetReaches99Percent) {
  const PatchDataset train = ToyDataset(200, 1);
  const PatchDataset val = ToyDataset(100, 2);
  int epochs_run = 0;
  TrainResult res = TrainClassifier(
      train, ToyConfig(10), {}, &val, [&](const EpochLog& log) {
        epochs_run = log.epoch;
        return log.val_balanced_accuracy < 0.99;
      });
  EXPECT_LE(epochs_run, 10);
  ASSERT_FALSE(res.log.empty());
  EXPECT_GE(res.log.back().val_balanced_accuracy, 0.99);
  // The loop's validation pass and a standalone evaluation agree.
  EXPECT_EQ(res.log.back().val_balanced_accuracy, BalancedAccuracy(res.net, val));
}

TEST(TrainClassifier, ZeroEpochsReturnsInitialWeights) {
  const PatchDataset train = ToyDataset(10, 1);
  TrainResult res = TrainClassifier(train, ToyConfig(0));
  EXPECT_TRUE(res.log.empty());
  nn::Net<float> fresh{nn::NetSpec{}};
  fresh.InitHe(ToyConfig(0).rng_seed);
  EXPECT_EQ(Serialize(res.net), Serialize(fresh));
}

TEST(TrainClassifier, Deterministic) {
  const PatchDataset train = ToyDataset(40, 6);
  TrainResult a = TrainClassifier(train, ToyConfig(2));
  TrainResult b = TrainClassifier(train, ToyConfig(2));
  EXPECT_EQ(Serialize(a.net), Serialize(b.net));
  ASSERT_EQ(a.log.size(), 2u);
  EXPECT_EQ(a.log[1].loss, b.log[1].loss);
}

TEST(TrainClassifier, RejectsSingleClass) {
  PatchDataset d;
  Patch p{};
  d.Add(p, kTextureClass);
  d.Add(p, kTextureClass);
  ExpectError([&] { TrainClassifier(d, ToyConfig(1)); }, "both classes");
}

TEST(BalancedAccuracy, MeanOfRecalls) {
  const std::vector<float> probs{0.9f, 0.8f, 0.1f, 0.2f, 0.7f};
  const std::vector<int> labels{kTextureClass, kTextureClass, kTextureClass,
                                kNonTextureClass, kNonTextureClass};
  // Texture recall 2/3, non-texture recall 1/2.
  EXPECT_NEAR(BalancedAccuracy(probs, labels), (2.0 / 3 + 0.5) / 2, 1e-12);
}

TEST(BlockToRgbPatch, Bt601FullRange) {
  std::mt19937_64 rng(7);
  const Frame f = test::RandomFrame(32, 16, rng);
  const Patch p = BlockToRgbPatch(f, 1, 0);
  auto clamp = [](double v) { return std::clamp(v, 0.0, 255.0); };
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      const double Y = f.y.at(16 + x, y);
      const double U = f.u.at((16 + x) / 2, y / 2) - 128.0;
      const double V = f.v.at((16 + x) / 2, y / 2) - 128.0;
      const double rgb[3] = {clamp(Y + 1.402 * V),
                             clamp(Y - 0.344136 * U - 0.714136 * V),
                             clamp(Y + 1.772 * U)};
      for (int c = 0; c < 3; ++c) {
        EXPECT_LE(std::abs(p[(c * 16 + y) * 16 + x] - rgb[c]), 0.51);
      }
    }
  }
}

class SegmentTest : public ::testing::Test {
 protected:
  void SetUp() override { net_.InitHe(13); }
  nn::Net<float> net_{nn::NetSpec{}};
};

TEST_F(SegmentTest, GridSizeAndThreshold) {
  std::mt19937_64 rng(8);
  const Frame f = test::RandomFrame(32, 32, rng);
  const TextureMask m = SegmentFrame(f, net_);
  EXPECT_EQ(m.grid_w, 2);
  EXPECT_EQ(m.grid_h, 2);
  for (double t : {0.0, 0.3, 0.5, 0.8, 1.0}) {
    const TextureMask mt = SegmentFrame(f, net_, t);
    for (size_t i = 0; i < mt.labels.size(); ++i) {
      EXPECT_EQ(mt.labels[i] == BlockLabel::kTexture, mt.probs[i] >= t);
    }
  }
  EXPECT_EQ(SegmentFrame(f, net_, 0.0).TextureCount(), 4);
}

TEST_F(SegmentTest, IdenticalBlocksGetIdenticalLabels) {
  std::mt19937_64 rng(9);
  const Frame tile = test::RandomFrame(16, 16, rng);
  Frame f = Frame::Blank(64, 48);
  for (int by = 0; by < 3; ++by) {
    for (int bx = 0; bx < 4; ++bx) {
      for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
          f.y.at(bx * 16 + x, by * 16 + y) = tile.y.at(x, y);
          if (x < 8 && y < 8) {
            f.u.at(bx * 8 + x, by * 8 + y) = tile.u.at(x, y);
            f.v.at(bx * 8 + x, by * 8 + y) = tile.v.at(x, y);
          }
        }
      }
    }
  }
  const TextureMask m = SegmentFrame(f, net_);
  for (size_t i = 1; i < m.probs.size(); ++i) {
    EXPECT_EQ(m.probs[i], m.probs[0]);
    EXPECT_EQ(m.labels[i], m.labels[0]);
  }
}

TEST_F(SegmentTest, RejectsUnpaddedFrame) {
  EXPECT_THROW(SegmentFrame(Frame::Blank(20, 16), net_), Error);
}

TEST(ReferenceWeights, FlatFrameIsNonTexture) {
  const auto path = test::SourcePath("data/reference_weights.txnn");
  ASSERT_TRUE(std::filesystem::exists(path)) << path;
  nn::Net<float> net{nn::NetSpec{}};
  std::ifstream in(path, std::ios::binary);
  nn::LoadParams(net, in);
  const TextureMask m = SegmentFrame(Frame::Blank(64, 64, 128, 128), net);
  EXPECT_EQ(m.TextureCount(), 0);
}

// Union-find labelling, independent of the library's flood fill.
TextureMask CleanOracle(const TextureMask& mask, int min_region) {
  const int n = mask.grid_w * mask.grid_h;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto tex = [&](int x, int y) { return mask.IsTexture(x, y); };
  for (int y = 0; y < mask.grid_h; ++y) {
    for (int x = 0; x < mask.grid_w; ++x) {
      if (!tex(x, y)) continue;
      if (x + 1 < mask.grid_w && tex(x + 1, y)) {
        parent[find(y * mask.grid_w + x)] = find(y * mask.grid_w + x + 1);
      }
      if (y + 1 < mask.grid_h && tex(x, y + 1)) {
        parent[find(y * mask.grid_w + x)] = find((y + 1) * mask.grid_w + x);
      }
    }
  }
  std::vector<int> size(n, 0);
  for (int i = 0; i < n; ++i) {
    if (mask.labels[i] == BlockLabel::kTexture) ++size[find(i)];
  }
  TextureMask out = mask;
  for (int i = 0; i < n; ++i) {
    if (mask.labels[i] == BlockLabel::kTexture && size[find(i)] < min_region) {
      out.labels[i] = BlockLabel::kNonTexture;
    }
  }
  return out;
}

TextureMask MaskFromRows(const std::vector<std::string>& rows) {
  TextureMask m = TextureMask::Uniform(static_cast<int>(rows[0].size()),
                                       static_cast<int>(rows.size()),
                                       BlockLabel::kNonTexture);
  for (size_t y = 0; y < rows.size(); ++y) {
    for (size_t x = 0; x < rows[y].size(); ++x) {
      if (rows[y][x] == '#') m.Set(x, y, BlockLabel::kTexture);
    }
  }
  return m;
}

TEST(CleanMask, HandCases) {
  const TextureMask m = MaskFromRows({"#..##",
                                      ".#.##",
                                      "....."});
  EXPECT_EQ(CleanMask(m, 0).labels, m.labels);
  EXPECT_EQ(CleanMask(m, 1).labels, m.labels);
  // Diagonal neighbours are separate components.
  EXPECT_EQ(CleanMask(m, 2).labels, MaskFromRows({"...##",
                                                  "...##",
                                                  "....."}).labels);
  EXPECT_EQ(CleanMask(m, 5).TextureCount(), 0);
  EXPECT_THROW(CleanMask(m, -1), Error);
}

TEST(CleanMask, MatchesUnionFindOracle) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> dim(1, 14);
    const TextureMask m =
        test::RandomMask(dim(rng), dim(rng), 0.55, rng);
    for (int min_region : {0, 2, 3, 5, 9}) {
      const TextureMask cleaned = CleanMask(m, min_region);
      EXPECT_EQ(cleaned.labels, CleanOracle(m, min_region).labels);
      EXPECT_LE(cleaned.TextureCount(), m.TextureCount());
      EXPECT_EQ(CleanMask(cleaned, min_region).labels, cleaned.labels);
    }
  }
}

TEST(MaskIo, PgmAndProbabilitiesRoundTrip) {
  std::mt19937_64 rng(11);
  TextureMask m = test::RandomMask(7, 5, 0.5, rng);
  for (size_t i = 0; i < m.probs.size(); ++i) m.probs[i] = 0.125f * (i % 9);
  test::TempDir dir("mask");
  WriteMaskPgm(m, dir.path() / "m.pgm");
  WriteMaskProbs(m, dir.path() / "m.probs");
  TextureMask back = ReadMaskPgm(dir.path() / "m.pgm");
  EXPECT_EQ(back.labels, m.labels);
  EXPECT_EQ(back.grid_w, 7);
  ReadMaskProbs(back, dir.path() / "m.probs");
  EXPECT_EQ(back.probs, m.probs);

  const auto bytes = test::ReadBytes(dir.path() / "m.pgm");
  ASSERT_GE(bytes.size(), 35u);
  const size_t raster = bytes.size() - 35;
  for (int i = 0; i < 35; ++i) {
    EXPECT_EQ(bytes[raster + i], m.labels[i] == BlockLabel::kTexture ? 255 : 0);
  }
  std::ofstream(dir.path() / "bad.pgm") << "P2\n1 1\n255\n0";
  EXPECT_THROW(ReadMaskPgm(dir.path() / "bad.pgm"), Error);
}

TEST(MaskIo, NamingAndSequenceLoad) {
  EXPECT_EQ(MaskPath("d", "clip", 3), std::filesystem::path("d/clip.mask.3.pgm"));
  std::mt19937_64 rng(12);
  std::vector<TextureMask> masks;
  for (int i = 0; i < 3; ++i) masks.push_back(test::RandomMask(4, 3, 0.5, rng));
  test::TempDir dir("masks");
  WriteMasks(masks, dir.path(), "clip");
  const auto back = LoadMasks(dir.path(), "clip", 3);
  ASSERT_EQ(back.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(back[i].labels, masks[i].labels);
  // A single stem in the directory is found under another name.
  EXPECT_EQ(LoadMasks(dir.path(), "other", 3).size(), 3u);
  EXPECT_THROW(LoadMasks(dir.path(), "clip", 4), Error);
}

}  // namespace
}  // namespace txc
