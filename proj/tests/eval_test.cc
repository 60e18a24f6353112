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
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.h"
#include "test_util.h"
#include "txc/codec.h"
#include "txc/error.h"
#include "txc/eval.h"
#include "txc/synthetic_video.h"

namespace txc {
namespace {

using test::ExpectError;

// ------------------------------------------------------------------ PSNR

Sequence Frames(int n, int w, int h, std::mt19937_64& rng) {
  Sequence s;
  for (int i = 0; i < n; ++i) s.frames.push_back(test::RandomFrame(w, h, rng));
  return s;
}

TEST(Psnr, IdenticalIsCapped) {
  std::mt19937_64 rng(1);
  const Sequence s = Frames(3, 48, 32, rng);
  const std::vector<TextureMask> masks(3, TextureMask::Uniform(3, 2, BlockLabel::kNonTexture));
  EXPECT_EQ(PsnrNonTexture(s, s, masks), kPsnrCap);
}

TEST(Psnr, OffByOneEverywhere) {
  std::mt19937_64 rng(2);
  Sequence a = Frames(2, 64, 48, rng);
  for (auto& f : a.frames) {
    for (auto& v : f.y.samples) v = static_cast<uint8_t>(std::clamp<int>(v, 1, 254));
  }
  Sequence b = a;
  for (auto& f : b.frames) {
    for (size_t i = 0; i < f.y.samples.size(); ++i) f.y.samples[i] += (i % 2) ? 1 : -1;
    for (auto& v : f.u.samples) v ^= 0x55;  // chroma does not count
  }
  std::mt19937_64 mrng(3);
  std::vector<TextureMask> masks;
  for (int i = 0; i < 2; ++i) masks.push_back(test::RandomMask(4, 3, 0.5, mrng));
  masks[0].Set(0, 0, BlockLabel::kNonTexture);
  EXPECT_NEAR(PsnrNonTexture(a, b, masks), 10 * std::log10(65025.0), 1e-12);
  EXPECT_NEAR(PsnrNonTexture(a, b, masks), 48.13, 0.005);
}

TEST(Psnr, PooledOverFramesAndCroppedToDisplay) {
  std::mt19937_64 rng(4);
  // 20x20 pads to 32x32; only the 20x20 display area counts.
  Sequence a = Frames(2, 20, 20, rng);
  Sequence b = a;
  b.frames[0].y.at(0, 0) ^= 0x10;  // error 16 in frame 0
  std::vector<TextureMask> masks(2, TextureMask::Uniform(2, 2, BlockLabel::kNonTexture));
  masks[1] = TextureMask::Uniform(2, 2, BlockLabel::kTexture);
  masks[1].Set(1, 1, BlockLabel::kNonTexture);
  // Frame 0 contributes 400 pixels, frame 1 the 4x4 display corner of cell (1, 1).
  const double mse = 256.0 / (400 + 16);
  EXPECT_NEAR(PsnrNonTexture(a, b, masks), 10 * std::log10(65025.0 / mse), 1e-12);
}

TEST(Psnr, InvariantToTextureCellContent) {
  std::mt19937_64 rng(5);
  const Sequence a = Frames(3, 64, 64, rng);
  Sequence b = a;
  for (auto& f : b.frames) {
    for (auto& v : f.y.samples) v = static_cast<uint8_t>(v + (rng() % 5) - 2);
  }
  std::vector<TextureMask> masks;
  for (int i = 0; i < 3; ++i) masks.push_back(test::RandomMask(4, 4, 0.6, rng));
  masks[0].Set(0, 0, BlockLabel::kNonTexture);
  const double base = PsnrNonTexture(a, b, masks);
  for (int trial = 0; trial < 20; ++trial) {
    Sequence c = b;
    for (int f = 0; f < 3; ++f) {
      for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
          if (masks[f].IsTexture(x / 16, y / 16)) c.frames[f].y.at(x, y) = rng() & 0xFF;
        }
      }
    }
    EXPECT_EQ(PsnrNonTexture(a, c, masks), base);
  }
}

TEST(Psnr, Errors) {
  std::mt19937_64 rng(6);
  const Sequence a = Frames(2, 32, 32, rng);
  const std::vector<TextureMask> all(2, TextureMask::Uniform(2, 2, BlockLabel::kTexture));
  ExpectError([&] { PsnrNonTexture(a, a, all); }, "empty evaluation region");
  const std::vector<TextureMask> none(2, TextureMask::Uniform(2, 2, BlockLabel::kNonTexture));
  Sequence shorter = a;
  shorter.frames.pop_back();
  ExpectError([&] { PsnrNonTexture(a, shorter, none); }, "frame count mismatch");
  const Sequence other = Frames(2, 48, 32, rng);
  ExpectError([&] { PsnrNonTexture(a, other, none); }, "frame dimensions differ");
  ExpectError([&] { PsnrNonTexture(a, a, {none[0]}); }, "missing texture mask");
}

// ------------------------------------------------------------------- rate

TEST(Rate, BitsPerFrame) {
  EXPECT_EQ(BitsPerFrame(1000, 10), 800);
  EXPECT_EQ(BitsPerFrame(1000, 1), 8000);
  ExpectError([] { BitsPerFrame(1000, 0); }, "frame count");
}

TEST(Rate, MatchesCodecAccounting) {
  PanningVideoConfig cfg;
  cfg.width = 96;
  cfg.height = 64;
  cfg.frames = 9;
  const auto v = GeneratePanningVideo(cfg, 7);
  EncoderConfig enc;
  enc.gf_group_size = 4;
  const EncodeResult r = EncodeSequence(v.sequence, v.masks, enc);
  double bits = 8.0 * r.container_bytes;
  for (const auto& s : r.stats) bits += s.bits;
  EXPECT_DOUBLE_EQ(BitsPerFrame(r.bitstream.size(), 9), bits / 9);
}

// --------------------------------------------------------------------- BD

// Independent BD computation: exact Lagrange interpolation through four
// points, integrated by composite Simpson quadrature.
double Lagrange(const std::vector<double>& x, const std::vector<double>& y, double t) {
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double l = 1;
    for (size_t j = 0; j < x.size(); ++j) {
      if (j != i) l *= (t - x[j]) / (x[i] - x[j]);
    }
    s += y[i] * l;
  }
  return s;
}

double Simpson(const std::function<double(double)>& f, double a, double b) {
  const int n = 2000;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

double OracleAverage(const RdCurve& base, const RdCurve& test, bool psnr_axis) {
  auto split = [&](const RdCurve& c, std::vector<double>& x, std::vector<double>& y) {
    for (const auto& p : c) {
      x.push_back(psnr_axis ? p.psnr : std::log10(p.rate));
      y.push_back(psnr_axis ? std::log10(p.rate) : p.psnr);
    }
  };
  std::vector<double> bx, by, tx, ty;
  split(base, bx, by);
  split(test, tx, ty);
  const double lo = std::max(*std::min_element(bx.begin(), bx.end()),
                             *std::min_element(tx.begin(), tx.end()));
  const double hi = std::min(*std::max_element(bx.begin(), bx.end()),
                             *std::max_element(tx.begin(), tx.end()));
  const double ib = Simpson([&](double t) { return Lagrange(bx, by, t); }, lo, hi);
  const double it = Simpson([&](double t) { return Lagrange(tx, ty, t); }, lo, hi);
  return (it - ib) / (hi - lo);
}

RdCurve RandomCurve(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> step_r(0.15, 0.5), step_p(0.8, 3.0);
  RdCurve c;
  double lr = std::uniform_real_distribution<double>(3.5, 5.0)(rng);
  double p = std::uniform_real_distribution<double>(28, 34)(rng);
  for (int i = 0; i < 4; ++i) {
    c.push_back({std::pow(10.0, lr), p});
    lr += step_r(rng);
    p += step_p(rng);
  }
  return c;
}

const RdCurve kCurve{{1000, 30.0}, {1800, 32.5}, {3500, 35.1}, {7000, 37.4}};

TEST(Bd, IdenticalCurves) {
  for (BdMethod m : {BdMethod::kCubic, BdMethod::kPchip}) {
    EXPECT_NEAR(BdRate(kCurve, kCurve, m), 0, 1e-9);
    EXPECT_NEAR(BdPsnr(kCurve, kCurve, m), 0, 1e-9);
  }
}

TEST(Bd, HalfRate) {
  RdCurve half = kCurve;
  for (auto& p : half) p.rate /= 2;
  for (BdMethod m : {BdMethod::kCubic, BdMethod::kPchip}) {
    EXPECT_NEAR(BdRate(kCurve, half, m), -50, 0.01);
    EXPECT_NEAR(BdRate(kCurve, half, m), -50, 1e-9);
  }
}

TEST(Bd, PlusOneDb) {
  RdCurve up = kCurve;
  for (auto& p : up) p.psnr += 1;
  for (BdMethod m : {BdMethod::kCubic, BdMethod::kPchip}) {
    EXPECT_NEAR(BdPsnr(kCurve, up, m), 1.0, 1e-6);
  }
}

TEST(Bd, MatchesQuadratureOracle) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const RdCurve a = RandomCurve(rng);
    const RdCurve b = RandomCurve(rng);
    double want_rate, want_psnr;
    try {
      want_rate = (std::pow(10.0, OracleAverage(a, b, true)) - 1) * 100;
      want_psnr = OracleAverage(a, b, false);
    } catch (...) {
      continue;
    }
    const double lo_p = std::max(a.front().psnr, b.front().psnr);
    const double hi_p = std::min(a.back().psnr, b.back().psnr);
    const double lo_r = std::max(a.front().rate, b.front().rate);
    const double hi_r = std::min(a.back().rate, b.back().rate);
    if (hi_p > lo_p) {
      EXPECT_NEAR(BdRate(a, b), want_rate, 1e-6 * std::max(1.0, std::abs(want_rate)));
    } else {
      EXPECT_THROW(BdRate(a, b), Error);
    }
    if (hi_r > lo_r) {
      EXPECT_NEAR(BdPsnr(a, b), want_psnr, 1e-8);
    } else {
      EXPECT_THROW(BdPsnr(a, b), Error);
    }
  }
}

TEST(Bd, ReciprocityAndAntisymmetry) {
  std::mt19937_64 rng(9);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    const RdCurve a = RandomCurve(rng);
    const RdCurve b = RandomCurve(rng);
    try {
      const double ab = BdRate(a, b), ba = BdRate(b, a);
      EXPECT_NEAR(ab, -ba / (1 + ba / 100), 0.1);
      EXPECT_NEAR(BdPsnr(a, b), -BdPsnr(b, a), 1e-6);
      ++checked;
    } catch (const Error&) {
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Bd, CubicFitInterpolatesFourPoints) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 100; ++t) {
    const RdCurve c = RandomCurve(rng);
    std::vector<double> x, y;
    for (const auto& p : c) {
      x.push_back(p.psnr);
      y.push_back(std::log10(p.rate));
    }
    const PolyFit fit(x, y);
    for (size_t i = 0; i < 4; ++i) EXPECT_NEAR(fit(x[i]), y[i], 1e-9);
    const double a = x[0], b = x[3];
    EXPECT_NEAR(fit.Integral(a, b),
                Simpson([&](double s) { return Lagrange(x, y, s); }, a, b), 1e-9);
  }
}

TEST(Bd, PolyFitLeastSquares) {
  // Five points on a cubic plus a perturbation orthogonal to cubics.
  const std::vector<double> x{-2, -1, 0, 1, 2};
  std::vector<double> y;
  const std::vector<double> quartic_residual{1, -4, 6, -4, 1};
  for (size_t i = 0; i < 5; ++i) {
    y.push_back(1 + 2 * x[i] - x[i] * x[i] + 0.5 * x[i] * x[i] * x[i] + 0.1 * quartic_residual[i]);
  }
  const PolyFit fit(x, y);
  for (double t : {-1.5, 0.3, 1.7}) EXPECT_NEAR(fit(t), 1 + 2 * t - t * t + 0.5 * t * t * t, 1e-9);
}

TEST(Bd, PchipInterpolatesAndPreservesMonotonicity) {
  const std::vector<double> x{0, 1, 2, 3, 6}, y{0, 0.1, 3, 3.05, 8};
  const Pchip p(x, y);
  for (size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(p(x[i]), y[i], 1e-12);
  double last = p(0);
  for (double t = 0.01; t <= 6; t += 0.01) {
    EXPECT_GE(p(t), last - 1e-12);
    last = p(t);
  }
  EXPECT_NEAR(p.Integral(0, 6), Simpson([&](double t) { return p(t); }, 0, 6), 1e-9);
  // Linear data is reproduced exactly.
  const Pchip lin({1, 2, 4, 7}, {3, 5, 9, 15});
  for (double t : {1.3, 2.9, 6.5}) EXPECT_NEAR(lin(t), 1 + 2 * t, 1e-12);
}

TEST(Bd, Errors) {
  RdCurve far = kCurve;
  for (auto& p : far) p.psnr += 20;
  ExpectError([&] { BdRate(kCurve, far); }, "no PSNR overlap");
  RdCurve bad = kCurve;
  bad[1].rate = 0;
  EXPECT_THROW(BdRate(kCurve, bad), Error);
  EXPECT_THROW(BdPsnr(kCurve, RdCurve{{1000, 30}}), Error);
  EXPECT_EQ(ParseBdMethod("pchip"), BdMethod::kPchip);
  EXPECT_EQ(ParseBdMethod(BdMethodName(BdMethod::kCubic)), BdMethod::kCubic);
  EXPECT_THROW(ParseBdMethod("spline"), Error);
}

TEST(Bd, NonMonotoneCurveWarnsAndProceeds) {
  RdCurve wobble = kCurve;
  wobble[2].psnr = 32.0;
  std::vector<std::string> warnings;
  const double r = BdRate(kCurve, wobble, BdMethod::kCubic, &warnings);
  EXPECT_TRUE(std::isfinite(r));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("not monotone"), std::string::npos);
}

// ---------------------------------------------------------------- savings

TEST(Savings, TableArithmetic) {
  const RateSaving s16 = DataRateSaving(136080, 115330);
  EXPECT_NEAR(s16.percent, 15.25, 0.01);
  EXPECT_FALSE(s16.first_is_smaller);
  EXPECT_NEAR(DataRateSaving(65811, 62905).percent, 4.42, 0.01);
  // Printed as 5.71 in the source table; the formula gives 5.07.
  EXPECT_NEAR(DataRateSaving(83874, 79621).percent, 5.07, 0.01);
  const RateSaving flipped = DataRateSaving(115330, 136080);
  EXPECT_DOUBLE_EQ(flipped.percent, s16.percent);
  EXPECT_TRUE(flipped.first_is_smaller);
  EXPECT_EQ(DataRateSaving(5, 5).percent, 0);
  ExpectError([] { DataRateSaving(0, 5); }, "non-positive rate");
  ExpectError([] { DataRateSaving(5, -1); }, "non-positive rate");
}

// ------------------------------------------------------------------ sweep

SweepOptions FastSweep() {
  SweepOptions o;
  o.encoder.gf_group_size = 8;
  return o;
}

TEST(Sweep, ShapeAndSelfComparison) {
  PanningVideoConfig cfg;
  cfg.width = 96;
  cfg.height = 80;
  cfg.frames = 8;
  const auto v = GeneratePanningVideo(cfg, 11);
  SweepOptions o = FastSweep();
  o.texture_off_both = true;
  const SweepReport r = RdSweep(v.sequence, v.masks, o);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[0].q_level, 16);
  EXPECT_EQ(r.rows[3].q_level, 32);
  EXPECT_NEAR(r.bd_rate, 0, 1e-9);
  EXPECT_NEAR(r.bd_psnr, 0, 1e-9);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.baseline_bytes, row.texture_bytes);
    EXPECT_EQ(row.saving.percent, 0);
  }
  ASSERT_EQ(r.baseline.size(), 4u);
  for (size_t i = 1; i < 4; ++i) EXPECT_GT(r.baseline[i].rate, r.baseline[i - 1].rate);
  EXPECT_EQ(r.baseline_streams.size(), 4u);
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(r.rows[i].baseline_rate, BitsPerFrame(r.baseline_streams[i].size(), 8));
  }
}

TEST(Sweep, StaticTextureClipShiftsCurveLeft) {
  std::mt19937_64 rng(12);
  Sequence seq;
  seq.frames.assign(8, test::SmoothRandomFrame(128, 128, 3, rng));
  // Mostly texture; a non-texture strip keeps the PSNR region non-empty.
  std::vector<TextureMask> masks(8, TextureMask::Uniform(8, 8, BlockLabel::kTexture));
  for (auto& m : masks) {
    for (int y = 0; y < 8; ++y) m.Set(0, y, BlockLabel::kNonTexture);
  }
  const SweepReport r = RdSweep(seq, masks, FastSweep());
  for (const auto& row : r.rows) {
    EXPECT_LT(row.texture_rate, row.baseline_rate) << "q " << row.q_level;
    EXPECT_TRUE(row.saving.first_is_smaller == false);
    EXPECT_GT(row.saving.percent, 0);
  }
  EXPECT_LT(r.bd_rate, 0);
}

TEST(Sweep, CurveJsonRoundTrip) {
  PanningVideoConfig cfg;
  cfg.width = 64;
  cfg.height = 48;
  cfg.frames = 4;
  const auto v = GeneratePanningVideo(cfg, 13);
  const SweepReport r = RdSweep(v.sequence, v.masks, FastSweep());
  const RdCurve base = CurveFromJson(CurveToJson(r, false));
  const RdCurve tex = CurveFromJson(CurveToJson(r, true));
  ASSERT_EQ(base.size(), 4u);
  // Files list points in q order.
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(base[i].rate, r.rows[i].baseline_rate);
    EXPECT_EQ(tex[i].psnr, r.rows[i].texture_psnr);
  }
  EXPECT_EQ(BdRate(base, tex, r.method), r.bd_rate);
  EXPECT_NE(SweepToJson(r).find("\"bd_rate_percent\""), std::string::npos);
  EXPECT_NE(SweepToTable(r).find("32"), std::string::npos);
  ExpectError([] { CurveFromJson("{"); }, "malformed curve file");
  ExpectError([] { CurveFromJson("{}"); }, "no points array");
}

}  // namespace
}  // namespace txc
