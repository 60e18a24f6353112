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

#ifndef TXC_EVAL_H_
#define TXC_EVAL_H_

#include <cstddef>
#include <string>
#include <vector>

#include "txc/codec.h"
#include "txc/frame.h"
#include "txc/texture_mask.h"

namespace txc {

inline constexpr double kPsnrCap = 100.0;

// Luma PSNR from one MSE pooled over every non-texture cell of every frame,
// restricted to the display area. Capped at kPsnrCap.
double PsnrNonTexture(const Sequence& orig, const Sequence& decoded,
                      const std::vector<TextureMask>& masks);

double BitsPerFrame(size_t file_bytes, int frame_count);

struct RdPoint {
  double rate = 0;  // bits per frame
  double psnr = 0;  // dB
};
using RdCurve = std::vector<RdPoint>;

enum class BdMethod { kCubic, kPchip };

const char* BdMethodName(BdMethod method);
BdMethod ParseBdMethod(const std::string& name);

// Least-squares polynomial of degree min(3, n - 1), fitted on centred and
// scaled abscissae through Householder QR.
class PolyFit {
 public:
  PolyFit(const std::vector<double>& x, const std::vector<double>& y);
  double operator()(double x) const;
  // Closed-form definite integral.
  double Integral(double a, double b) const;

 private:
  double center_ = 0;
  double scale_ = 1;
  std::vector<double> coeffs_;  // in the scaled variable, ascending powers
};

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson).
class Pchip {
 public:
  Pchip(const std::vector<double>& x, const std::vector<double>& y);
  double operator()(double x) const;
  double Integral(double a, double b) const;

 private:
  std::vector<double> x_, y_, d_;
};

// Average rate difference in percent over the overlapping PSNR range, from
// log10(rate) fitted as a function of PSNR. Negative means the test curve
// needs fewer bits. Non-monotone curves add a warning and proceed.
double BdRate(const RdCurve& baseline, const RdCurve& test,
              BdMethod method = BdMethod::kCubic,
              std::vector<std::string>* warnings = nullptr);
// Average PSNR difference in dB over the overlapping log-rate range.
double BdPsnr(const RdCurve& baseline, const RdCurve& test,
              BdMethod method = BdMethod::kCubic,
              std::vector<std::string>* warnings = nullptr);

struct RateSaving {
  double percent = 0;
  bool first_is_smaller = false;
};

// (max - min) / max * 100 for two positive rates.
RateSaving DataRateSaving(double rate_a, double rate_b);

struct SweepOptions {
  std::vector<int> q_levels{16, 24, 28, 32};
  EncoderConfig encoder;  // q_level and texture_mode are overridden
  BdMethod method = BdMethod::kCubic;
  // Run the "texture" arm with texture mode off as well (self-comparison).
  bool texture_off_both = false;
};

struct SweepRow {
  int q_level = 0;
  double baseline_rate = 0;
  double texture_rate = 0;
  double baseline_psnr = 0;
  double texture_psnr = 0;
  size_t baseline_bytes = 0;
  size_t texture_bytes = 0;
  RateSaving saving;  // first argument is the baseline rate
};

struct SweepReport {
  std::vector<SweepRow> rows;  // one per q level, in the order given
  RdCurve baseline;            // sorted by rate
  RdCurve texture;
  double bd_rate = 0;
  double bd_psnr = 0;
  BdMethod method = BdMethod::kCubic;
  int frame_count = 0;
  std::vector<std::string> warnings;
  // Bitstreams, indexed like rows.
  std::vector<std::vector<uint8_t>> baseline_streams;
  std::vector<std::vector<uint8_t>> texture_streams;
};

SweepReport RdSweep(const Sequence& seq, const std::vector<TextureMask>& masks,
                    const SweepOptions& options);

std::string SweepToJson(const SweepReport& report);
std::string SweepToTable(const SweepReport& report);

// Standalone curve files consumed by `bd`: one arm of the sweep.
std::string CurveToJson(const SweepReport& report, bool texture_arm);
RdCurve CurveFromJson(const std::string& text);

}  // namespace txc

#endif  // TXC_EVAL_H_
