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

// Serial reference kernels against their optimized / OpenMP counterparts.
// Thread-count arguments apply to the optimized variants only.

#include <array>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "txc/frame.h"
#include "txc/global_motion.h"
#include "txc/nn/kernels.h"
#include "txc/parallel.h"

namespace txc {
namespace {

using nn::kernels::ConvShape;

// One training batch through the first conv stage of the default network.
constexpr ConvShape kConv{512, 3, 16, 16, 16};

struct ConvData {
  std::vector<float> in, weight, bias, cols, out;
  explicit ConvData(const ConvShape& s) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<float> d(-1, 1);
    in.resize(static_cast<size_t>(s.batch) * s.in_channels * s.plane());
    weight.resize(static_cast<size_t>(s.out_channels) * s.patch());
    bias.resize(s.out_channels);
    for (auto* v : {&in, &weight, &bias}) {
      for (auto& x : *v) x = d(rng);
    }
    cols.resize(static_cast<size_t>(s.batch) * s.patch() * s.plane());
    out.resize(static_cast<size_t>(s.batch) * s.out_channels * s.plane());
  }
};

void BM_ConvReference(benchmark::State& state) {
  ConvData d(kConv);
  for (auto _ : state) {
    nn::kernels::Conv3x3ForwardReference<float>(kConv, d.in, d.weight, d.bias, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
}
BENCHMARK(BM_ConvReference)->Unit(benchmark::kMillisecond);

void BM_Conv(benchmark::State& state) {
  SetNumThreads(static_cast<int>(state.range(0)));
  ConvData d(kConv);
  for (auto _ : state) {
    nn::kernels::Conv3x3Forward<float>(kConv, d.in, d.weight, d.bias, d.cols, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  SetNumThreads(1);
}
BENCHMARK(BM_Conv)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

constexpr int kBatch = 512, kIn = 1024, kOut = 128;

struct LinearData {
  std::vector<float> in, weight, bias, out;
  LinearData()
      : in(kBatch * kIn), weight(kOut * kIn), bias(kOut), out(kBatch * kOut) {
    std::mt19937 rng(2);
    std::uniform_real_distribution<float> d(-1, 1);
    for (auto* v : {&in, &weight, &bias}) {
      for (auto& x : *v) x = d(rng);
    }
  }
};

void BM_LinearReference(benchmark::State& state) {
  LinearData d;
  for (auto _ : state) {
    nn::kernels::LinearForwardReference<float>(kBatch, kIn, kOut, d.in, d.weight, d.bias,
                                               d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
}
BENCHMARK(BM_LinearReference)->Unit(benchmark::kMillisecond);

void BM_Linear(benchmark::State& state) {
  SetNumThreads(static_cast<int>(state.range(0)));
  LinearData d;
  for (auto _ : state) {
    nn::kernels::LinearForward<float>(kBatch, kIn, kOut, d.in, d.weight, d.bias, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  SetNumThreads(1);
}
BENCHMARK(BM_Linear)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

Frame SmoothFrame(int w, int h, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Frame f = Frame::Blank(w, h);
  std::uniform_int_distribution<int> d(0, 255);
  std::vector<int> lattice((w / 8 + 2) * (h / 8 + 2));
  for (auto& v : lattice) v = d(rng);
  const int lw = w / 8 + 2;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int gx = x / 8, gy = y / 8;
      const double fx = (x % 8) / 8.0, fy = (y % 8) / 8.0;
      const double v = (1 - fx) * (1 - fy) * lattice[gy * lw + gx] +
                       fx * (1 - fy) * lattice[gy * lw + gx + 1] +
                       (1 - fx) * fy * lattice[(gy + 1) * lw + gx] +
                       fx * fy * lattice[(gy + 1) * lw + gx + 1];
      f.y.at(x, y) = static_cast<uint8_t>(v);
    }
  }
  return f;
}

struct SearchData {
  Frame ref = SmoothFrame(352, 288, 3);
  Frame cur = WarpFrame(ref, AffineMotion::RotZoom(1.01, 0.01, 3.5, -2));
  std::vector<std::array<int, 2>> origins;
  SearchData() {
    for (int y = 0; y + 16 <= 288; y += 16) {
      for (int x = 0; x + 16 <= 352; x += 16) origins.push_back({x, y});
    }
  }
};

void BM_BlockSearchReference(benchmark::State& state) {
  SearchData d;
  for (auto _ : state) {
    for (const auto& o : d.origins) {
      benchmark::DoNotOptimize(FullSearchReference(d.cur.y, d.ref.y, o[0], o[1], 16, 16));
    }
  }
}
BENCHMARK(BM_BlockSearchReference)->Unit(benchmark::kMillisecond);

void BM_BlockSearch(benchmark::State& state) {
  SetNumThreads(static_cast<int>(state.range(0)));
  SearchData d;
  for (auto _ : state) {
    benchmark::DoNotOptimize(MatchBlocks(d.cur.y, d.ref.y, d.origins, 16, 16));
  }
  SetNumThreads(1);
}
BENCHMARK(BM_BlockSearch)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_WarpFrame(benchmark::State& state) {
  SetNumThreads(static_cast<int>(state.range(0)));
  const Frame ref = SmoothFrame(352, 288, 4);
  const AffineMotion m = AffineMotion::RotZoom(1.02, 0.02, 1.25, -0.5);
  for (auto _ : state) benchmark::DoNotOptimize(WarpFrame(ref, m));
  SetNumThreads(1);
}
BENCHMARK(BM_WarpFrame)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond)->UseRealTime();

}  // namespace
}  // namespace txc

BENCHMARK_MAIN();
