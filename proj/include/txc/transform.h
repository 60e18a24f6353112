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

#ifndef TXC_TRANSFORM_H_
#define TXC_TRANSFORM_H_

#include <cstdint>
#include <span>
#include <vector>

namespace txc {

// Orthonormal 2-D DCT-II for n x n blocks, n in {8, 16}. Row-major buffers.
void ForwardDct(std::span<const int32_t> residual, int n,
                std::span<double> coeffs);
void InverseDct(std::span<const double> coeffs, int n, std::span<double> out);

// Uniform quantizer with step q, rounding half away from zero.
int32_t QuantizeCoefficient(double coeff, int q);

// residual -> levels, and levels -> reconstructed residual (rounded half away
// from zero). q_step equals the quantization level.
std::vector<int32_t> TransformQuantize(std::span<const int32_t> residual,
                                       int n, int q);
std::vector<int32_t> InverseTransformQuantize(std::span<const int32_t> levels,
                                              int n, int q);

// Zig-zag scan order: entry i is the raster index of the i-th scanned
// coefficient.
std::span<const int> ZigZag(int n);

}  // namespace txc

#endif  // TXC_TRANSFORM_H_
