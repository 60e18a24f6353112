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

#ifndef TXC_NN_KERNELS_H_
#define TXC_NN_KERNELS_H_

// Hot loops of the block classifier. Each kernel has a straightforward serial
// reference (`*Reference`) kept for testing and an optimized variant that is
// OpenMP-parallel over an axis whose per-element arithmetic order does not
// depend on the thread count, so both variants are deterministic.

#include <span>

namespace txc::nn::kernels {

struct ConvShape {
  int batch;
  int in_channels;
  int out_channels;
  int height;
  int width;

  int plane() const { return height * width; }
  int patch() const { return in_channels * 9; }
};

// 3x3, stride 1, zero padding 1. Cross-correlation convention:
// out[o,y,x] = bias[o] + sum_{c,dy,dx} w[o,c,dy,dx] * in[c, y+dy-1, x+dx-1].
template <typename T>
void Conv3x3ForwardReference(const ConvShape& s, std::span<const T> in,
                             std::span<const T> weight,
                             std::span<const T> bias, std::span<T> out);

// im2col + row-major GEMM. `cols` receives batch * patch() * plane() values
// and is reused by Conv3x3Backward.
template <typename T>
void Conv3x3Forward(const ConvShape& s, std::span<const T> in,
                    std::span<const T> weight, std::span<const T> bias,
                    std::span<T> cols, std::span<T> out);

// Gradients are overwritten, not accumulated.
template <typename T>
void Conv3x3BackwardReference(const ConvShape& s, std::span<const T> in,
                              std::span<const T> weight,
                              std::span<const T> grad_out,
                              std::span<T> grad_in, std::span<T> grad_weight,
                              std::span<T> grad_bias);

template <typename T>
void Conv3x3Backward(const ConvShape& s, std::span<const T> cols,
                     std::span<const T> weight, std::span<const T> grad_out,
                     std::span<T> grad_in, std::span<T> grad_weight,
                     std::span<T> grad_bias);

// out[n,o] = bias[o] + sum_d in[n,d] * weight[o,d].
template <typename T>
void LinearForwardReference(int batch, int in_dim, int out_dim,
                            std::span<const T> in, std::span<const T> weight,
                            std::span<const T> bias, std::span<T> out);
template <typename T>
void LinearForward(int batch, int in_dim, int out_dim, std::span<const T> in,
                   std::span<const T> weight, std::span<const T> bias,
                   std::span<T> out);

template <typename T>
void LinearBackward(int batch, int in_dim, int out_dim, std::span<const T> in,
                    std::span<const T> weight, std::span<const T> grad_out,
                    std::span<T> grad_in, std::span<T> grad_weight,
                    std::span<T> grad_bias);

}  // namespace txc::nn::kernels

#endif  // TXC_NN_KERNELS_H_
