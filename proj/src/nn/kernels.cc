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

#include "txc/nn/kernels.h"

#include <algorithm>
#include <cstddef>
#include <vector>

#include "txc/parallel.h"

namespace txc::nn::kernels {
namespace {

template <typename T>
void Im2Col(const ConvShape& s, const T* in, T* cols) {
  const int h = s.height;
  const int w = s.width;
  for (int c = 0; c < s.in_channels; ++c) {
    const T* src = in + static_cast<size_t>(c) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* dst = cols + (static_cast<size_t>(c) * 9 + ky * 3 + kx) * h * w;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            dst[y * w + x] = (sy >= 0 && sy < h && sx >= 0 && sx < w)
                                 ? src[sy * w + sx]
                                 : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void Col2ImAdd(const ConvShape& s, const T* cols, T* out) {
  const int h = s.height;
  const int w = s.width;
  std::fill(out, out + static_cast<size_t>(s.in_channels) * h * w, T(0));
  for (int c = 0; c < s.in_channels; ++c) {
    T* dst = out + static_cast<size_t>(c) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* src =
            cols + (static_cast<size_t>(c) * 9 + ky * 3 + kx) * h * w;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= w) continue;
            dst[sy * w + sx] += src[y * w + x];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
void Conv3x3ForwardReference(const ConvShape& s, std::span<const T> in,
                             std::span<const T> weight,
                             std::span<const T> bias, std::span<T> out) {
  const int h = s.height;
  const int w = s.width;
  for (int n = 0; n < s.batch; ++n) {
    for (int o = 0; o < s.out_channels; ++o) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          T acc = bias[o];
          for (int c = 0; c < s.in_channels; ++c) {
            for (int ky = 0; ky < 3; ++ky) {
              for (int kx = 0; kx < 3; ++kx) {
                const int sy = y + ky - 1;
                const int sx = x + kx - 1;
                const T v = (sy >= 0 && sy < h && sx >= 0 && sx < w)
                                ? in[((static_cast<size_t>(n) * s.in_channels +
                                       c) * h + sy) * w + sx]
                                : T(0);
                acc += weight[((static_cast<size_t>(o) * s.in_channels + c) *
                                   3 + ky) * 3 + kx] * v;
              }
            }
          }
          out[((static_cast<size_t>(n) * s.out_channels + o) * h + y) * w +
              x] = acc;
        }
      }
    }
  }
}

template <typename T>
void Conv3x3Forward(const ConvShape& s, std::span<const T> in,
                    std::span<const T> weight, std::span<const T> bias,
                    std::span<T> cols, std::span<T> out) {
  const int plane = s.plane();
  const int patch = s.patch();
  const size_t in_item = static_cast<size_t>(s.in_channels) * plane;
  const size_t out_item = static_cast<size_t>(s.out_channels) * plane;
  const size_t col_item = static_cast<size_t>(patch) * plane;
#pragma omp parallel for schedule(static) num_threads(txc::NumThreads())
  for (int n = 0; n < s.batch; ++n) {
    T* col = cols.data() + n * col_item;
    Im2Col(s, in.data() + n * in_item, col);
    T* dst = out.data() + n * out_item;
    for (int o = 0; o < s.out_channels; ++o) {
      T* row = dst + static_cast<size_t>(o) * plane;
      std::fill(row, row + plane, bias[o]);
      const T* wrow = weight.data() + static_cast<size_t>(o) * patch;
      for (int k = 0; k < patch; ++k) {
        const T wk = wrow[k];
        const T* crow = col + static_cast<size_t>(k) * plane;
        for (int p = 0; p < plane; ++p) row[p] += wk * crow[p];
      }
    }
  }
}

template <typename T>
void Conv3x3BackwardReference(const ConvShape& s, std::span<const T> in,
                              std::span<const T> weight,
                              std::span<const T> grad_out,
                              std::span<T> grad_in, std::span<T> grad_weight,
                              std::span<T> grad_bias) {
  const int h = s.height;
  const int w = s.width;
  std::fill(grad_in.begin(), grad_in.end(), T(0));
  std::fill(grad_weight.begin(), grad_weight.end(), T(0));
  std::fill(grad_bias.begin(), grad_bias.end(), T(0));
  for (int n = 0; n < s.batch; ++n) {
    for (int o = 0; o < s.out_channels; ++o) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const T g = grad_out[((static_cast<size_t>(n) * s.out_channels + o) *
                                    h + y) * w + x];
          grad_bias[o] += g;
          for (int c = 0; c < s.in_channels; ++c) {
            for (int ky = 0; ky < 3; ++ky) {
              for (int kx = 0; kx < 3; ++kx) {
                const int sy = y + ky - 1;
                const int sx = x + kx - 1;
                if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
                const size_t wi =
                    ((static_cast<size_t>(o) * s.in_channels + c) * 3 + ky) *
                        3 + kx;
                const size_t ii =
                    ((static_cast<size_t>(n) * s.in_channels + c) * h + sy) *
                        w + sx;
                grad_weight[wi] += g * in[ii];
                grad_in[ii] += g * weight[wi];
              }
            }
          }
        }
      }
    }
  }
}

template <typename T>
void Conv3x3Backward(const ConvShape& s, std::span<const T> cols,
                     std::span<const T> weight, std::span<const T> grad_out,
                     std::span<T> grad_in, std::span<T> grad_weight,
                     std::span<T> grad_bias) {
  const int plane = s.plane();
  const int patch = s.patch();
  const size_t in_item = static_cast<size_t>(s.in_channels) * plane;
  const size_t out_item = static_cast<size_t>(s.out_channels) * plane;
  const size_t col_item = static_cast<size_t>(patch) * plane;

  // Weight and bias gradients: each output channel owns its row and walks the
  // batch in order.
#pragma omp parallel for schedule(static) num_threads(txc::NumThreads())
  for (int o = 0; o < s.out_channels; ++o) {
    T* gw = grad_weight.data() + static_cast<size_t>(o) * patch;
    std::fill(gw, gw + patch, T(0));
    T gb = 0;
    for (int n = 0; n < s.batch; ++n) {
      const T* g = grad_out.data() + n * out_item + static_cast<size_t>(o) * plane;
      const T* col = cols.data() + n * col_item;
      for (int p = 0; p < plane; ++p) gb += g[p];
      for (int k = 0; k < patch; ++k) {
        const T* crow = col + static_cast<size_t>(k) * plane;
        T acc = 0;
        for (int p = 0; p < plane; ++p) acc += g[p] * crow[p];
        gw[k] += acc;
      }
    }
    grad_bias[o] = gb;
  }

  if (grad_in.empty()) return;
#pragma omp parallel num_threads(txc::NumThreads())
  {
    std::vector<T> dcol(col_item);
#pragma omp for schedule(static)
    for (int n = 0; n < s.batch; ++n) {
      std::fill(dcol.begin(), dcol.end(), T(0));
      const T* g = grad_out.data() + n * out_item;
      for (int o = 0; o < s.out_channels; ++o) {
        const T* grow = g + static_cast<size_t>(o) * plane;
        const T* wrow = weight.data() + static_cast<size_t>(o) * patch;
        for (int k = 0; k < patch; ++k) {
          const T wk = wrow[k];
          T* drow = dcol.data() + static_cast<size_t>(k) * plane;
          for (int p = 0; p < plane; ++p) drow[p] += wk * grow[p];
        }
      }
      Col2ImAdd(s, dcol.data(), grad_in.data() + n * in_item);
    }
  }
}

template <typename T>
void LinearForwardReference(int batch, int in_dim, int out_dim,
                            std::span<const T> in, std::span<const T> weight,
                            std::span<const T> bias, std::span<T> out) {
  for (int n = 0; n < batch; ++n) {
    for (int o = 0; o < out_dim; ++o) {
      T acc = bias[o];
      for (int d = 0; d < in_dim; ++d) {
        acc += in[static_cast<size_t>(n) * in_dim + d] *
               weight[static_cast<size_t>(o) * in_dim + d];
      }
      out[static_cast<size_t>(n) * out_dim + o] = acc;
    }
  }
}

template <typename T>
void LinearForward(int batch, int in_dim, int out_dim, std::span<const T> in,
                   std::span<const T> weight, std::span<const T> bias,
                   std::span<T> out) {
#pragma omp parallel for schedule(static) num_threads(txc::NumThreads())
  for (int n = 0; n < batch; ++n) {
    const T* x = in.data() + static_cast<size_t>(n) * in_dim;
    for (int o = 0; o < out_dim; ++o) {
      const T* wrow = weight.data() + static_cast<size_t>(o) * in_dim;
      T acc = bias[o];
      for (int d = 0; d < in_dim; ++d) acc += x[d] * wrow[d];
      out[static_cast<size_t>(n) * out_dim + o] = acc;
    }
  }
}

template <typename T>
void LinearBackward(int batch, int in_dim, int out_dim, std::span<const T> in,
                    std::span<const T> weight, std::span<const T> grad_out,
                    std::span<T> grad_in, std::span<T> grad_weight,
                    std::span<T> grad_bias) {
#pragma omp parallel for schedule(static) num_threads(txc::NumThreads())
  for (int o = 0; o < out_dim; ++o) {
    T* gw = grad_weight.data() + static_cast<size_t>(o) * in_dim;
    std::fill(gw, gw + in_dim, T(0));
    T gb = 0;
    for (int n = 0; n < batch; ++n) {
      const T g = grad_out[static_cast<size_t>(n) * out_dim + o];
      gb += g;
      const T* x = in.data() + static_cast<size_t>(n) * in_dim;
      for (int d = 0; d < in_dim; ++d) gw[d] += g * x[d];
    }
    grad_bias[o] = gb;
  }
  if (grad_in.empty()) return;
#pragma omp parallel for schedule(static) num_threads(txc::NumThreads())
  for (int n = 0; n < batch; ++n) {
    T* gx = grad_in.data() + static_cast<size_t>(n) * in_dim;
    std::fill(gx, gx + in_dim, T(0));
    for (int o = 0; o < out_dim; ++o) {
      const T g = grad_out[static_cast<size_t>(n) * out_dim + o];
      const T* wrow = weight.data() + static_cast<size_t>(o) * in_dim;
      for (int d = 0; d < in_dim; ++d) gx[d] += g * wrow[d];
    }
  }
}

#define TXC_INSTANTIATE_KERNELS(T)                                            \
  template void Conv3x3ForwardReference<T>(                                   \
      const ConvShape&, std::span<const T>, std::span<const T>,               \
      std::span<const T>, std::span<T>);                                      \
  template void Conv3x3Forward<T>(const ConvShape&, std::span<const T>,       \
                                  std::span<const T>, std::span<const T>,     \
                                  std::span<T>, std::span<T>);                \
  template void Conv3x3BackwardReference<T>(                                  \
      const ConvShape&, std::span<const T>, std::span<const T>,               \
      std::span<const T>, std::span<T>, std::span<T>, std::span<T>);          \
  template void Conv3x3Backward<T>(const ConvShape&, std::span<const T>,      \
                                   std::span<const T>, std::span<const T>,    \
                                   std::span<T>, std::span<T>, std::span<T>); \
  template void LinearForwardReference<T>(int, int, int, std::span<const T>,  \
                                          std::span<const T>,                 \
                                          std::span<const T>, std::span<T>);  \
  template void LinearForward<T>(int, int, int, std::span<const T>,           \
                                 std::span<const T>, std::span<const T>,      \
                                 std::span<T>);                               \
  template void LinearBackward<T>(int, int, int, std::span<const T>,          \
                                  std::span<const T>, std::span<const T>,     \
                                  std::span<T>, std::span<T>, std::span<T>);

TXC_INSTANTIATE_KERNELS(float)
TXC_INSTANTIATE_KERNELS(double)

#undef TXC_INSTANTIATE_KERNELS

}  // namespace txc::nn::kernels
