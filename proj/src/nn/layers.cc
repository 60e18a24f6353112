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

#include "txc/nn/layers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "txc/error.h"
#include "txc/nn/kernels.h"
#include "txc/parallel.h"

namespace txc::nn {

// ---------------------------------------------------------------------------
// Conv3x3

template <typename T>
Conv3x3<T>::Conv3x3(int in_channels, int out_channels)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      weight_(out_channels, in_channels, 3, 3),
      bias_(1, out_channels, 1, 1),
      grad_weight_(out_channels, in_channels, 3, 3),
      grad_bias_(1, out_channels, 1, 1) {}

template <typename T>
std::string Conv3x3<T>::name() const {
  return "conv3x3(" + std::to_string(in_channels_) + "->" +
         std::to_string(out_channels_) + ")";
}

template <typename T>
Tensor<T> Conv3x3<T>::Forward(const Tensor<T>& in, ForwardContext&) {
  if (in.c() != in_channels_) {
    throw Error(name() + ": input has " + std::to_string(in.c()) +
                " channels");
  }
  const kernels::ConvShape s{in.n(), in_channels_, out_channels_, in.h(),
                             in.w()};
  in_dims_ = in.dims();
  cols_.resize(static_cast<size_t>(s.batch) * s.patch() * s.plane());
  Tensor<T> out(in.n(), out_channels_, in.h(), in.w());
  kernels::Conv3x3Forward<T>(s, in.values(), weight_.values(), bias_.values(),
                             cols_, out.values());
  return out;
}

template <typename T>
Tensor<T> Conv3x3<T>::Backward(const Tensor<T>& grad_out) {
  const kernels::ConvShape s{in_dims_[0], in_channels_, out_channels_,
                             in_dims_[2], in_dims_[3]};
  Tensor<T> grad_in(in_dims_[0], in_dims_[1], in_dims_[2], in_dims_[3]);
  kernels::Conv3x3Backward<T>(s, cols_, weight_.values(), grad_out.values(),
                              grad_in.values(), grad_weight_.values(),
                              grad_bias_.values());
  return grad_in;
}

template <typename T>
std::vector<ParamSlot<T>> Conv3x3<T>::Params() {
  return {{"weight", &weight_, &grad_weight_, true},
          {"bias", &bias_, &grad_bias_, true}};
}

// ---------------------------------------------------------------------------
// BatchNorm

template <typename T>
BatchNorm<T>::BatchNorm(int channels)
    : channels_(channels),
      scale_(1, channels, 1, 1, T(1)),
      shift_(1, channels, 1, 1),
      running_mean_(1, channels, 1, 1),
      running_var_(1, channels, 1, 1, T(1)),
      grad_scale_(1, channels, 1, 1),
      grad_shift_(1, channels, 1, 1) {}

template <typename T>
std::string BatchNorm<T>::name() const {
  return "batchnorm(" + std::to_string(channels_) + ")";
}

template <typename T>
Tensor<T> BatchNorm<T>::Forward(const Tensor<T>& in, ForwardContext& ctx) {
  if (in.c() != channels_) throw Error(name() + ": channel mismatch");
  const int n = in.n();
  const size_t plane = static_cast<size_t>(in.h()) * in.w();
  last_mode_ = ctx.mode;
  normalized_ = Tensor<T>(in.n(), in.c(), in.h(), in.w());
  inv_std_.assign(channels_, T(0));
  Tensor<T> out(in.n(), in.c(), in.h(), in.w());

  if (ctx.mode == Mode::kTrain && n < 2) {
    throw Error(name() + ": train mode needs a batch of at least 2");
  }
  const double count = static_cast<double>(n) * plane;

#pragma omp parallel for schedule(static) num_threads(txc::NumThreads())
  for (int c = 0; c < channels_; ++c) {
    double mean;
    double var;
    if (ctx.mode == Mode::kTrain) {
      double sum = 0;
      for (int i = 0; i < n; ++i) {
        const T* x = in.data() + (static_cast<size_t>(i) * channels_ + c) * plane;
        for (size_t p = 0; p < plane; ++p) sum += x[p];
      }
      mean = sum / count;
      double sq = 0;
      for (int i = 0; i < n; ++i) {
        const T* x = in.data() + (static_cast<size_t>(i) * channels_ + c) * plane;
        for (size_t p = 0; p < plane; ++p) {
          const double d = x[p] - mean;
          sq += d * d;
        }
      }
      var = sq / count;
      running_mean_[c] = static_cast<T>((1 - kMomentum) * running_mean_[c] +
                                        kMomentum * mean);
      running_var_[c] = static_cast<T>((1 - kMomentum) * running_var_[c] +
                                       kMomentum * var * count / (count - 1));
    } else {
      mean = running_mean_[c];
      var = running_var_[c];
    }
    const T inv_std = static_cast<T>(1.0 / std::sqrt(var + kEpsilon));
    const T m = static_cast<T>(mean);
    inv_std_[c] = inv_std;
    for (int i = 0; i < n; ++i) {
      const size_t off = (static_cast<size_t>(i) * channels_ + c) * plane;
      for (size_t p = 0; p < plane; ++p) {
        const T xhat = (in[off + p] - m) * inv_std;
        normalized_[off + p] = xhat;
        out[off + p] = scale_[c] * xhat + shift_[c];
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> BatchNorm<T>::Backward(const Tensor<T>& grad_out) {
  const int n = grad_out.n();
  const size_t plane = static_cast<size_t>(grad_out.h()) * grad_out.w();
  const double count = static_cast<double>(n) * plane;
  Tensor<T> grad_in(grad_out.n(), grad_out.c(), grad_out.h(), grad_out.w());

#pragma omp parallel for schedule(static) num_threads(txc::NumThreads())
  for (int c = 0; c < channels_; ++c) {
    double sum_dy = 0;
    double sum_dy_xhat = 0;
    for (int i = 0; i < n; ++i) {
      const size_t off = (static_cast<size_t>(i) * channels_ + c) * plane;
      for (size_t p = 0; p < plane; ++p) {
        sum_dy += grad_out[off + p];
        sum_dy_xhat += grad_out[off + p] * normalized_[off + p];
      }
    }
    grad_shift_[c] = static_cast<T>(sum_dy);
    grad_scale_[c] = static_cast<T>(sum_dy_xhat);
    const T g = scale_[c];
    const T inv_std = inv_std_[c];
    if (last_mode_ == Mode::kTrain) {
      // dx = g*inv_std/M * (M*dy - sum(dy) - xhat*sum(dy*xhat))
      const T k = static_cast<T>(g * inv_std / count);
      const T a = static_cast<T>(sum_dy);
      const T b = static_cast<T>(sum_dy_xhat);
      const T m = static_cast<T>(count);
      for (int i = 0; i < n; ++i) {
        const size_t off = (static_cast<size_t>(i) * channels_ + c) * plane;
        for (size_t p = 0; p < plane; ++p) {
          grad_in[off + p] =
              k * (m * grad_out[off + p] - a - normalized_[off + p] * b);
        }
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const size_t off = (static_cast<size_t>(i) * channels_ + c) * plane;
        for (size_t p = 0; p < plane; ++p) {
          grad_in[off + p] = grad_out[off + p] * g * inv_std;
        }
      }
    }
  }
  return grad_in;
}

template <typename T>
std::vector<ParamSlot<T>> BatchNorm<T>::Params() {
  return {{"scale", &scale_, &grad_scale_, true},
          {"shift", &shift_, &grad_shift_, true},
          {"running_mean", &running_mean_, nullptr, false},
          {"running_var", &running_var_, nullptr, false}};
}

// ---------------------------------------------------------------------------
// Relu

template <typename T>
Tensor<T> Relu<T>::Forward(const Tensor<T>& in, ForwardContext&) {
  input_ = in;
  Tensor<T> out = in;
  for (T& v : out.values()) v = v > T(0) ? v : T(0);
  return out;
}

template <typename T>
Tensor<T> Relu<T>::Backward(const Tensor<T>& grad_out) {
  Tensor<T> grad_in = grad_out;
  for (size_t i = 0; i < grad_in.size(); ++i) {
    if (!(input_[i] > T(0))) grad_in[i] = T(0);
  }
  return grad_in;
}

// ---------------------------------------------------------------------------
// MaxPool2x2

template <typename T>
Tensor<T> MaxPool2x2<T>::Forward(const Tensor<T>& in, ForwardContext&) {
  if (in.h() % 2 != 0 || in.w() % 2 != 0) {
    throw Error("maxpool2x2: odd spatial dims " + std::to_string(in.h()) +
                "x" + std::to_string(in.w()));
  }
  in_dims_ = in.dims();
  const int oh = in.h() / 2;
  const int ow = in.w() / 2;
  Tensor<T> out(in.n(), in.c(), oh, ow);
  argmax_.resize(out.size());
  size_t o = 0;
  for (int i = 0; i < in.n(); ++i) {
    for (int c = 0; c < in.c(); ++c) {
      for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x, ++o) {
          size_t best = 0;
          T best_v = -std::numeric_limits<T>::infinity();
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const size_t idx =
                  ((static_cast<size_t>(i) * in.c() + c) * in.h() + 2 * y +
                   dy) * in.w() + 2 * x + dx;
              if (in[idx] > best_v) {
                best_v = in[idx];
                best = idx;
              }
            }
          }
          out[o] = best_v;
          argmax_[o] = static_cast<uint32_t>(best);
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> MaxPool2x2<T>::Backward(const Tensor<T>& grad_out) {
  Tensor<T> grad_in(in_dims_[0], in_dims_[1], in_dims_[2], in_dims_[3]);
  for (size_t o = 0; o < grad_out.size(); ++o) grad_in[argmax_[o]] += grad_out[o];
  return grad_in;
}

// ---------------------------------------------------------------------------
// Linear

template <typename T>
Linear<T>::Linear(int in_dim, int out_dim)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      weight_(out_dim, in_dim, 1, 1),
      bias_(1, out_dim, 1, 1),
      grad_weight_(out_dim, in_dim, 1, 1),
      grad_bias_(1, out_dim, 1, 1) {}

template <typename T>
std::string Linear<T>::name() const {
  return "linear(" + std::to_string(in_dim_) + "->" + std::to_string(out_dim_) +
         ")";
}

template <typename T>
Tensor<T> Linear<T>::Forward(const Tensor<T>& in, ForwardContext&) {
  if (static_cast<int>(in.item_size()) != in_dim_) {
    throw Error(name() + ": input has " + std::to_string(in.item_size()) +
                " features");
  }
  input_ = in;
  Tensor<T> out(in.n(), out_dim_, 1, 1);
  kernels::LinearForward<T>(in.n(), in_dim_, out_dim_, in.values(),
                            weight_.values(), bias_.values(), out.values());
  return out;
}

template <typename T>
Tensor<T> Linear<T>::Backward(const Tensor<T>& grad_out) {
  Tensor<T> grad_in(input_.n(), input_.c(), input_.h(), input_.w());
  kernels::LinearBackward<T>(input_.n(), in_dim_, out_dim_, input_.values(),
                             weight_.values(), grad_out.values(),
                             grad_in.values(), grad_weight_.values(),
                             grad_bias_.values());
  return grad_in;
}

template <typename T>
std::vector<ParamSlot<T>> Linear<T>::Params() {
  return {{"weight", &weight_, &grad_weight_, true},
          {"bias", &bias_, &grad_bias_, true}};
}

// ---------------------------------------------------------------------------
// Dropout

template <typename T>
Dropout<T>::Dropout(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error("dropout rate must lie in [0, 1)");
  }
}

template <typename T>
std::string Dropout<T>::name() const {
  return "dropout(" + std::to_string(rate_) + ")";
}

template <typename T>
Tensor<T> Dropout<T>::Forward(const Tensor<T>& in, ForwardContext& ctx) {
  mask_.clear();
  if (ctx.mode == Mode::kEval || rate_ == 0.0) return in;
  if (ctx.rng == nullptr) throw Error(name() + ": train mode needs an rng");
  std::bernoulli_distribution keep(1.0 - rate_);
  const T scale = static_cast<T>(1.0 / (1.0 - rate_));
  mask_.resize(in.size());
  Tensor<T> out = in;
  for (size_t i = 0; i < out.size(); ++i) {
    mask_[i] = keep(*ctx.rng) ? scale : T(0);
    out[i] *= mask_[i];
  }
  return out;
}

template <typename T>
Tensor<T> Dropout<T>::Backward(const Tensor<T>& grad_out) {
  if (mask_.empty()) return grad_out;
  Tensor<T> grad_in = grad_out;
  for (size_t i = 0; i < grad_in.size(); ++i) grad_in[i] *= mask_[i];
  return grad_in;
}

// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> Softmax(const Tensor<T>& logits) {
  Tensor<T> probs(logits.n(), logits.c(), logits.h(), logits.w());
  const size_t k = logits.item_size();
  for (int i = 0; i < logits.n(); ++i) {
    const auto z = logits.item(i);
    const auto p = probs.item(i);
    const T zmax = *std::max_element(z.begin(), z.end());
    T sum = 0;
    for (size_t j = 0; j < k; ++j) {
      p[j] = std::exp(z[j] - zmax);
      sum += p[j];
    }
    for (size_t j = 0; j < k; ++j) p[j] /= sum;
  }
  return probs;
}

template class Conv3x3<float>;
template class Conv3x3<double>;
template class BatchNorm<float>;
template class BatchNorm<double>;
template class Relu<float>;
template class Relu<double>;
template class MaxPool2x2<float>;
template class MaxPool2x2<double>;
template class Linear<float>;
template class Linear<double>;
template class Dropout<float>;
template class Dropout<double>;
template Tensor<float> Softmax(const Tensor<float>&);
template Tensor<double> Softmax(const Tensor<double>&);

}  // namespace txc::nn
