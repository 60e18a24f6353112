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

#ifndef TXC_NN_LAYERS_H_
#define TXC_NN_LAYERS_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "txc/nn/tensor.h"

namespace txc::nn {

enum class Mode { kTrain, kEval };

struct ForwardContext {
  Mode mode = Mode::kEval;
  // Required in train mode by dropout layers with a non-zero rate.
  std::mt19937_64* rng = nullptr;
};

// A named tensor owned by a layer. Non-learnable slots (batchnorm running
// statistics) are serialized but never touched by the optimizer.
template <typename T>
struct ParamSlot {
  std::string name;
  Tensor<T>* value = nullptr;
  Tensor<T>* grad = nullptr;
  bool learnable = true;
};

// Layers cache what their backward pass needs during Forward; Backward must
// follow the matching Forward.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string name() const = 0;
  virtual Tensor<T> Forward(const Tensor<T>& in, ForwardContext& ctx) = 0;
  virtual Tensor<T> Backward(const Tensor<T>& grad_out) = 0;
  virtual std::vector<ParamSlot<T>> Params() { return {}; }
};

template <typename T>
class Conv3x3 : public Layer<T> {
 public:
  Conv3x3(int in_channels, int out_channels);
  std::string name() const override;
  Tensor<T> Forward(const Tensor<T>& in, ForwardContext& ctx) override;
  Tensor<T> Backward(const Tensor<T>& grad_out) override;
  std::vector<ParamSlot<T>> Params() override;

  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  int in_channels_;
  int out_channels_;
  Tensor<T> weight_;  // (out, in, 3, 3)
  Tensor<T> bias_;    // (1, out, 1, 1)
  Tensor<T> grad_weight_;
  Tensor<T> grad_bias_;
  std::array<int, 4> in_dims_{};
  std::vector<T> cols_;
};

// Per-channel normalization over (batch, H, W), epsilon 1e-5, running
// statistics updated with momentum 0.1 (unbiased variance).
template <typename T>
class BatchNorm : public Layer<T> {
 public:
  static constexpr double kEpsilon = 1e-5;
  static constexpr double kMomentum = 0.1;

  explicit BatchNorm(int channels);
  std::string name() const override;
  Tensor<T> Forward(const Tensor<T>& in, ForwardContext& ctx) override;
  Tensor<T> Backward(const Tensor<T>& grad_out) override;
  std::vector<ParamSlot<T>> Params() override;

  Tensor<T>& scale() { return scale_; }
  Tensor<T>& shift() { return shift_; }
  Tensor<T>& running_mean() { return running_mean_; }
  Tensor<T>& running_var() { return running_var_; }

 private:
  int channels_;
  Tensor<T> scale_;
  Tensor<T> shift_;
  Tensor<T> running_mean_;
  Tensor<T> running_var_;
  Tensor<T> grad_scale_;
  Tensor<T> grad_shift_;
  Mode last_mode_ = Mode::kEval;
  Tensor<T> normalized_;
  std::vector<T> inv_std_;
};

template <typename T>
class Relu : public Layer<T> {
 public:
  std::string name() const override { return "relu"; }
  Tensor<T> Forward(const Tensor<T>& in, ForwardContext& ctx) override;
  Tensor<T> Backward(const Tensor<T>& grad_out) override;

 private:
  Tensor<T> input_;
};

// 2x2 window, stride 2. Even spatial dims only.
template <typename T>
class MaxPool2x2 : public Layer<T> {
 public:
  std::string name() const override { return "maxpool2x2"; }
  Tensor<T> Forward(const Tensor<T>& in, ForwardContext& ctx) override;
  Tensor<T> Backward(const Tensor<T>& grad_out) override;

 private:
  std::array<int, 4> in_dims_{};
  std::vector<uint32_t> argmax_;
};

// Fully connected layer. Flattens its input (C*H*W per item) and produces
// (batch, out, 1, 1).
template <typename T>
class Linear : public Layer<T> {
 public:
  Linear(int in_dim, int out_dim);
  std::string name() const override;
  Tensor<T> Forward(const Tensor<T>& in, ForwardContext& ctx) override;
  Tensor<T> Backward(const Tensor<T>& grad_out) override;
  std::vector<ParamSlot<T>> Params() override;

  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  int in_dim_;
  int out_dim_;
  Tensor<T> weight_;  // (out, in, 1, 1)
  Tensor<T> bias_;
  Tensor<T> grad_weight_;
  Tensor<T> grad_bias_;
  Tensor<T> input_;
};

// Inverted dropout: survivors are scaled by 1/(1-p) in train mode, identity in
// eval mode.
template <typename T>
class Dropout : public Layer<T> {
 public:
  explicit Dropout(double rate);
  std::string name() const override;
  Tensor<T> Forward(const Tensor<T>& in, ForwardContext& ctx) override;
  Tensor<T> Backward(const Tensor<T>& grad_out) override;

 private:
  double rate_;
  std::vector<T> mask_;  // empty when the last forward was the identity
};

// Row-wise softmax over the channel axis of a (batch, k, 1, 1) tensor.
template <typename T>
Tensor<T> Softmax(const Tensor<T>& logits);

}  // namespace txc::nn

#endif  // TXC_NN_LAYERS_H_
