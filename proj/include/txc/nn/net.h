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

#ifndef TXC_NN_NET_H_
#define TXC_NN_NET_H_

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "txc/nn/layers.h"
#include "txc/nn/tensor.h"

namespace txc::nn {

// Architecture of the block classifier:
//   [Conv3x3 -> BatchNorm -> ReLU -> MaxPool2x2] per conv width, then
//   [Linear -> ReLU -> Dropout] per hidden width, then Linear(num_classes)
// with softmax applied by the loss or by PredictProba. Each pooling stage
// halves the spatial size and the following conv doubles the channel count.
struct NetSpec {
  int in_channels = 3;
  int in_size = 16;
  std::vector<int> conv_channels{16, 32, 64};
  std::vector<int> fc_hidden{128, 64};
  int num_classes = 2;
  double dropout = 0.5;

  // Canonical text, e.g. "in3x16;conv16,32,64;fc128,64;out2;drop0.5".
  std::string ToString() const;
  static NetSpec Parse(const std::string& text);
  // FNV-1a 64 of ToString().
  uint64_t Hash() const;
  // Throws Error on inconsistent shapes.
  void Validate() const;

  int final_spatial() const;
  bool operator==(const NetSpec&) const = default;
};

template <typename T>
class Net {
 public:
  explicit Net(NetSpec spec);

  const NetSpec& spec() const { return spec_; }

  // He-normal weights, zero biases, unit batchnorm scale.
  void InitHe(uint64_t seed);

  // Returns logits of shape (batch, num_classes, 1, 1). Throws Error naming
  // the layer if any activation becomes non-finite.
  Tensor<T> Forward(const Tensor<T>& input, ForwardContext& ctx);
  // Propagates d(loss)/d(logits) back through every layer, filling each
  // learnable slot's gradient. Returns d(loss)/d(input).
  Tensor<T> Backward(const Tensor<T>& grad_logits);

  // Eval-mode class probabilities.
  Tensor<T> PredictProba(const Tensor<T>& input);

  // Every slot in declaration order (learnable and running statistics).
  std::vector<ParamSlot<T>> Params();
  size_t num_layers() const { return layers_.size(); }
  Layer<T>& layer(size_t i) { return *layers_[i]; }

 private:
  NetSpec spec_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  int batch_size = 512;
  int epochs = 100;
  // One positive weight per class; empty means inverse class frequency.
  std::vector<double> class_weights;
  uint64_t rng_seed = 1;

  void Validate() const;
};

// w[c] = max_count / count[c]: the most frequent class gets weight 1.
std::vector<double> InverseFrequencyWeights(std::span<const int> counts);

template <typename T>
struct LossResult {
  double loss = 0;
  Tensor<T> probs;
  Tensor<T> grad_logits;
  // True when some true-class probability fell below 1e-12 and was clamped.
  bool clamped = false;
};

// Weighted cross entropy on probabilities:
//   loss = sum_i w[y_i] * -log(p_i[y_i]) / sum_i w[y_i].
double CrossEntropyFromProbs(const Tensor<double>& probs,
                             std::span<const int> labels,
                             std::span<const double> class_weights,
                             bool* clamped = nullptr);

// Softmax + weighted cross entropy with the combined analytic gradient
//   d loss / d z_i = w[y_i] * (p_i - onehot(y_i)) / sum_i w[y_i].
template <typename T>
LossResult<T> WeightedCrossEntropy(const Tensor<T>& logits,
                                   std::span<const int> labels,
                                   std::span<const double> class_weights);

// Classic momentum with weight decay folded into the gradient:
//   v <- momentum * v + grad + weight_decay * param
//   param <- param - learning_rate * v
template <typename T>
void SgdStep(std::span<T> param, std::span<const T> grad, std::span<T> velocity,
             const TrainConfig& cfg);

template <typename T>
class SgdMomentum {
 public:
  explicit SgdMomentum(const TrainConfig& cfg) : cfg_(cfg) {}
  // Applies SgdStep to every learnable slot.
  void Step(std::vector<ParamSlot<T>>& slots);

 private:
  TrainConfig cfg_;
  std::vector<std::vector<T>> velocity_;
};

// "TXNN" weight file: magic, u32 version, u64 spec hash, u32 tensor count,
// then per tensor a u32 element count and little-endian float32 values, all
// slots in declaration order.
inline constexpr uint32_t kWeightFileVersion = 1;

template <typename T>
void SaveParams(Net<T>& net, std::ostream& out);
template <typename T>
void LoadParams(Net<T>& net, std::istream& in);

}  // namespace txc::nn

#endif  // TXC_NN_NET_H_
