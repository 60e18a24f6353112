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

#include "txc/nn/net.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "txc/error.h"

namespace txc::nn {
namespace {

std::string JoinInts(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> SplitInts(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

template <typename T>
bool AllFinite(std::span<const T> v) {
  return std::all_of(v.begin(), v.end(),
                     [](T x) { return std::isfinite(x); });
}

static_assert(std::endian::native == std::endian::little,
              "weight files are written in host order");

template <typename V>
void WritePod(std::ostream& out, V v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename V>
V ReadPod(std::istream& in) {
  V v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (in.gcount() != sizeof(v)) throw Error("truncated weight file");
  return v;
}

constexpr char kWeightMagic[4] = {'T', 'X', 'N', 'N'};

}  // namespace

std::string NetSpec::ToString() const {
  std::ostringstream os;
  os << "in" << in_channels << "x" << in_size << ";conv"
     << JoinInts(conv_channels) << ";fc" << JoinInts(fc_hidden) << ";out"
     << num_classes << ";drop" << dropout;
  return os.str();
}

NetSpec NetSpec::Parse(const std::string& text) {
  NetSpec spec;
  std::stringstream ss(text);
  std::string field;
  try {
    while (std::getline(ss, field, ';')) {
      if (field.rfind("in", 0) == 0) {
        const auto x = field.find('x');
        if (x == std::string::npos) throw Error("bad 'in' field");
        spec.in_channels = std::stoi(field.substr(2, x - 2));
        spec.in_size = std::stoi(field.substr(x + 1));
      } else if (field.rfind("conv", 0) == 0) {
        spec.conv_channels = SplitInts(field.substr(4));
      } else if (field.rfind("fc", 0) == 0) {
        spec.fc_hidden = SplitInts(field.substr(2));
      } else if (field.rfind("out", 0) == 0) {
        spec.num_classes = std::stoi(field.substr(3));
      } else if (field.rfind("drop", 0) == 0) {
        spec.dropout = std::stod(field.substr(4));
      } else {
        throw Error("unknown architecture field '" + field + "'");
      }
    }
  } catch (const std::logic_error&) {
    throw Error("malformed architecture string '" + text + "'");
  }
  spec.Validate();
  return spec;
}

uint64_t NetSpec::Hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : ToString()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

int NetSpec::final_spatial() const {
  return in_size >> conv_channels.size();
}

void NetSpec::Validate() const {
  if (in_channels < 1 || in_size < 1 || num_classes < 2) {
    throw Error("architecture: bad input or class count");
  }
  if (conv_channels.empty()) throw Error("architecture: no conv stages");
  for (size_t i = 0; i < conv_channels.size(); ++i) {
    if (conv_channels[i] < 1) throw Error("architecture: bad conv width");
    if (i > 0 && conv_channels[i] != 2 * conv_channels[i - 1]) {
      throw Error("architecture: each conv stage must double the width");
    }
  }
  if (fc_hidden.size() != 2) {
    throw Error("architecture: expected two hidden fully connected layers");
  }
  for (int w : fc_hidden) {
    if (w < 1) throw Error("architecture: bad fc width");
  }
  if ((in_size % (1 << conv_channels.size())) != 0 || final_spatial() < 1) {
    throw Error("architecture: input too small for the pooling stages");
  }
  if (!(dropout >= 0 && dropout < 1)) {
    throw Error("architecture: dropout outside [0, 1)");
  }
}

template <typename T>
Net<T>::Net(NetSpec spec) : spec_(std::move(spec)) {
  spec_.Validate();
  int ch = spec_.in_channels;
  for (int width : spec_.conv_channels) {
    layers_.push_back(std::make_unique<Conv3x3<T>>(ch, width));
    layers_.push_back(std::make_unique<BatchNorm<T>>(width));
    layers_.push_back(std::make_unique<Relu<T>>());
    layers_.push_back(std::make_unique<MaxPool2x2<T>>());
    ch = width;
  }
  int dim = ch * spec_.final_spatial() * spec_.final_spatial();
  for (int width : spec_.fc_hidden) {
    layers_.push_back(std::make_unique<Linear<T>>(dim, width));
    layers_.push_back(std::make_unique<Relu<T>>());
    layers_.push_back(std::make_unique<Dropout<T>>(spec_.dropout));
    dim = width;
  }
  layers_.push_back(std::make_unique<Linear<T>>(dim, spec_.num_classes));
}

template <typename T>
void Net<T>::InitHe(uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& layer : layers_) {
    for (auto& slot : layer->Params()) {
      Tensor<T>& v = *slot.value;
      if (slot.name == "weight") {
        const double fan_in = static_cast<double>(v.item_size());
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
        for (T& x : v.values()) x = static_cast<T>(dist(rng));
      } else if (slot.name == "scale" || slot.name == "running_var") {
        v.Fill(T(1));
      } else {
        v.Fill(T(0));
      }
    }
  }
}

template <typename T>
Tensor<T> Net<T>::Forward(const Tensor<T>& input, ForwardContext& ctx) {
  if (input.c() != spec_.in_channels || input.h() != spec_.in_size ||
      input.w() != spec_.in_size) {
    throw Error("net input must be " + std::to_string(spec_.in_channels) +
                "x" + std::to_string(spec_.in_size) + "x" +
                std::to_string(spec_.in_size));
  }
  Tensor<T> x = input;
  for (auto& layer : layers_) {
    x = layer->Forward(x, ctx);
    if (!AllFinite<T>(x.values())) {
      throw Error("non-finite activation after " + layer->name());
    }
  }
  return x;
}

template <typename T>
Tensor<T> Net<T>::Backward(const Tensor<T>& grad_logits) {
  Tensor<T> g = grad_logits;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    g = (*it)->Backward(g);
    bool finite = AllFinite<T>(g.values());
    for (auto& slot : (*it)->Params()) {
      if (slot.grad) finite = finite && AllFinite<T>(slot.grad->values());
    }
    if (!finite) throw Error("non-finite gradient in " + (*it)->name());
  }
  return g;
}

template <typename T>
Tensor<T> Net<T>::PredictProba(const Tensor<T>& input) {
  ForwardContext ctx{Mode::kEval, nullptr};
  return Softmax(Forward(input, ctx));
}

template <typename T>
std::vector<ParamSlot<T>> Net<T>::Params() {
  std::vector<ParamSlot<T>> out;
  for (size_t i = 0; i < layers_.size(); ++i) {
    for (auto& slot : layers_[i]->Params()) {
      slot.name = layers_[i]->name() + "." + slot.name;
      out.push_back(slot);
    }
  }
  return out;
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0) || !(momentum >= 0) || !(weight_decay >= 0) ||
      batch_size < 2 || epochs < 0) {
    throw Error("invalid training configuration");
  }
  if (!class_weights.empty()) {
    if (class_weights.size() != 2) throw Error("need exactly 2 class weights");
    for (double w : class_weights) {
      if (!(w > 0)) throw Error("class weights must be positive");
    }
  }
}

std::vector<double> InverseFrequencyWeights(std::span<const int> counts) {
  int max_count = 0;
  for (int c : counts) {
    if (c <= 0) throw Error("every class needs at least one sample");
    max_count = std::max(max_count, c);
  }
  std::vector<double> w;
  for (int c : counts) w.push_back(static_cast<double>(max_count) / c);
  return w;
}

double CrossEntropyFromProbs(const Tensor<double>& probs,
                             std::span<const int> labels,
                             std::span<const double> class_weights,
                             bool* clamped) {
  constexpr double kFloor = 1e-12;
  double num = 0;
  double den = 0;
  bool any_clamped = false;
  for (int i = 0; i < probs.n(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= probs.c()) throw Error("label out of range");
    double p = probs.item(i)[y];
    if (p < kFloor) {
      p = kFloor;
      any_clamped = true;
    }
    num += class_weights[y] * -std::log(p);
    den += class_weights[y];
  }
  if (clamped) *clamped = any_clamped;
  return num / den;
}

template <typename T>
LossResult<T> WeightedCrossEntropy(const Tensor<T>& logits,
                                   std::span<const int> labels,
                                   std::span<const double> class_weights) {
  if (static_cast<int>(labels.size()) != logits.n()) {
    throw Error("label count does not match batch");
  }
  if (static_cast<int>(class_weights.size()) != logits.c()) {
    throw Error("class weight count does not match classes");
  }
  LossResult<T> r;
  r.probs = Softmax(logits);
  r.grad_logits = Tensor<T>(logits.n(), logits.c(), 1, 1);
  double den = 0;
  for (int i = 0; i < logits.n(); ++i) {
    if (labels[i] < 0 || labels[i] >= logits.c()) {
      throw Error("label out of range");
    }
    den += class_weights[labels[i]];
  }
  double num = 0;
  for (int i = 0; i < logits.n(); ++i) {
    const int y = labels[i];
    const double w = class_weights[y];
    const auto p = r.probs.item(i);
    double py = p[y];
    if (py < 1e-12) {
      py = 1e-12;
      r.clamped = true;
    }
    num += w * -std::log(py);
    const auto g = r.grad_logits.item(i);
    for (int k = 0; k < logits.c(); ++k) {
      g[k] = static_cast<T>(w * (p[k] - (k == y ? 1.0 : 0.0)) / den);
    }
  }
  r.loss = num / den;
  return r;
}

template <typename T>
void SgdStep(std::span<T> param, std::span<const T> grad, std::span<T> velocity,
             const TrainConfig& cfg) {
  if (param.size() != grad.size() || param.size() != velocity.size()) {
    throw Error("sgd: shape mismatch");
  }
  const T mu = static_cast<T>(cfg.momentum);
  const T wd = static_cast<T>(cfg.weight_decay);
  const T lr = static_cast<T>(cfg.learning_rate);
  for (size_t i = 0; i < param.size(); ++i) {
    velocity[i] = mu * velocity[i] + grad[i] + wd * param[i];
    param[i] -= lr * velocity[i];
  }
}

template <typename T>
void SgdMomentum<T>::Step(std::vector<ParamSlot<T>>& slots) {
  size_t k = 0;
  for (auto& slot : slots) {
    if (!slot.learnable) continue;
    if (velocity_.size() <= k) velocity_.emplace_back(slot.value->size(), T(0));
    SgdStep<T>(slot.value->values(), slot.grad->values(), velocity_[k], cfg_);
    ++k;
  }
}

template <typename T>
void SaveParams(Net<T>& net, std::ostream& out) {
  auto slots = net.Params();
  out.write(kWeightMagic, 4);
  WritePod<uint32_t>(out, kWeightFileVersion);
  WritePod<uint64_t>(out, net.spec().Hash());
  WritePod<uint32_t>(out, static_cast<uint32_t>(slots.size()));
  for (auto& slot : slots) {
    WritePod<uint32_t>(out, static_cast<uint32_t>(slot.value->size()));
    for (T v : slot.value->values()) WritePod<float>(out, static_cast<float>(v));
  }
  if (!out) throw Error("failed to write weights");
}

template <typename T>
void LoadParams(Net<T>& net, std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kWeightMagic, 4) != 0) {
    throw Error("not a TXNN weight file (bad magic)");
  }
  if (ReadPod<uint32_t>(in) != kWeightFileVersion) {
    throw Error("unsupported weight file version");
  }
  if (ReadPod<uint64_t>(in) != net.spec().Hash()) {
    throw Error("architecture mismatch");
  }
  auto slots = net.Params();
  if (ReadPod<uint32_t>(in) != slots.size()) {
    throw Error("architecture mismatch");
  }
  for (auto& slot : slots) {
    if (ReadPod<uint32_t>(in) != slot.value->size()) {
      throw Error("architecture mismatch");
    }
    for (T& v : slot.value->values()) v = static_cast<T>(ReadPod<float>(in));
  }
  for (auto& slot : slots) {
    if (slot.name.ends_with("running_var")) {
      for (T v : slot.value->values()) {
        if (!(v > 0)) throw Error("weight file has non-positive variance");
      }
    }
  }
}

template class Net<float>;
template class Net<double>;
template class SgdMomentum<float>;
template class SgdMomentum<double>;
template LossResult<float> WeightedCrossEntropy(const Tensor<float>&,
                                                std::span<const int>,
                                                std::span<const double>);
template LossResult<double> WeightedCrossEntropy(const Tensor<double>&,
                                                 std::span<const int>,
                                                 std::span<const double>);
template void SgdStep<float>(std::span<float>, std::span<const float>,
                             std::span<float>, const TrainConfig&);
template void SgdStep<double>(std::span<double>, std::span<const double>,
                              std::span<double>, const TrainConfig&);
template void SaveParams(Net<float>&, std::ostream&);
template void SaveParams(Net<double>&, std::ostream&);
template void LoadParams(Net<float>&, std::istream&);
template void LoadParams(Net<double>&, std::istream&);

}  // namespace txc::nn
