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

#include "txc/analyzer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "txc/error.h"

namespace txc {

nn::Tensor<float> PatchesToTensor(std::span<const Patch> patches) {
  nn::Tensor<float> t(static_cast<int>(patches.size()), 3, kPatchSize,
                      kPatchSize);
  for (size_t i = 0; i < patches.size(); ++i) {
    auto item = t.item(static_cast<int>(i));
    for (int k = 0; k < kPatchValues; ++k) {
      item[k] = patches[i][k] * (1.0f / 255.0f);
    }
  }
  return t;
}

std::vector<float> TextureProbabilities(nn::Net<float>& net,
                                        std::span<const Patch> patches) {
  constexpr size_t kChunk = 512;
  std::vector<float> probs;
  probs.reserve(patches.size());
  for (size_t start = 0; start < patches.size(); start += kChunk) {
    const auto chunk =
        patches.subspan(start, std::min(kChunk, patches.size() - start));
    const auto p = net.PredictProba(PatchesToTensor(chunk));
    for (int i = 0; i < p.n(); ++i) probs.push_back(p.item(i)[kTextureClass]);
  }
  return probs;
}

double BalancedAccuracy(std::span<const float> texture_probs,
                        std::span<const int> labels) {
  std::array<int, 2> correct{0, 0};
  std::array<int, 2> total{0, 0};
  for (size_t i = 0; i < labels.size(); ++i) {
    // Argmax over two classes; ties go to the texture class.
    const int pred = texture_probs[i] >= 0.5f ? kTextureClass : kNonTextureClass;
    ++total[labels[i]];
    correct[labels[i]] += pred == labels[i];
  }
  double sum = 0;
  int classes = 0;
  for (int c = 0; c < 2; ++c) {
    if (total[c] == 0) continue;
    sum += static_cast<double>(correct[c]) / total[c];
    ++classes;
  }
  return classes ? sum / classes : 0.0;
}

double BalancedAccuracy(nn::Net<float>& net, const PatchDataset& data) {
  const auto probs = TextureProbabilities(net, data.patches);
  return BalancedAccuracy(probs, data.labels);
}

TrainResult TrainClassifier(const PatchDataset& train,
                            const nn::TrainConfig& config,
                            const nn::NetSpec& spec,
                            const PatchDataset* validation,
                            const EpochCallback& on_epoch) {
  config.Validate();
  if (train.class_counts[kTextureClass] == 0 ||
      train.class_counts[kNonTextureClass] == 0) {
    throw Error("training data must contain both classes");
  }
  TrainResult result{nn::Net<float>(spec), {}};
  nn::Net<float>& net = result.net;
  net.InitHe(config.rng_seed);
  const std::vector<double> weights =
      config.class_weights.empty()
          ? nn::InverseFrequencyWeights(train.class_counts)
          : config.class_weights;

  std::mt19937_64 rng(config.rng_seed ^ 0x5DEECE66Dull);
  nn::SgdMomentum<float> sgd(config);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<Patch> batch;
  std::vector<int> labels;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochLog entry;
    entry.epoch = epoch;
    double loss_sum = 0;
    int batches = 0;
    size_t correct = 0;
    const size_t bs = static_cast<size_t>(config.batch_size);
    for (size_t start = 0; start < order.size();) {
      size_t end = std::min(order.size(), start + bs);
      if (order.size() - end == 1) ++end;
      batch.clear();
      labels.clear();
      for (size_t k = start; k < end; ++k) {
        batch.push_back(train.patches[order[k]]);
        labels.push_back(train.labels[order[k]]);
      }
      start = end;
      if (batch.size() < 2) break;

      try {
        nn::ForwardContext ctx{nn::Mode::kTrain, &rng};
        const auto logits = net.Forward(PatchesToTensor(batch), ctx);
        const auto loss = nn::WeightedCrossEntropy(logits, labels, weights);
        if (!std::isfinite(loss.loss)) throw Error("non-finite loss");
        net.Backward(loss.grad_logits);
        auto slots = net.Params();
        sgd.Step(slots);
        loss_sum += loss.loss;
        ++batches;
        for (int i = 0; i < loss.probs.n(); ++i) {
          const int pred = loss.probs.item(i)[kTextureClass] >= 0.5f
                               ? kTextureClass
                               : kNonTextureClass;
          correct += pred == labels[i];
        }
      } catch (const Error& e) {
        throw Error("training diverged in epoch " + std::to_string(epoch) +
                    ": " + e.what());
      }
    }
    entry.loss = batches ? loss_sum / batches : 0.0;
    entry.train_accuracy = static_cast<double>(correct) / train.size();
    if (validation != nullptr && validation->size() > 0) {
      entry.val_balanced_accuracy = BalancedAccuracy(net, *validation);
    }
    result.log.push_back(entry);
    if (on_epoch && !on_epoch(entry)) break;
  }
  return result;
}

Patch BlockToRgbPatch(const Frame& frame, int bx, int by) {
  Patch p{};
  const int x0 = bx * kBlockGrid;
  const int y0 = by * kBlockGrid;
  for (int y = 0; y < kPatchSize; ++y) {
    for (int x = 0; x < kPatchSize; ++x) {
      const double luma = frame.y.at(x0 + x, y0 + y);
      const double cb = frame.u.at((x0 + x) / 2, (y0 + y) / 2) - 128.0;
      const double cr = frame.v.at((x0 + x) / 2, (y0 + y) / 2) - 128.0;
      const double rgb[3] = {luma + 1.402 * cr,
                             luma - 0.344136 * cb - 0.714136 * cr,
                             luma + 1.772 * cb};
      for (int c = 0; c < 3; ++c) {
        p[(c * kPatchSize + y) * kPatchSize + x] = static_cast<uint8_t>(
            std::clamp(std::floor(rgb[c] + 0.5), 0.0, 255.0));
      }
    }
  }
  return p;
}

TextureMask SegmentFrame(const Frame& padded, nn::Net<float>& net,
                         double threshold) {
  if (!padded.IsGridAligned()) throw Error("segment: frame is not padded to 16");
  TextureMask mask = TextureMask::ForFrame(padded, BlockLabel::kNonTexture);
  mask.frame_index = padded.frame_index;
  std::vector<Patch> cells;
  cells.reserve(mask.labels.size());
  for (int by = 0; by < mask.grid_h; ++by) {
    for (int bx = 0; bx < mask.grid_w; ++bx) {
      cells.push_back(BlockToRgbPatch(padded, bx, by));
    }
  }
  const auto probs = TextureProbabilities(net, cells);
  for (size_t i = 0; i < probs.size(); ++i) {
    mask.probs[i] = probs[i];
    mask.labels[i] = probs[i] >= threshold ? BlockLabel::kTexture
                                           : BlockLabel::kNonTexture;
  }
  return mask;
}

}  // namespace txc
