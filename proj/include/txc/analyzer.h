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

#ifndef TXC_ANALYZER_H_
#define TXC_ANALYZER_H_

#include <functional>
#include <span>
#include <vector>

#include "txc/dataset.h"
#include "txc/frame.h"
#include "txc/nn/net.h"
#include "txc/texture_mask.h"

namespace txc {

struct EpochLog {
  int epoch = 0;
  double loss = 0;            // mean weighted loss over the epoch's batches
  double train_accuracy = 0;  // from the train-mode forward passes
  // Eval-mode balanced accuracy on the validation set; negative if none.
  double val_balanced_accuracy = -1;
};

// Called after every epoch; returning false stops training early.
using EpochCallback = std::function<bool(const EpochLog&)>;

struct TrainResult {
  nn::Net<float> net;
  std::vector<EpochLog> log;
};

// Mini-batch momentum SGD over a freshly shuffled order each epoch. Every
// sample is used once per epoch; a trailing batch of one sample is merged
// into the previous batch (batchnorm needs two). Class weights default to
// inverse class frequency. Throws Error naming the epoch on divergence.
TrainResult TrainClassifier(const PatchDataset& train,
                            const nn::TrainConfig& config,
                            const nn::NetSpec& spec = {},
                            const PatchDataset* validation = nullptr,
                            const EpochCallback& on_epoch = {});

// Scales patch samples to [0, 1] in NCHW order.
nn::Tensor<float> PatchesToTensor(std::span<const Patch> patches);

// Eval-mode texture-class probability per patch; shared by SegmentFrame and
// the training loop's validation pass.
std::vector<float> TextureProbabilities(nn::Net<float>& net,
                                        std::span<const Patch> patches);

// Mean of per-class recall with argmax decisions.
double BalancedAccuracy(std::span<const float> texture_probs,
                        std::span<const int> labels);
double BalancedAccuracy(nn::Net<float>& net, const PatchDataset& data);

// BT.601 full-range conversion of one 16x16 block; chroma is upsampled by
// sample replication.
Patch BlockToRgbPatch(const Frame& frame, int bx, int by);

// Classifies every 16x16 cell of a padded frame in eval mode. A cell is
// TEXTURE iff its texture probability >= threshold.
TextureMask SegmentFrame(const Frame& padded, nn::Net<float>& net,
                         double threshold = 0.5);

}  // namespace txc

#endif  // TXC_ANALYZER_H_
