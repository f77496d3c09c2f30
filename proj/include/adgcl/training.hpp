// Copyright 2026 the adgcl-lab authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADGCL_TRAINING_HPP
#define ADGCL_TRAINING_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adgcl/augmenter.hpp"
#include "adgcl/encoder.hpp"
#include "adgcl/graph.hpp"
#include "adgcl/objectives.hpp"

namespace adgcl {

enum class TrainMode { kAdGcl, kNadGcl, kInfoMax };

TrainMode parse_train_mode(const std::string& name);  // adgcl|nadgcl|infomax
std::string train_mode_name(TrainMode mode);

struct TrainConfig {
  TrainMode mode = TrainMode::kAdGcl;
  double lambda_reg = 5.0;
  double tau = 1.0;
  double lr_encoder = 0.001;
  double lr_augmenter = 0.001;
  int epochs = 20;
  Index batch_size = 32;
  Index hidden_dim = 32;
  Index num_layers = 5;
  double dropout = 0.0;
  std::uint64_t seed = 0;
  double fixed_drop_ratio = 0.3;  // nadgcl only
  // Reuse the encoder step's noise draw for the augmenter step instead of
  // drawing fresh noise (comparison hook; off by default).
  bool shared_noise_draw = false;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double nce = 0.0;        // mean estimate over the epoch's encoder steps
  double reg = 0.0;        // mean regularizer fed to the augmenter step
  double drop_ratio = 0.0; // measured drop statistic of the applied views
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  EncoderParams encoder;
  HeadParams head;
  std::optional<AugmenterParams> augmenter;
  TrainHistory history;
};

enum class TrainPhase { kAfterEncoderStep, kAfterAugmenterStep };

/// Invoked after every optimizer step; used by the isolation checks.
using StepObserver =
    std::function<void(TrainPhase, const EncoderParams&, const HeadParams&,
                       const AugmenterParams*)>;

/// Alternating min-max training. Per minibatch: (1) anchor + relaxed
/// augmented view, estimate and regularizer; (2) Adam descent on the encoder
/// loss for encoder+head only; (3) a fresh forward with new noise and an Adam
/// step for the augmenter only, equivalent to ascending
/// (nce_loss - lambda * drop_ratio). Batches with fewer than two graphs are
/// skipped. Deterministic given (dataset, config).
TrainResult train_adgcl(const std::vector<Graph>& dataset,
                        const TrainConfig& config,
                        const StepObserver& observer = {});

/// Ablation: the augmenter is replaced by uniform i.i.d. hard edge dropping
/// at the fixed ratio, redrawn per minibatch; no augmenter step.
TrainResult train_nadgcl(const std::vector<Graph>& dataset,
                         const TrainConfig& config,
                         const StepObserver& observer = {});

/// Degenerate mode: the "augmented" view is the anchor itself.
TrainResult train_infomax(const std::vector<Graph>& dataset,
                          const TrainConfig& config,
                          const StepObserver& observer = {});

/// Dispatch on config.mode.
TrainResult train(const std::vector<Graph>& dataset, const TrainConfig& config,
                  const StepObserver& observer = {});

struct SweepRow {
  double lambda = 0.0;
  double final_drop_ratio = 0.0;
  double val_metric = 0.0;
  int epochs = 0;
  std::uint64_t seed = 0;
};

/// One full adversarial run per lambda (training split only), followed by a
/// linear probe selected and scored on the validation split. Every run is
/// reseeded from the same value derived from the base seed, so runs are
/// independent of each other and repeated lambdas give identical rows.
std::vector<SweepRow> sweep_lambda(const std::vector<Graph>& dataset,
                                   const DatasetSplit& split,
                                   const std::vector<double>& lambdas,
                                   const TrainConfig& base);

/// Deterministic seed for a grid run keyed by its hyperparameter value.
std::uint64_t mix_seed(std::uint64_t seed, double lambda);

void write_history_csv(const std::string& path, const TrainHistory& history);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace adgcl

#endif  // ADGCL_TRAINING_HPP
