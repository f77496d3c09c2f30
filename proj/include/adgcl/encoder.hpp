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

#ifndef ADGCL_ENCODER_HPP
#define ADGCL_ENCODER_HPP

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "adgcl/graph.hpp"
#include "adgcl/tensor.hpp"

namespace adgcl {

/// Named views over a parameter struct, used by checkpointing, optimizer
/// state bookkeeping and tape registration.
using NamedTensorRefs = std::vector<std::pair<std::string, Tensor*>>;
using NamedTensorCRefs = std::vector<std::pair<std::string, const Tensor*>>;

struct LinearParams {
  Tensor w;  // [in, out]
  Tensor b;  // [1, out]
};

/// Two dense layers with an inner relu: y = relu(x w1 + b1) w2 + b2.
struct MlpParams {
  LinearParams l1, l2;
};

struct GinLayerParams {
  MlpParams mlp;
  std::optional<LinearParams> edge_embed;  // only when the data has edge feats
};

/// Message-passing encoder: input embedding, K sum-aggregation layers with a
/// 2-layer MLP update (epsilon fixed to 0), then per-graph sum pooling.
struct EncoderParams {
  Index hidden_dim = 32;
  LinearParams input;  // feature dim -> hidden
  std::vector<GinLayerParams> layers;

  Index num_layers() const { return static_cast<Index>(layers.size()); }
  NamedTensorRefs named_tensors(const std::string& prefix = "encoder");
  NamedTensorCRefs named_tensors(const std::string& prefix = "encoder") const;
};

/// 2-layer projection head applied only inside the contrastive loss.
struct HeadParams {
  MlpParams mlp;
  NamedTensorRefs named_tensors(const std::string& prefix = "head");
  NamedTensorCRefs named_tensors(const std::string& prefix = "head") const;
};

/// Glorot-uniform weights from the given generator, zero biases.
Tensor glorot_uniform(Index rows, Index cols, std::mt19937_64& rng);

EncoderParams init_encoder_params(Index feature_dim, Index hidden_dim,
                                  Index num_layers, std::mt19937_64& rng,
                                  Index edge_feature_dim = 0);
HeadParams init_head_params(Index hidden_dim, std::mt19937_64& rng);

/// Registers every tensor of `params` as a leaf on `tape`, returning the
/// tracked copy. Forward code is agnostic to whether params are tracked.
template <typename Params>
Params watch(Tape& tape, const Params& params) {
  Params tracked = params;
  for (auto& [name, t] : tracked.named_tensors()) *t = tape.leaf(*t);
  return tracked;
}

/// Per-layer dropout on node embeddings (inverted scaling). Only used during
/// training; rate 0 disables it.
struct ForwardOptions {
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;
};

/// One GIN layer: h'_v = MLP(h_v + sum over incoming edges (u,v) of
/// keep(u,v) * (h_u + edge_embed(X_uv))). `edge_keep` has one weight per
/// directed edge, entries in [0,1].
Tensor gin_layer(const Tensor& h, const GraphBatch& batch,
                 const Tensor& edge_keep, const GinLayerParams& params);

/// Final-layer node embeddings after the input embedding and all K layers.
Tensor encode_nodes(const GraphBatch& batch, const EncoderParams& params,
                    const Tensor& edge_keep, const ForwardOptions& opts = {});

/// Per-graph embeddings: sum pooling of the final node embeddings.
Tensor encode(const GraphBatch& batch, const EncoderParams& params,
              const Tensor& edge_keep, const ForwardOptions& opts = {});
/// Same with keep weights all one (the unaugmented anchor view).
Tensor encode(const GraphBatch& batch, const EncoderParams& params);

/// z = relu(h w1 + b1) w2 + b2, row-wise.
Tensor project(const Tensor& embeddings, const HeadParams& head);

}  // namespace adgcl

#endif  // ADGCL_ENCODER_HPP
