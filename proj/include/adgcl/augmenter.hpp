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

#ifndef ADGCL_AUGMENTER_HPP
#define ADGCL_AUGMENTER_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "adgcl/encoder.hpp"
#include "adgcl/graph.hpp"
#include "adgcl/tensor.hpp"

namespace adgcl {

/// Learnable edge-dropping augmenter: a separate GNN of the same architecture
/// family as the encoder plus an edge model turning concatenated endpoint
/// embeddings [h_u; h_z] into one drop logit per undirected edge.
/// Polarity: omega is the DROP logit, keep weight = 1 - p.
struct AugmenterParams {
  EncoderParams gnn;
  MlpParams edge_mlp;  // 2*hidden -> hidden -> 1

  NamedTensorRefs named_tensors(const std::string& prefix = "augmenter");
  NamedTensorCRefs named_tensors(const std::string& prefix = "augmenter") const;
};

AugmenterParams init_augmenter_params(Index feature_dim, Index hidden_dim,
                                      Index num_layers, std::mt19937_64& rng,
                                      Index edge_feature_dim = 0);

/// Drop logits omega, one per undirected edge [Eu,1]. The augmenter GNN runs
/// on the unperturbed batch (keep weights 1); the logit is symmetrized over
/// the two endpoint orders.
Tensor augmenter_logits(const GraphBatch& batch, const AugmenterParams& params);

/// p = sigmoid((log d - log(1-d) + omega)/tau) per entry. `delta` entries are
/// clamped into [1e-6, 1-1e-6]; tau must be positive.
Tensor gumbel_relax(const Tensor& omega, double tau, const Tensor& delta);

/// Uniform(0,1) noise, one draw per undirected edge, already clamped.
Tensor draw_edge_noise(Index n_undirected, std::mt19937_64& rng);

/// Bernoulli drop decisions: edge e dropped with probability sigmoid(omega_e).
std::vector<std::uint8_t> sample_hard(const Tensor& omega, std::mt19937_64& rng);

/// Directed keep-weight vector [E,1] from relaxed drop weights p [Eu,1]:
/// keep = 1 - p on both orientations of each undirected edge.
Tensor relaxed_keep_weights(const Tensor& p, const GraphBatch& batch);

/// Directed 0/1 keep weights from a hard drop mask.
Tensor hard_keep_weights(const std::vector<std::uint8_t>& dropped,
                         const GraphBatch& batch);

/// Batch-mean expected drop ratio: mean over graphs of
/// sum_{e in E_G} p_e / |E_G| over undirected edges; edgeless graphs count 0.
/// Differentiable in p.
Tensor expected_drop_ratio(const Tensor& p, const GraphBatch& batch);

struct DropRatioStats {
  std::vector<double> per_graph;
  double batch_mean = 0.0;
};

/// Plain-number version of the ratio above.
DropRatioStats drop_ratio_stats(const Tensor& p, const GraphBatch& batch);

}  // namespace adgcl

#endif  // ADGCL_AUGMENTER_HPP
