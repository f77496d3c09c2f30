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

#include "adgcl/augmenter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adgcl {

namespace {
constexpr double kNoiseClamp = 1e-6;

Tensor mlp_forward(const Tensor& x, const MlpParams& p) {
  const Tensor h = relu(add_rowvec(matmul(x, p.l1.w), p.l1.b));
  return add_rowvec(matmul(h, p.l2.w), p.l2.b);
}
}  // namespace

NamedTensorRefs AugmenterParams::named_tensors(const std::string& prefix) {
  NamedTensorRefs out = gnn.named_tensors(prefix + ".gnn");
  NamedTensorRefs edge;
  edge.emplace_back(prefix + ".edge.w1", &edge_mlp.l1.w);
  edge.emplace_back(prefix + ".edge.b1", &edge_mlp.l1.b);
  edge.emplace_back(prefix + ".edge.w2", &edge_mlp.l2.w);
  edge.emplace_back(prefix + ".edge.b2", &edge_mlp.l2.b);
  out.insert(out.end(), edge.begin(), edge.end());
  return out;
}

NamedTensorCRefs AugmenterParams::named_tensors(const std::string& prefix) const {
  NamedTensorCRefs out;
  for (auto& [name, t] :
       const_cast<AugmenterParams*>(this)->named_tensors(prefix))
    out.emplace_back(name, t);
  return out;
}

AugmenterParams init_augmenter_params(Index feature_dim, Index hidden_dim,
                                      Index num_layers, std::mt19937_64& rng,
                                      Index edge_feature_dim) {
  AugmenterParams p;
  p.gnn = init_encoder_params(feature_dim, hidden_dim, num_layers, rng,
                              edge_feature_dim);
  p.edge_mlp.l1 = {glorot_uniform(2 * hidden_dim, hidden_dim, rng),
                   Tensor::zeros({1, hidden_dim})};
  p.edge_mlp.l2 = {glorot_uniform(hidden_dim, 1, rng), Tensor::zeros({1, 1})};
  return p;
}

Tensor augmenter_logits(const GraphBatch& batch, const AugmenterParams& params) {
  // Without batch norm the sum-aggregated embeddings grow with depth and
  // degree; unit rows keep the logits in the responsive range of the
  // relaxation's sigmoid.
  const Tensor h = l2_normalize_rows(encode_nodes(
      batch, params.gnn, Tensor::ones({batch.num_edges(), 1})));
  const Index eu = batch.num_undirected();
  if (eu == 0) return Tensor::zeros({0, 1});
  std::vector<Index> src(static_cast<size_t>(eu)), dst(static_cast<size_t>(eu));
  for (Index k = 0; k < eu; ++k) {
    const auto& [u, z] = batch.edges[static_cast<size_t>(
        batch.undirected_rep[static_cast<size_t>(k)])];
    src[static_cast<size_t>(k)] = u;
    dst[static_cast<size_t>(k)] = z;
  }
  const Tensor hu = gather_rows(h, src);
  const Tensor hz = gather_rows(h, dst);
  const Tensor fwd = mlp_forward(concat(hu, hz, 1), params.edge_mlp);
  const Tensor bwd = mlp_forward(concat(hz, hu, 1), params.edge_mlp);
  return mul(add(fwd, bwd), Tensor::scalar(0.5));
}

Tensor gumbel_relax(const Tensor& omega, double tau, const Tensor& delta) {
  if (tau <= 0.0) throw std::invalid_argument("gumbel_relax: tau must be positive");
  if (delta.shape() != omega.shape())
    throw std::invalid_argument("gumbel_relax: delta shape " + delta.shape_str() +
                                " does not match omega " + omega.shape_str());
  Tensor logit_noise = delta.detached();
  for (double& d : logit_noise.data()) {
    const double c = std::clamp(d, kNoiseClamp, 1.0 - kNoiseClamp);
    d = std::log(c) - std::log1p(-c);
  }
  return sigmoid(mul(add(omega, logit_noise), Tensor::scalar(1.0 / tau)));
}

Tensor draw_edge_noise(Index n_undirected, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor d = Tensor::zeros({n_undirected, 1});
  for (double& v : d.data())
    v = std::clamp(u(rng), kNoiseClamp, 1.0 - kNoiseClamp);
  return d;
}

std::vector<std::uint8_t> sample_hard(const Tensor& omega, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::uint8_t> dropped(static_cast<size_t>(omega.numel()));
  for (size_t e = 0; e < dropped.size(); ++e) {
    const double p = 1.0 / (1.0 + std::exp(-omega.data()[e]));
    dropped[e] = u(rng) < p ? 1 : 0;
  }
  return dropped;
}

Tensor relaxed_keep_weights(const Tensor& p, const GraphBatch& batch) {
  if (p.numel() != batch.num_undirected())
    throw std::invalid_argument("relaxed_keep_weights: " +
                                std::to_string(p.numel()) + " weights for " +
                                std::to_string(batch.num_undirected()) +
                                " undirected edges");
  if (batch.num_edges() == 0) return Tensor::zeros({0, 1});
  const Tensor keep_undirected = 1.0 - p;  // [Eu,1]
  return gather_rows(keep_undirected, batch.undirected_of_edge);
}

Tensor hard_keep_weights(const std::vector<std::uint8_t>& dropped,
                         const GraphBatch& batch) {
  if (static_cast<Index>(dropped.size()) != batch.num_undirected())
    throw std::invalid_argument("hard_keep_weights: mask size mismatch");
  Tensor keep = Tensor::ones({batch.num_edges(), 1});
  for (Index e = 0; e < batch.num_edges(); ++e) {
    const Index uid = batch.undirected_of_edge[static_cast<size_t>(e)];
    if (dropped[static_cast<size_t>(uid)]) keep.data()[static_cast<size_t>(e)] = 0.0;
  }
  return keep;
}

Tensor expected_drop_ratio(const Tensor& p, const GraphBatch& batch) {
  if (p.numel() != batch.num_undirected())
    throw std::invalid_argument("expected_drop_ratio: weight count mismatch");
  if (batch.num_undirected() == 0)
    return mean(Tensor::zeros({batch.num_graphs, 1}));
  const Tensor per_graph_sum =
      scatter_add_rows(p, batch.graph_of_undirected, batch.num_graphs);
  Tensor inv_count = Tensor::zeros({batch.num_graphs, 1});
  for (Index g = 0; g < batch.num_graphs; ++g) {
    const Index c = batch.undirected_count[static_cast<size_t>(g)];
    inv_count.data()[static_cast<size_t>(g)] =
        c > 0 ? 1.0 / static_cast<double>(c) : 0.0;
  }
  return mean(mul(per_graph_sum, inv_count));
}

DropRatioStats drop_ratio_stats(const Tensor& p, const GraphBatch& batch) {
  if (p.numel() != batch.num_undirected())
    throw std::invalid_argument("drop_ratio_stats: weight count mismatch");
  DropRatioStats s;
  s.per_graph.assign(static_cast<size_t>(batch.num_graphs), 0.0);
  for (Index k = 0; k < batch.num_undirected(); ++k)
    s.per_graph[static_cast<size_t>(
        batch.graph_of_undirected[static_cast<size_t>(k)])] += p[k];
  for (Index g = 0; g < batch.num_graphs; ++g) {
    const Index c = batch.undirected_count[static_cast<size_t>(g)];
    if (c > 0) s.per_graph[static_cast<size_t>(g)] /= static_cast<double>(c);
    s.batch_mean += s.per_graph[static_cast<size_t>(g)];
  }
  s.batch_mean /= static_cast<double>(batch.num_graphs);
  return s;
}

}  // namespace adgcl
