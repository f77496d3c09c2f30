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

#include "adgcl/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace adgcl {

namespace {

void collect(NamedTensorRefs& out, const std::string& prefix, LinearParams& p,
             const char* wname = "w", const char* bname = "b") {
  out.emplace_back(prefix + "." + wname, &p.w);
  out.emplace_back(prefix + "." + bname, &p.b);
}

void collect(NamedTensorRefs& out, const std::string& prefix, MlpParams& p) {
  collect(out, prefix, p.l1, "w1", "b1");
  collect(out, prefix, p.l2, "w2", "b2");
}

NamedTensorCRefs to_const(NamedTensorRefs refs) {
  NamedTensorCRefs out;
  out.reserve(refs.size());
  for (auto& [name, t] : refs) out.emplace_back(name, t);
  return out;
}

Tensor linear(const Tensor& x, const LinearParams& p) {
  return add_rowvec(matmul(x, p.w), p.b);
}

Tensor mlp(const Tensor& x, const MlpParams& p) {
  return linear(relu(linear(x, p.l1)), p.l2);
}

Tensor dropout_mask(Index rows, Index cols, double rate, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor m = Tensor::zeros({rows, cols});
  const double scale = 1.0 / (1.0 - rate);
  for (double& v : m.data()) v = u(rng) < rate ? 0.0 : scale;
  return m;
}

}  // namespace

NamedTensorRefs EncoderParams::named_tensors(const std::string& prefix) {
  NamedTensorRefs out;
  collect(out, prefix + ".input", input);
  for (size_t k = 0; k < layers.size(); ++k) {
    const std::string lp = prefix + ".layer" + std::to_string(k);
    collect(out, lp, layers[k].mlp);
    if (layers[k].edge_embed) collect(out, lp + ".edge", *layers[k].edge_embed);
  }
  return out;
}

NamedTensorCRefs EncoderParams::named_tensors(const std::string& prefix) const {
  return to_const(const_cast<EncoderParams*>(this)->named_tensors(prefix));
}

NamedTensorRefs HeadParams::named_tensors(const std::string& prefix) {
  NamedTensorRefs out;
  collect(out, prefix, mlp);
  return out;
}

NamedTensorCRefs HeadParams::named_tensors(const std::string& prefix) const {
  return to_const(const_cast<HeadParams*>(this)->named_tensors(prefix));
}

Tensor glorot_uniform(Index rows, Index cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-limit, limit);
  Tensor w = Tensor::zeros({rows, cols});
  for (double& v : w.data()) v = u(rng);
  return w;
}

namespace {
LinearParams init_linear(Index in, Index out, std::mt19937_64& rng) {
  return {glorot_uniform(in, out, rng), Tensor::zeros({1, out})};
}

MlpParams init_mlp(Index in, Index hidden, Index out, std::mt19937_64& rng) {
  return {init_linear(in, hidden, rng), init_linear(hidden, out, rng)};
}
}  // namespace

EncoderParams init_encoder_params(Index feature_dim, Index hidden_dim,
                                  Index num_layers, std::mt19937_64& rng,
                                  Index edge_feature_dim) {
  if (num_layers < 1)
    throw std::invalid_argument("init_encoder_params: need at least one layer");
  EncoderParams p;
  p.hidden_dim = hidden_dim;
  p.input = init_linear(feature_dim, hidden_dim, rng);
  for (Index k = 0; k < num_layers; ++k) {
    GinLayerParams layer;
    layer.mlp = init_mlp(hidden_dim, hidden_dim, hidden_dim, rng);
    if (edge_feature_dim > 0)
      layer.edge_embed = init_linear(edge_feature_dim, hidden_dim, rng);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

HeadParams init_head_params(Index hidden_dim, std::mt19937_64& rng) {
  return {init_mlp(hidden_dim, hidden_dim, hidden_dim, rng)};
}

Tensor gin_layer(const Tensor& h, const GraphBatch& batch,
                 const Tensor& edge_keep, const GinLayerParams& params) {
  if (edge_keep.numel() != batch.num_edges())
    throw std::invalid_argument(
        "gin_layer: " + std::to_string(edge_keep.numel()) + " keep weights for " +
        std::to_string(batch.num_edges()) + " directed edges");
  Tensor aggregated;
  if (batch.num_edges() == 0) {
    aggregated = h;
  } else {
    Tensor messages = gather_rows(h, batch.edge_src());
    if (params.edge_embed) {
      if (!batch.edge_feat)
        throw std::invalid_argument("gin_layer: edge_embed params but no edge features");
      const Tensor ef = Tensor::from_matrix(*batch.edge_feat);
      messages = add(messages, linear(ef, *params.edge_embed));
    }
    messages = scale_rows(messages, edge_keep);
    aggregated = add(h, scatter_add_rows(messages, batch.edge_dst(), batch.num_nodes));
  }
  return mlp(aggregated, params.mlp);
}

Tensor encode_nodes(const GraphBatch& batch, const EncoderParams& params,
                    const Tensor& edge_keep, const ForwardOptions& opts) {
  if (opts.dropout < 0.0 || opts.dropout >= 1.0)
    throw std::invalid_argument("encode: dropout must be in [0,1)");
  if (opts.dropout > 0.0 && opts.rng == nullptr)
    throw std::invalid_argument("encode: dropout needs a generator");
  Tensor h = linear(Tensor::from_matrix(batch.node_feat), params.input);
  for (const GinLayerParams& layer : params.layers) {
    h = gin_layer(h, batch, edge_keep, layer);
    if (opts.dropout > 0.0)
      h = mul(h, dropout_mask(h.rows(), h.cols(), opts.dropout, *opts.rng));
  }
  return h;
}

Tensor encode(const GraphBatch& batch, const EncoderParams& params,
              const Tensor& edge_keep, const ForwardOptions& opts) {
  const Tensor h = encode_nodes(batch, params, edge_keep, opts);
  return scatter_add_rows(h, batch.graph_of_node, batch.num_graphs);
}

Tensor encode(const GraphBatch& batch, const EncoderParams& params) {
  return encode(batch, params, Tensor::ones({batch.num_edges(), 1}));
}

Tensor project(const Tensor& embeddings, const HeadParams& head) {
  if (embeddings.cols() != head.mlp.l1.w.rows())
    throw std::invalid_argument("project: embedding dim " +
                                std::to_string(embeddings.cols()) +
                                " does not match head input " +
                                std::to_string(head.mlp.l1.w.rows()));
  return mlp(embeddings, head.mlp);
}

}  // namespace adgcl
