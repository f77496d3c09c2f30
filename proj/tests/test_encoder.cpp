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

#include <algorithm>
#include <random>

#include "adgcl/checkpoint.hpp"
#include "adgcl/wl.hpp"
#include "doctest.h"

using namespace adgcl;

namespace {

Graph from_undirected(Index n, std::vector<std::pair<Index, Index>> edges,
                      Index feat_dim = 1) {
  Graph g;
  g.num_nodes = n;
  g.edges = std::move(edges);
  symmetrize_edges(g);
  g.node_feat = RowMatrix::Ones(n, feat_dim);
  return g;
}

// 1-d identity MLP: l1 = l2 = identity, zero biases. Transparent for
// non-negative activations.
GinLayerParams identity_layer() {
  GinLayerParams p;
  p.mlp.l1 = {Tensor({1, 1}, {1.0}), Tensor::zeros({1, 1})};
  p.mlp.l2 = {Tensor({1, 1}, {1.0}), Tensor::zeros({1, 1})};
  return p;
}

Graph permuted(const Graph& g, const std::vector<Index>& pi) {
  Graph out;
  out.num_nodes = g.num_nodes;
  out.node_feat = RowMatrix(g.num_nodes, g.node_feat.cols());
  for (Index v = 0; v < g.num_nodes; ++v)
    out.node_feat.row(pi[static_cast<size_t>(v)]) = g.node_feat.row(v);
  for (const auto& [u, v] : g.edges)
    out.edges.emplace_back(pi[static_cast<size_t>(u)], pi[static_cast<size_t>(v)]);
  out.label = g.label;
  return out;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("encoder");

TEST_CASE("gin_layer sums weighted neighbor messages") {
  const Graph g = from_undirected(2, {{0, 1}});
  const GraphBatch b = make_batch({g});
  const Tensor h({2, 1}, {1.0, 2.0});
  const GinLayerParams layer = identity_layer();

  const Tensor full = gin_layer(h, b, Tensor::ones({2, 1}), layer);
  CHECK(full.data() == std::vector<double>{3.0, 3.0});

  const Tensor dropped = gin_layer(h, b, Tensor::zeros({2, 1}), layer);
  CHECK(dropped.data() == std::vector<double>{1.0, 2.0});

  const Tensor half = gin_layer(h, b, Tensor::full({2, 1}, 0.5), layer);
  CHECK(half.data() == std::vector<double>{2.0, 2.5});
}

TEST_CASE("gin_layer rejects a keep-weight length mismatch") {
  const Graph g = from_undirected(2, {{0, 1}});
  const GraphBatch b = make_batch({g});
  CHECK_THROWS_WITH_AS(gin_layer(Tensor({2, 1}, {1.0, 2.0}), b,
                                 Tensor::ones({3, 1}), identity_layer()),
                       doctest::Contains("keep weights"), std::invalid_argument);
}

TEST_CASE("zero features and zero biases give a zero embedding") {
  Graph g = from_undirected(3, {{0, 1}, {1, 2}});
  g.node_feat = RowMatrix::Zero(3, 2);
  const GraphBatch b = make_batch({g});
  std::mt19937_64 rng(1);
  const EncoderParams params = init_encoder_params(2, 8, 3, rng);
  const Tensor emb = encode(b, params);
  for (double v : emb.data()) CHECK(v == 0.0);
}

TEST_CASE("encode is invariant to node permutation") {
  std::mt19937_64 rng(2);
  MotifDatasetSpec spec;
  spec.feature_mode = FeatureMode::kDegreeOneHot;
  const auto graphs = generate_planted_motif(10, 55, spec);
  const EncoderParams params =
      init_encoder_params(graphs[0].feature_dim(), 16, 3, rng);
  std::mt19937_64 perm_rng(3);
  for (const Graph& g : graphs) {
    std::vector<Index> pi(static_cast<size_t>(g.num_nodes));
    for (Index v = 0; v < g.num_nodes; ++v) pi[static_cast<size_t>(v)] = v;
    std::shuffle(pi.begin(), pi.end(), perm_rng);
    const Tensor e1 = encode(make_batch({g}), params);
    const Tensor e2 = encode(make_batch({permuted(g, pi)}), params);
    CHECK(max_abs_diff(e1, e2) < 1e-9);
  }
}

TEST_CASE("1-WL equivalent graphs receive identical embeddings") {
  const Graph c6 = from_undirected(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
  const Graph two_c3 = from_undirected(
      6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
  REQUIRE(wl_equivalent(c6, two_c3));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    const EncoderParams params = init_encoder_params(1, 32, 5, rng);
    const Tensor e1 = encode(make_batch({c6}), params);
    const Tensor e2 = encode(make_batch({two_c3}), params);
    CHECK(max_abs_diff(e1, e2) < 1e-9);
  }
}

TEST_CASE("with identity MLPs and one layer, encode is affine in each keep weight") {
  const Graph g = from_undirected(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const GraphBatch b = make_batch({g});
  EncoderParams params;
  params.hidden_dim = 1;
  params.input = {Tensor({1, 1}, {1.0}), Tensor::zeros({1, 1})};
  params.layers.push_back(identity_layer());

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index e = 0; e < b.num_edges(); ++e) {
    Tensor keep = Tensor::zeros({b.num_edges(), 1});
    for (double& v : keep.data()) v = u(rng);
    auto value_at = [&](double w) {
      Tensor k = keep;
      k.data()[static_cast<size_t>(e)] = w;
      return encode(b, params, k).scalar_value();
    };
    const double lo = value_at(0.0), mid = value_at(0.5), hi = value_at(1.0);
    CHECK(std::abs(mid - 0.5 * (lo + hi)) < 1e-12);
  }
}

TEST_CASE("project applies a plain 2-layer MLP row-wise") {
  HeadParams head;
  head.mlp.l1 = {Tensor({2, 2}, {1, 0, 0, 1}), Tensor::zeros({1, 2})};
  head.mlp.l2 = {Tensor({2, 2}, {1, 0, 0, 1}), Tensor::zeros({1, 2})};
  const Tensor x({2, 2}, {1.0, 2.0, 0.5, 3.0});
  CHECK(project(x, head).data() == x.data());

  HeadParams zero;
  zero.mlp.l1 = {Tensor::zeros({2, 2}), Tensor::zeros({1, 2})};
  zero.mlp.l2 = {Tensor::zeros({2, 2}), Tensor({1, 2}, {4.0, -1.0})};
  const Tensor z = project(x, zero);
  CHECK(z.data() == std::vector<double>{4.0, -1.0, 4.0, -1.0});
}

TEST_CASE("project matches an independent matrix-arithmetic oracle") {
  std::mt19937_64 rng(12);
  HeadParams head = init_head_params(6, rng);
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor x = Tensor::zeros({5, 6});
  for (double& v : x.data()) v = n(rng);

  const Tensor z = project(x, head);

  // oracle: straight Eigen evaluation, no tensor ops involved
  const RowMatrix inner =
      (x.mat() * head.mlp.l1.w.mat()).rowwise() + head.mlp.l1.b.mat().row(0);
  const RowMatrix hidden = inner.cwiseMax(0.0);
  const RowMatrix expect =
      (hidden * head.mlp.l2.w.mat()).rowwise() + head.mlp.l2.b.mat().row(0);
  CHECK(max_abs_diff(z, Tensor::from_matrix(expect)) < 1e-12);
}

TEST_CASE("project rejects a dimension mismatch") {
  std::mt19937_64 rng(1);
  const HeadParams head = init_head_params(4, rng);
  CHECK_THROWS_AS(project(Tensor::zeros({2, 3}).detached(), head),
                  std::invalid_argument);
}

TEST_CASE("encode gradients pass the finite difference check") {
  MotifDatasetSpec spec;
  spec.min_nodes = 5;
  spec.max_nodes = 7;
  const auto graphs = generate_planted_motif(3, 19, spec);
  const GraphBatch b = make_batch(graphs);
  std::mt19937_64 rng(5);
  EncoderParams params = init_encoder_params(1, 4, 2, rng);
  // non-zero biases keep relu inputs away from the kink
  for (auto& [name, t] : params.named_tensors())
    if (name.find(".b") != std::string::npos)
      for (double& v : t->data()) v = 0.05;

  // w.r.t. one weight matrix
  const auto f_w = [&](Tape& tape, const Tensor& w) {
    EncoderParams p = params;
    p.layers[0].mlp.l1.w = w;
    return sum(encode(b, p, Tensor::ones({b.num_edges(), 1})));
  };
  CHECK(finite_difference_check(f_w, params.layers[0].mlp.l1.w, 1e-5) < 1e-4);

  // w.r.t. the keep weights
  const auto f_k = [&](Tape& tape, const Tensor& k) {
    return sum(encode(b, params, k));
  };
  CHECK(finite_difference_check(f_k, Tensor::full({b.num_edges(), 1}, 0.7), 1e-5) <
        1e-4);
}

TEST_CASE("edge attributes feed the messages through the per-layer embedding") {
  Graph g = from_undirected(3, {{0, 1}, {1, 2}});
  RowMatrix ef(4, 2);
  ef << 1, 0, 1, 0, 0, 1, 0, 1;  // both orientations share the features
  g.edge_feat = ef;
  const GraphBatch b = make_batch({g});
  std::mt19937_64 rng(9);
  EncoderParams params = init_encoder_params(1, 4, 2, rng, /*edge_feature_dim=*/2);
  REQUIRE(params.layers[0].edge_embed.has_value());
  const Tensor with = encode(b, params);
  CHECK(with.all_finite());

  // zeroing the edge embedding must change the output
  EncoderParams zeroed = params;
  for (auto& layer : zeroed.layers) {
    for (double& v : layer.edge_embed->w.data()) v = 0.0;
    for (double& v : layer.edge_embed->b.data()) v = 0.0;
  }
  CHECK(encode(b, zeroed).data() != with.data());

  const auto f = [&](Tape&, const Tensor& w) {
    EncoderParams p = params;
    p.layers[0].edge_embed->w = w;
    return sum(encode(b, p, Tensor::full({b.num_edges(), 1}, 0.8)));
  };
  CHECK(finite_difference_check(f, params.layers[0].edge_embed->w, 1e-5) < 1e-4);
}

TEST_CASE("dropout is deterministic under a seeded generator and off at rate 0") {
  MotifDatasetSpec spec;
  const auto graphs = generate_planted_motif(4, 9, spec);
  const GraphBatch b = make_batch(graphs);
  std::mt19937_64 rng(5);
  const EncoderParams params = init_encoder_params(1, 8, 2, rng);

  std::mt19937_64 d1(77), d2(77);
  ForwardOptions o1{0.5, &d1}, o2{0.5, &d2};
  const Tensor keep = Tensor::ones({b.num_edges(), 1});
  CHECK(encode(b, params, keep, o1).data() == encode(b, params, keep, o2).data());
  CHECK(encode(b, params, keep).data() == encode(b, params).data());
}

TEST_CASE("checkpoint round trip restores every parameter") {
  std::mt19937_64 rng(31);
  const EncoderParams p = init_encoder_params(3, 8, 2, rng);
  const std::string path = "/tmp/adgcl_enc_ckpt.json";
  save_encoder(path, p);
  const EncoderParams q = load_encoder(path);
  const auto a = p.named_tensors();
  const auto b = q.named_tensors();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(a[i].second->data() == b[i].second->data());
  }
  std::remove(path.c_str());
}

TEST_SUITE_END();
