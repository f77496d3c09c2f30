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
#include <cstdio>
#include <random>
#include <set>

#include "adgcl/checkpoint.hpp"
#include "doctest.h"

using namespace adgcl;

namespace {

Graph from_undirected(Index n, std::vector<std::pair<Index, Index>> edges) {
  Graph g;
  g.num_nodes = n;
  g.edges = std::move(edges);
  symmetrize_edges(g);
  g.node_feat = RowMatrix::Ones(n, 1);
  return g;
}

std::multiset<double> rounded_multiset(const Tensor& t) {
  std::multiset<double> out;
  for (double v : t.data()) out.insert(std::round(v * 1e9) / 1e9);
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("augmenter");

TEST_CASE("zero edge model gives the bias logit on every edge") {
  MotifDatasetSpec spec;
  const auto graphs = generate_planted_motif(4, 2, spec);
  const GraphBatch b = make_batch(graphs);
  std::mt19937_64 rng(1);
  AugmenterParams params = init_augmenter_params(1, 8, 2, rng);
  for (double& v : params.edge_mlp.l1.w.data()) v = 0.0;
  for (double& v : params.edge_mlp.l2.w.data()) v = 0.0;
  params.edge_mlp.l2.b = Tensor({1, 1}, {0.37});
  const Tensor omega = augmenter_logits(b, params);
  REQUIRE(omega.numel() == b.num_undirected());
  for (double v : omega.data()) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("permuting nodes preserves the multiset of logits") {
  Graph g = from_undirected(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {1, 3}});
  std::mt19937_64 rng(6);
  const AugmenterParams params = init_augmenter_params(1, 8, 3, rng);
  const Tensor before = augmenter_logits(make_batch({g}), params);

  std::vector<Index> pi{3, 0, 4, 1, 2};
  Graph p;
  p.num_nodes = 5;
  p.node_feat = RowMatrix::Ones(5, 1);
  for (const auto& [u, v] : g.edges)
    p.edges.emplace_back(pi[static_cast<size_t>(u)], pi[static_cast<size_t>(v)]);
  const Tensor after = augmenter_logits(make_batch({p}), params);
  CHECK(rounded_multiset(before) == rounded_multiset(after));
}

TEST_CASE("swapping the stored orientation leaves logits unchanged") {
  Graph g1 = from_undirected(3, {{0, 1}, {1, 2}});
  Graph g2;
  g2.num_nodes = 3;
  g2.node_feat = RowMatrix::Ones(3, 1);
  g2.edges = {{1, 0}, {0, 1}, {1, 2}, {2, 1}};  // first pair stored reversed
  std::mt19937_64 rng(2);
  const AugmenterParams params = init_augmenter_params(1, 6, 2, rng);
  const Tensor a = augmenter_logits(make_batch({g1}), params);
  const Tensor b = augmenter_logits(make_batch({g2}), params);
  CHECK(rounded_multiset(a) == rounded_multiset(b));
}

TEST_CASE("gumbel relaxation hits the closed-form values") {
  for (double tau : {0.1, 0.5, 1.0, 3.0}) {
    const Tensor p = gumbel_relax(Tensor({1, 1}, {0.0}), tau, Tensor({1, 1}, {0.5}));
    CHECK(p.scalar_value() == doctest::Approx(0.5).epsilon(1e-12));
  }
  const Tensor p2 = gumbel_relax(Tensor({1, 1}, {2.0}), 1.0, Tensor({1, 1}, {0.5}));
  CHECK(p2.scalar_value() == doctest::Approx(0.880797).epsilon(1e-6));
  const Tensor p3 = gumbel_relax(Tensor({1, 1}, {1.0}), 0.01, Tensor({1, 1}, {0.5}));
  CHECK(p3.scalar_value() > 0.999);
}

TEST_CASE("gumbel relaxation rejects non-positive temperature") {
  CHECK_THROWS_AS(gumbel_relax(Tensor({1, 1}, {0.0}), 0.0, Tensor({1, 1}, {0.5})),
                  std::invalid_argument);
}

TEST_CASE("p is strictly increasing in omega and in delta") {
  const double tau = 0.7;
  double prev = -1.0;
  for (double w : {-3.0, -1.0, 0.0, 0.5, 2.0, 4.0}) {
    const double p =
        gumbel_relax(Tensor({1, 1}, {w}), tau, Tensor({1, 1}, {0.3})).scalar_value();
    CHECK(p > prev);
    prev = p;
  }
  prev = -1.0;
  for (double d : {0.05, 0.2, 0.5, 0.8, 0.95}) {
    const double p =
        gumbel_relax(Tensor({1, 1}, {0.4}), tau, Tensor({1, 1}, {d})).scalar_value();
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("autodiff dp/domega equals p(1-p)/tau to 1e-10") {
  for (double tau : {0.3, 1.0, 2.5}) {
    for (double w : {-1.5, 0.0, 0.8}) {
      Tape tape;
      const Tensor omega = tape.leaf(Tensor({1, 1}, {w}));
      const Tensor p = gumbel_relax(omega, tau, Tensor({1, 1}, {0.4}));
      tape.backward(sum(p));
      const double pv = p.scalar_value();
      CHECK(std::abs(tape.grad(omega)[0] - pv * (1.0 - pv) / tau) < 1e-10);
    }
  }
}

TEST_CASE("saturated logits never or always drop") {
  std::mt19937_64 rng(3);
  const Tensor low = Tensor::full({50, 1}, -20.0);
  for (auto d : sample_hard(low, rng)) CHECK(d == 0);
  const Tensor high = Tensor::full({50, 1}, 20.0);
  for (auto d : sample_hard(high, rng)) CHECK(d == 1);
}

TEST_CASE("hard sampling frequency matches sigmoid(omega)") {
  const int n = 10000;
  for (double w : {0.0, 1.0, -0.7}) {
    std::mt19937_64 rng(17);
    const Tensor omega = Tensor::full({n, 1}, w);
    const auto mask = sample_hard(omega, rng);
    const double freq =
        static_cast<double>(std::count(mask.begin(), mask.end(), 1)) / n;
    const double p = 1.0 / (1.0 + std::exp(-w));
    const double sigma3 = 3.0 * std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(freq - p) <= sigma3);
  }
}

TEST_CASE("expected drop ratio averages per graph then over the batch") {
  const Graph g4 = from_undirected(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const GraphBatch one = make_batch({g4});
  CHECK(expected_drop_ratio(Tensor::full({4, 1}, 0.5), one).scalar_value() ==
        doctest::Approx(0.5));

  const Graph g2 = from_undirected(3, {{0, 1}, {1, 2}});
  CHECK(expected_drop_ratio(Tensor({2, 1}, {1.0, 0.0}), make_batch({g2}))
            .scalar_value() == doctest::Approx(0.5));

  // ratios 0.2 and 0.6 -> batch mean 0.4
  const GraphBatch two = make_batch({g2, g2});
  const Tensor p({4, 1}, {0.2, 0.2, 0.6, 0.6});
  CHECK(expected_drop_ratio(p, two).scalar_value() == doctest::Approx(0.4));

  const auto stats = drop_ratio_stats(p, two);
  CHECK(stats.per_graph[0] == doctest::Approx(0.2));
  CHECK(stats.per_graph[1] == doctest::Approx(0.6));
  CHECK(stats.batch_mean == doctest::Approx(0.4));
}

TEST_CASE("a graph with no edges contributes ratio zero") {
  Graph lonely;
  lonely.num_nodes = 3;
  lonely.node_feat = RowMatrix::Ones(3, 1);
  const Graph g2 = from_undirected(3, {{0, 1}, {1, 2}});
  const GraphBatch b = make_batch({lonely, g2});
  const Tensor p({2, 1}, {1.0, 1.0});
  CHECK(expected_drop_ratio(p, b).scalar_value() == doctest::Approx(0.5));
}

TEST_CASE("drop ratio ignores edge storage order") {
  Graph a = from_undirected(4, {{0, 1}, {1, 2}, {2, 3}});
  Graph b = from_undirected(4, {{2, 3}, {0, 1}, {1, 2}});
  const Tensor p({3, 1}, {0.9, 0.1, 0.4});
  // same undirected edges, same weights attached by sorted endpoint pairs
  auto ratio_with_sorted_weights = [&](const Graph& g) {
    const GraphBatch batch = make_batch({g});
    std::vector<std::pair<std::pair<Index, Index>, double>> w;
    std::vector<std::pair<Index, Index>> keys;
    for (Index k = 0; k < batch.num_undirected(); ++k) {
      auto [u, v] = batch.edges[static_cast<size_t>(
          batch.undirected_rep[static_cast<size_t>(k)])];
      if (u > v) std::swap(u, v);
      keys.emplace_back(u, v);
    }
    Tensor weights = Tensor::zeros({batch.num_undirected(), 1});
    std::vector<std::pair<Index, Index>> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    for (size_t k = 0; k < keys.size(); ++k) {
      const auto pos = std::find(sorted.begin(), sorted.end(), keys[k]);
      weights.data()[k] = p[static_cast<Index>(pos - sorted.begin())];
    }
    return expected_drop_ratio(weights, batch).scalar_value();
  };
  CHECK(ratio_with_sorted_weights(a) ==
        doctest::Approx(ratio_with_sorted_weights(b)).epsilon(1e-12));
}

TEST_CASE("relaxed keep weights mirror onto both orientations") {
  const Graph g = from_undirected(3, {{0, 1}, {1, 2}});
  const GraphBatch b = make_batch({g});
  const Tensor p({2, 1}, {0.25, 0.75});
  const Tensor keep = relaxed_keep_weights(p, b);
  REQUIRE(keep.numel() == 4);
  for (Index e = 0; e < 4; ++e) {
    const Index uid = b.undirected_of_edge[static_cast<size_t>(e)];
    CHECK(keep[e] == doctest::Approx(1.0 - p[uid]).epsilon(1e-15));
    CHECK(keep[e] == keep[b.undirected_pair[static_cast<size_t>(e)]]);
  }
}

TEST_CASE("identity and degenerate augmentations behave as expected") {
  MotifDatasetSpec spec;
  const auto graphs = generate_planted_motif(4, 4, spec);
  const GraphBatch b = make_batch(graphs);
  std::mt19937_64 rng(8);
  const EncoderParams enc = init_encoder_params(1, 8, 3, rng);

  const Tensor keep_all = relaxed_keep_weights(
      Tensor::zeros({b.num_undirected(), 1}).detached(), b);
  CHECK(encode(b, enc, keep_all).data() == encode(b, enc).data());

  const Tensor keep_none =
      relaxed_keep_weights(Tensor::ones({b.num_undirected(), 1}), b);
  const Tensor emb = encode(b, enc, keep_none);
  CHECK(emb.all_finite());
}

TEST_CASE("augmenter checkpoint round trip restores identical logits") {
  MotifDatasetSpec spec;
  const auto graphs = generate_planted_motif(3, 6, spec);
  const GraphBatch b = make_batch(graphs);
  std::mt19937_64 rng(21);
  const AugmenterParams p = init_augmenter_params(1, 8, 2, rng);
  const std::string path = "/tmp/adgcl_aug_ckpt.json";
  save_augmenter(path, p);
  const AugmenterParams q = load_augmenter(path);
  CHECK(augmenter_logits(b, p).data() == augmenter_logits(b, q).data());
  std::remove(path.c_str());
}

TEST_CASE("relaxed p=0.5 halves the messages, matching the layer example") {
  const Graph g = from_undirected(2, {{0, 1}});
  const GraphBatch b = make_batch({g});
  GinLayerParams layer;
  layer.mlp.l1 = {Tensor({1, 1}, {1.0}), Tensor::zeros({1, 1})};
  layer.mlp.l2 = {Tensor({1, 1}, {1.0}), Tensor::zeros({1, 1})};
  const Tensor keep = relaxed_keep_weights(Tensor::full({1, 1}, 0.5), b);
  const Tensor out = gin_layer(Tensor({2, 1}, {1.0, 2.0}), b, keep, layer);
  CHECK(out.data() == std::vector<double>{2.0, 2.5});
}

TEST_SUITE_END();
