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

#include "adgcl/wl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace adgcl {

namespace {

// Disjoint union view of one or two graphs, refined with one dictionary.
struct JointGraph {
  Index num_nodes = 0;
  std::vector<std::vector<Index>> adj;
  std::vector<int> initial_color;
  std::vector<Index> graph_of_node;

  void append(const Graph& g, std::map<std::vector<double>, int>& feat_dict,
              Index graph_id) {
    const Index base = num_nodes;
    for (Index v = 0; v < g.num_nodes; ++v) {
      std::vector<double> row(g.node_feat.row(v).begin(), g.node_feat.row(v).end());
      auto [it, fresh] = feat_dict.emplace(std::move(row),
                                           static_cast<int>(feat_dict.size()));
      (void)fresh;
      initial_color.push_back(it->second);
      adj.emplace_back();
      graph_of_node.push_back(graph_id);
    }
    for (const auto& [u, v] : g.edges)
      adj[static_cast<size_t>(base + u)].push_back(base + v);
    num_nodes += g.num_nodes;
  }
};

int distinct_count(const std::vector<int>& colors) {
  return static_cast<int>(std::set<int>(colors.begin(), colors.end()).size());
}

// One refinement pass: new color = fresh id of (own color, sorted neighbor
// color multiset). The dictionary is injective by construction.
std::vector<int> refine_once(const JointGraph& jg, const std::vector<int>& colors) {
  std::map<std::pair<int, std::vector<int>>, int> dict;
  std::vector<int> next(colors.size());
  for (Index v = 0; v < jg.num_nodes; ++v) {
    std::vector<int> neigh;
    neigh.reserve(jg.adj[static_cast<size_t>(v)].size());
    for (Index u : jg.adj[static_cast<size_t>(v)])
      neigh.push_back(colors[static_cast<size_t>(u)]);
    std::sort(neigh.begin(), neigh.end());
    auto key = std::make_pair(colors[static_cast<size_t>(v)], std::move(neigh));
    auto [it, fresh] = dict.emplace(std::move(key), static_cast<int>(dict.size()));
    (void)fresh;
    next[static_cast<size_t>(v)] = it->second;
  }
  return next;
}

std::vector<std::vector<int>> refine_to_stable(const JointGraph& jg,
                                               int max_rounds,
                                               int& stable_round) {
  std::vector<std::vector<int>> rounds{jg.initial_color};
  stable_round = 0;
  for (int k = 1; k <= max_rounds; ++k) {
    std::vector<int> next = refine_once(jg, rounds.back());
    const bool stalled = distinct_count(next) == distinct_count(rounds.back());
    rounds.push_back(std::move(next));
    stable_round = k;
    if (stalled) break;
  }
  return rounds;
}

std::vector<std::pair<int, Index>> histogram(const std::vector<int>& colors,
                                             const std::vector<Index>& graph_of_node,
                                             Index graph_id) {
  std::map<int, Index> counts;
  for (size_t v = 0; v < colors.size(); ++v)
    if (graph_of_node[v] == graph_id) counts[colors[v]] += 1;
  return {counts.begin(), counts.end()};
}

}  // namespace

WlColoring wl_refine(const Graph& g, int max_rounds) {
  JointGraph jg;
  std::map<std::vector<double>, int> feat_dict;
  jg.append(g, feat_dict, 0);
  WlColoring out;
  out.rounds = refine_to_stable(jg, max_rounds, out.stable_round);
  out.signature = histogram(out.rounds.back(), jg.graph_of_node, 0);
  return out;
}

bool wl_equivalent(const Graph& g1, const Graph& g2) {
  if (g1.feature_dim() != g2.feature_dim())
    throw std::invalid_argument("wl_equivalent: feature dims differ");
  JointGraph jg;
  std::map<std::vector<double>, int> feat_dict;
  jg.append(g1, feat_dict, 0);
  jg.append(g2, feat_dict, 1);
  int stable = 0;
  const int max_rounds = static_cast<int>(jg.num_nodes);
  const auto rounds = refine_to_stable(jg, max_rounds, stable);
  return histogram(rounds.back(), jg.graph_of_node, 0) ==
         histogram(rounds.back(), jg.graph_of_node, 1);
}

}  // namespace adgcl
