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

#ifndef ADGCL_GRAPH_HPP
#define ADGCL_GRAPH_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "adgcl/tensor.hpp"

namespace adgcl {

/// Class index (long) or a real-valued target vector.
using GraphLabel = std::variant<long, Eigen::VectorXd>;

/// Attributed undirected graph. Edges are stored as directed pairs with both
/// orientations present; no self loops. Isolated nodes are allowed.
struct Graph {
  Index num_nodes = 0;
  std::vector<std::pair<Index, Index>> edges;  // both orientations
  RowMatrix node_feat;                         // num_nodes x F
  std::optional<RowMatrix> edge_feat;          // |edges| x Fe, aligned with edges
  std::optional<GraphLabel> label;

  Index feature_dim() const { return node_feat.cols(); }
  Index num_undirected_edges() const { return static_cast<Index>(edges.size()) / 2; }
  bool has_class_label() const {
    return label && std::holds_alternative<long>(*label);
  }
  long class_label() const { return std::get<long>(*label); }
};

/// Throws std::invalid_argument naming the first violated invariant.
void validate_graph(const Graph& g, const std::string& context = "graph");

/// Adds the reverse of every directed edge; input lists each undirected edge
/// once. Edge features, when present, are duplicated onto the reverse.
void symmetrize_edges(Graph& g);

/// Block-diagonal minibatch of graphs. Node and edge indices are global.
struct GraphBatch {
  Index num_graphs = 0;
  Index num_nodes = 0;
  std::vector<Index> node_offset;    // per-graph first node, starts at 0
  std::vector<Index> graph_of_node;  // size num_nodes
  std::vector<std::pair<Index, Index>> edges;  // directed, re-indexed
  std::vector<Index> undirected_pair;  // directed edge -> its reverse (involution)

  // One slot per undirected edge; both orientations share it.
  std::vector<Index> undirected_of_edge;  // directed edge -> undirected id
  std::vector<Index> undirected_rep;      // undirected id -> one directed edge
  std::vector<Index> graph_of_undirected;
  std::vector<Index> undirected_count;    // per graph

  RowMatrix node_feat;
  std::optional<RowMatrix> edge_feat;
  std::vector<std::optional<GraphLabel>> labels;

  std::vector<Index> edge_src() const;
  std::vector<Index> edge_dst() const;
  Index num_edges() const { return static_cast<Index>(edges.size()); }
  Index num_undirected() const { return static_cast<Index>(undirected_rep.size()); }
};

/// Assembles a block-diagonal batch; all graphs must share feature dims.
GraphBatch make_batch(const std::vector<Graph>& graphs);

/// Recovers graph `i` from the batch exactly (used by round-trip tests).
Graph extract_graph(const GraphBatch& batch, Index i);

struct DatasetSplit {
  std::vector<Index> train, val, test;
};

/// Deterministic shuffle split. Val/test sizes are floored, the remainder
/// goes to train. Ratios must be positive and sum to 1 (within 1e-9); n >= 3.
DatasetSplit split_dataset(Index n, double train_ratio, double val_ratio,
                           double test_ratio, std::uint64_t seed);

// --- JSON-Lines dataset format ------------------------------------------
// One object per line: num_nodes (int), edges (list of [u,v], each undirected
// edge once), node_feat (list of rows), optional edge_feat (aligned with
// edges), optional label (int or list of floats). UTF-8, LF.

std::vector<Graph> load_jsonl(const std::string& path);
void save_jsonl(const std::string& path, const std::vector<Graph>& graphs);

// --- Synthetic labeled datasets ------------------------------------------

enum class MotifKind { kNone, kCycle, kClique, kStar };

enum class FeatureMode { kConstant, kDegreeOneHot };

/// Binary classification data: Erdos-Renyi background plus a motif planted on
/// a random node subset for the class that has one.
struct MotifDatasetSpec {
  double background_p = 0.05;
  Index min_nodes = 12;
  Index max_nodes = 20;
  MotifKind class0_motif = MotifKind::kNone;
  MotifKind class1_motif = MotifKind::kCycle;
  Index motif_size = 5;
  FeatureMode feature_mode = FeatureMode::kConstant;
  Index degree_cap = 10;  // one-hot dimension when feature_mode = degree
};

std::vector<Graph> generate_planted_motif(Index n_graphs, std::uint64_t seed,
                                          const MotifDatasetSpec& spec);

/// Regression data: label = mean degree / normalizer + gaussian noise.
struct RegressionDatasetSpec {
  double edge_p = 0.2;
  Index min_nodes = 8;
  Index max_nodes = 16;
  double noise_sigma = 0.0;
  double normalizer = 0.0;  // <= 0 means max_nodes - 1
  FeatureMode feature_mode = FeatureMode::kConstant;
  Index degree_cap = 10;
};

double mean_degree_label(const Graph& g, const RegressionDatasetSpec& spec);

std::vector<Graph> generate_regression_degree_target(
    Index n_graphs, std::uint64_t seed, const RegressionDatasetSpec& spec);

}  // namespace adgcl

#endif  // ADGCL_GRAPH_HPP
