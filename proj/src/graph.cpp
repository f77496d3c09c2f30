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

#include "adgcl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace adgcl {

namespace {
using nlohmann::json;

std::pair<Index, Index> ordered(Index u, Index v) {
  return u < v ? std::make_pair(u, v) : std::make_pair(v, u);
}
}  // namespace

void validate_graph(const Graph& g, const std::string& context) {
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument(context + ": " + msg);
  };
  if (g.num_nodes <= 0) fail("num_nodes must be positive");
  if (g.node_feat.rows() != g.num_nodes)
    fail("node_feat has " + std::to_string(g.node_feat.rows()) + " rows for " +
         std::to_string(g.num_nodes) + " nodes");
  std::set<std::pair<Index, Index>> seen;
  for (const auto& [u, v] : g.edges) {
    if (u < 0 || u >= g.num_nodes || v < 0 || v >= g.num_nodes)
      fail("edge (" + std::to_string(u) + "," + std::to_string(v) +
           ") out of range");
    if (u == v) fail("self-loop at node " + std::to_string(u));
    if (!seen.insert({u, v}).second)
      fail("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
  for (const auto& [u, v] : g.edges)
    if (!seen.count({v, u}))
      fail("edge (" + std::to_string(u) + "," + std::to_string(v) +
           ") lacks its reverse orientation");
  if (g.edge_feat && g.edge_feat->rows() != static_cast<Index>(g.edges.size()))
    fail("edge_feat rows do not match edge count");
}

void symmetrize_edges(Graph& g) {
  const size_t n = g.edges.size();
  std::vector<std::pair<Index, Index>> out;
  out.reserve(2 * n);
  std::optional<RowMatrix> feat;
  if (g.edge_feat) feat = RowMatrix(2 * static_cast<Index>(n), g.edge_feat->cols());
  for (size_t i = 0; i < n; ++i) {
    const auto [u, v] = g.edges[i];
    out.emplace_back(u, v);
    out.emplace_back(v, u);
    if (feat) {
      feat->row(2 * static_cast<Index>(i)) = g.edge_feat->row(static_cast<Index>(i));
      feat->row(2 * static_cast<Index>(i) + 1) =
          g.edge_feat->row(static_cast<Index>(i));
    }
  }
  g.edges = std::move(out);
  g.edge_feat = std::move(feat);
}

std::vector<Index> GraphBatch::edge_src() const {
  std::vector<Index> s(edges.size());
  for (size_t i = 0; i < edges.size(); ++i) s[i] = edges[i].first;
  return s;
}

std::vector<Index> GraphBatch::edge_dst() const {
  std::vector<Index> d(edges.size());
  for (size_t i = 0; i < edges.size(); ++i) d[i] = edges[i].second;
  return d;
}

GraphBatch make_batch(const std::vector<Graph>& graphs) {
  if (graphs.empty()) throw std::invalid_argument("make_batch: empty input");
  const Index feat_dim = graphs[0].feature_dim();
  const bool has_edge_feat = graphs[0].edge_feat.has_value();
  Index edge_feat_dim = has_edge_feat ? graphs[0].edge_feat->cols() : 0;
  Index total_nodes = 0, total_edges = 0;
  for (const Graph& g : graphs) {
    if (g.feature_dim() != feat_dim)
      throw std::invalid_argument("make_batch: mixed node feature dims " +
                                  std::to_string(feat_dim) + " vs " +
                                  std::to_string(g.feature_dim()));
    if (g.edge_feat.has_value() != has_edge_feat ||
        (has_edge_feat && g.edge_feat->cols() != edge_feat_dim))
      throw std::invalid_argument("make_batch: mixed edge feature dims");
    total_nodes += g.num_nodes;
    total_edges += static_cast<Index>(g.edges.size());
  }

  GraphBatch b;
  b.num_graphs = static_cast<Index>(graphs.size());
  b.num_nodes = total_nodes;
  b.node_feat.resize(total_nodes, feat_dim);
  if (has_edge_feat) b.edge_feat = RowMatrix(total_edges, edge_feat_dim);
  b.graph_of_node.resize(static_cast<size_t>(total_nodes));
  b.edges.reserve(static_cast<size_t>(total_edges));
  b.undirected_pair.resize(static_cast<size_t>(total_edges));
  b.undirected_of_edge.resize(static_cast<size_t>(total_edges));
  b.undirected_count.assign(graphs.size(), 0);

  Index node_base = 0, edge_base = 0;
  for (Index gi = 0; gi < b.num_graphs; ++gi) {
    const Graph& g = graphs[static_cast<size_t>(gi)];
    b.node_offset.push_back(node_base);
    b.node_feat.middleRows(node_base, g.num_nodes) = g.node_feat;
    for (Index v = 0; v < g.num_nodes; ++v)
      b.graph_of_node[static_cast<size_t>(node_base + v)] = gi;

    // local (u,v) -> local directed index, to wire reverse pairs
    std::map<std::pair<Index, Index>, Index> local_idx;
    for (size_t e = 0; e < g.edges.size(); ++e)
      local_idx[g.edges[e]] = static_cast<Index>(e);
    for (size_t e = 0; e < g.edges.size(); ++e) {
      const auto [u, v] = g.edges[e];
      b.edges.emplace_back(node_base + u, node_base + v);
      if (b.edge_feat)
        b.edge_feat->row(edge_base + static_cast<Index>(e)) =
            g.edge_feat->row(static_cast<Index>(e));
      b.undirected_pair[static_cast<size_t>(edge_base) + e] =
          edge_base + local_idx.at({v, u});
      if (u < v) {
        const Index uid = static_cast<Index>(b.undirected_rep.size());
        b.undirected_rep.push_back(edge_base + static_cast<Index>(e));
        b.graph_of_undirected.push_back(gi);
        b.undirected_count[static_cast<size_t>(gi)] += 1;
        b.undirected_of_edge[static_cast<size_t>(edge_base) + e] = uid;
      }
    }
    // second pass: reverse orientations inherit the undirected id
    for (size_t e = 0; e < g.edges.size(); ++e) {
      const auto [u, v] = g.edges[e];
      if (u > v) {
        const Index rev = b.undirected_pair[static_cast<size_t>(edge_base) + e];
        b.undirected_of_edge[static_cast<size_t>(edge_base) + e] =
            b.undirected_of_edge[static_cast<size_t>(rev)];
      }
    }
    b.labels.push_back(g.label);
    node_base += g.num_nodes;
    edge_base += static_cast<Index>(g.edges.size());
  }
  return b;
}

Graph extract_graph(const GraphBatch& batch, Index i) {
  if (i < 0 || i >= batch.num_graphs)
    throw std::out_of_range("extract_graph: index " + std::to_string(i));
  const Index base = batch.node_offset[static_cast<size_t>(i)];
  const Index end = i + 1 < batch.num_graphs
                        ? batch.node_offset[static_cast<size_t>(i) + 1]
                        : batch.num_nodes;
  Graph g;
  g.num_nodes = end - base;
  g.node_feat = batch.node_feat.middleRows(base, g.num_nodes);
  std::vector<Index> edge_rows;
  for (size_t e = 0; e < batch.edges.size(); ++e) {
    const auto [u, v] = batch.edges[e];
    if (u >= base && u < end) {
      g.edges.emplace_back(u - base, v - base);
      edge_rows.push_back(static_cast<Index>(e));
    }
  }
  if (batch.edge_feat) {
    RowMatrix f(static_cast<Index>(edge_rows.size()), batch.edge_feat->cols());
    for (size_t r = 0; r < edge_rows.size(); ++r)
      f.row(static_cast<Index>(r)) = batch.edge_feat->row(edge_rows[r]);
    g.edge_feat = std::move(f);
  }
  g.label = batch.labels[static_cast<size_t>(i)];
  return g;
}

DatasetSplit split_dataset(Index n, double train_ratio, double val_ratio,
                           double test_ratio, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("split_dataset: need at least 3 items");
  if (train_ratio <= 0 || val_ratio <= 0 || test_ratio <= 0)
    throw std::invalid_argument("split_dataset: ratios must be positive");
  if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
    throw std::invalid_argument("split_dataset: ratios must sum to 1");

  std::vector<Index> perm(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  const Index n_val = static_cast<Index>(std::floor(static_cast<double>(n) * val_ratio));
  const Index n_test = static_cast<Index>(std::floor(static_cast<double>(n) * test_ratio));
  const Index n_train = n - n_val - n_test;  // remainder goes to train

  DatasetSplit s;
  s.train.assign(perm.begin(), perm.begin() + n_train);
  s.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  s.test.assign(perm.begin() + n_train + n_val, perm.end());
  return s;
}

namespace {

Graph parse_graph_line(const json& j, size_t line_no) {
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + msg);
  };
  if (!j.is_object()) fail("expected a JSON object");
  if (!j.contains("num_nodes") || !j["num_nodes"].is_number_integer())
    fail("missing integer num_nodes");
  Graph g;
  g.num_nodes = j["num_nodes"].get<Index>();
  if (!j.contains("node_feat") || !j["node_feat"].is_array())
    fail("missing node_feat");
  const auto& feat = j["node_feat"];
  if (static_cast<Index>(feat.size()) != g.num_nodes)
    fail("node_feat has " + std::to_string(feat.size()) + " rows, expected " +
         std::to_string(g.num_nodes));
  const Index fdim = feat.empty() ? 0 : static_cast<Index>(feat[0].size());
  g.node_feat.resize(g.num_nodes, fdim);
  for (Index r = 0; r < g.num_nodes; ++r) {
    const auto& row = feat[static_cast<size_t>(r)];
    if (static_cast<Index>(row.size()) != fdim) fail("ragged node_feat rows");
    for (Index c = 0; c < fdim; ++c) g.node_feat(r, c) = row[static_cast<size_t>(c)].get<double>();
  }
  if (j.contains("edges")) {
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2) fail("edge is not a [u,v] pair");
      g.edges.emplace_back(e[0].get<Index>(), e[1].get<Index>());
    }
  }
  if (j.contains("edge_feat") && !j["edge_feat"].is_null()) {
    const auto& ef = j["edge_feat"];
    if (ef.size() != g.edges.size())
      fail("edge_feat rows do not match edge count");
    const Index edim = ef.empty() ? 0 : static_cast<Index>(ef[0].size());
    RowMatrix m(static_cast<Index>(ef.size()), edim);
    for (size_t r = 0; r < ef.size(); ++r) {
      if (static_cast<Index>(ef[r].size()) != edim) fail("ragged edge_feat rows");
      for (Index c = 0; c < edim; ++c)
        m(static_cast<Index>(r), c) = ef[r][static_cast<size_t>(c)].get<double>();
    }
    g.edge_feat = std::move(m);
  }
  if (j.contains("label") && !j["label"].is_null()) {
    if (j["label"].is_number_integer()) {
      g.label = GraphLabel(j["label"].get<long>());
    } else if (j["label"].is_array()) {
      Eigen::VectorXd y(j["label"].size());
      for (size_t k = 0; k < j["label"].size(); ++k)
        y(static_cast<Index>(k)) = j["label"][k].get<double>();
      g.label = GraphLabel(y);
    } else {
      fail("label must be an integer or a list of floats");
    }
  }
  return g;
}

}  // namespace

std::vector<Graph> load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_jsonl: cannot open " + path);
  std::vector<Graph> graphs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("load_jsonl: line " + std::to_string(line_no) +
                               ": " + e.what());
    }
    Graph g = parse_graph_line(j, line_no);
    symmetrize_edges(g);
    validate_graph(g, "load_jsonl: graph " + std::to_string(graphs.size()));
    graphs.push_back(std::move(g));
  }
  return graphs;
}

void save_jsonl(const std::string& path, const std::vector<Graph>& graphs) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw std::runtime_error("save_jsonl: cannot open " + path);
  for (const Graph& g : graphs) {
    json j;
    j["num_nodes"] = g.num_nodes;
    json edges = json::array();
    json edge_feat = json::array();
    for (size_t e = 0; e < g.edges.size(); ++e) {
      const auto [u, v] = g.edges[e];
      if (u >= v) continue;  // write each undirected edge once
      edges.push_back({u, v});
      if (g.edge_feat) {
        json row = json::array();
        for (Index c = 0; c < g.edge_feat->cols(); ++c)
          row.push_back((*g.edge_feat)(static_cast<Index>(e), c));
        edge_feat.push_back(row);
      }
    }
    j["edges"] = edges;
    json feat = json::array();
    for (Index r = 0; r < g.num_nodes; ++r) {
      json row = json::array();
      for (Index c = 0; c < g.node_feat.cols(); ++c) row.push_back(g.node_feat(r, c));
      feat.push_back(row);
    }
    j["node_feat"] = feat;
    if (g.edge_feat) j["edge_feat"] = edge_feat;
    if (g.label) {
      if (std::holds_alternative<long>(*g.label)) {
        j["label"] = std::get<long>(*g.label);
      } else {
        const auto& y = std::get<Eigen::VectorXd>(*g.label);
        json row = json::array();
        for (Index k = 0; k < y.size(); ++k) row.push_back(y(k));
        j["label"] = row;
      }
    }
    out << j.dump() << '\n';
  }
}

namespace {

struct EdgeSetBuilder {
  std::set<std::pair<Index, Index>> undirected;
  void add(Index u, Index v) {
    if (u == v) return;
    undirected.insert(ordered(u, v));
  }
};

void add_motif_edges(EdgeSetBuilder& edges, MotifKind kind,
                     const std::vector<Index>& nodes) {
  const Index k = static_cast<Index>(nodes.size());
  switch (kind) {
    case MotifKind::kNone:
      break;
    case MotifKind::kCycle:
      for (Index i = 0; i < k; ++i)
        edges.add(nodes[static_cast<size_t>(i)],
                  nodes[static_cast<size_t>((i + 1) % k)]);
      break;
    case MotifKind::kClique:
      for (Index i = 0; i < k; ++i)
        for (Index j = i + 1; j < k; ++j)
          edges.add(nodes[static_cast<size_t>(i)], nodes[static_cast<size_t>(j)]);
      break;
    case MotifKind::kStar:
      for (Index i = 1; i < k; ++i)
        edges.add(nodes[0], nodes[static_cast<size_t>(i)]);
      break;
  }
}

RowMatrix build_features(Index n, const std::vector<std::pair<Index, Index>>& edges,
                         FeatureMode mode, Index degree_cap) {
  if (mode == FeatureMode::kConstant) return RowMatrix::Ones(n, 1);
  std::vector<Index> degree(static_cast<size_t>(n), 0);
  for (const auto& [u, v] : edges) degree[static_cast<size_t>(u)] += 1;
  RowMatrix f = RowMatrix::Zero(n, degree_cap + 1);
  for (Index v = 0; v < n; ++v)
    f(v, std::min(degree[static_cast<size_t>(v)], degree_cap)) = 1.0;
  return f;
}

Graph make_er_graph(std::mt19937_64& rng, Index n, double p, MotifKind motif,
                    Index motif_size, FeatureMode mode, Index degree_cap) {
  EdgeSetBuilder edges;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (coin(rng) < p) edges.add(u, v);
  if (motif != MotifKind::kNone) {
    std::vector<Index> nodes(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) nodes[static_cast<size_t>(i)] = i;
    std::shuffle(nodes.begin(), nodes.end(), rng);
    nodes.resize(static_cast<size_t>(motif_size));
    add_motif_edges(edges, motif, nodes);
  }
  Graph g;
  g.num_nodes = n;
  for (const auto& [u, v] : edges.undirected) g.edges.emplace_back(u, v);
  symmetrize_edges(g);
  g.node_feat = build_features(n, g.edges, mode, degree_cap);
  return g;
}

}  // namespace

std::vector<Graph> generate_planted_motif(Index n_graphs, std::uint64_t seed,
                                          const MotifDatasetSpec& spec) {
  if (spec.motif_size > spec.min_nodes)
    throw std::invalid_argument("generate_planted_motif: motif_size " +
                                std::to_string(spec.motif_size) +
                                " exceeds min_nodes " +
                                std::to_string(spec.min_nodes));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> size_dist(spec.min_nodes, spec.max_nodes);
  std::vector<Graph> out;
  out.reserve(static_cast<size_t>(n_graphs));
  for (Index i = 0; i < n_graphs; ++i) {
    const long cls = static_cast<long>(i % 2);
    const Index n = size_dist(rng);
    const MotifKind motif = cls == 1 ? spec.class1_motif : spec.class0_motif;
    Graph g = make_er_graph(rng, n, spec.background_p, motif, spec.motif_size,
                            spec.feature_mode, spec.degree_cap);
    g.label = GraphLabel(cls);
    out.push_back(std::move(g));
  }
  return out;
}

double mean_degree_label(const Graph& g, const RegressionDatasetSpec& spec) {
  const double norm =
      spec.normalizer > 0 ? spec.normalizer
                          : static_cast<double>(spec.max_nodes - 1);
  const double mean_degree =
      static_cast<double>(g.edges.size()) / static_cast<double>(g.num_nodes);
  return mean_degree / norm;
}

std::vector<Graph> generate_regression_degree_target(
    Index n_graphs, std::uint64_t seed, const RegressionDatasetSpec& spec) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> size_dist(spec.min_nodes, spec.max_nodes);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Graph> out;
  out.reserve(static_cast<size_t>(n_graphs));
  for (Index i = 0; i < n_graphs; ++i) {
    const Index n = size_dist(rng);
    Graph g = make_er_graph(rng, n, spec.edge_p, MotifKind::kNone, 0,
                            spec.feature_mode, spec.degree_cap);
    Eigen::VectorXd y(1);
    y(0) = mean_degree_label(g, spec) + spec.noise_sigma * noise(rng);
    g.label = GraphLabel(y);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace adgcl
