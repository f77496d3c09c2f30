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

#include "adgcl/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace adgcl {

namespace {
using nlohmann::json;
constexpr const char* kFormat = "adgcl-checkpoint-v1";

void assign_from(const std::map<std::string, Tensor>& arrays,
                 const NamedTensorRefs& refs, const std::string& path) {
  for (auto& [name, t] : refs) {
    auto it = arrays.find(name);
    if (it == arrays.end())
      throw std::runtime_error(path + ": missing array '" + name + "'");
    if (it->second.shape() != t->shape())
      throw std::runtime_error(path + ": array '" + name + "' has shape " +
                               it->second.shape_str() + ", expected " +
                               t->shape_str());
    *t = it->second;
  }
}

Index layer_count(const std::map<std::string, Tensor>& arrays,
                  const std::string& prefix) {
  Index k = 0;
  while (arrays.count(prefix + ".layer" + std::to_string(k) + ".w1")) ++k;
  if (k == 0)
    throw std::runtime_error("checkpoint: no layers under '" + prefix + "'");
  return k;
}

EncoderParams encoder_from(const std::map<std::string, Tensor>& arrays,
                           const std::string& prefix, const std::string& path) {
  auto input = arrays.find(prefix + ".input.w");
  if (input == arrays.end())
    throw std::runtime_error(path + ": missing array '" + prefix + ".input.w'");
  const Index feature_dim = input->second.rows();
  const Index hidden = input->second.cols();
  const Index layers = layer_count(arrays, prefix);
  const bool has_edge = arrays.count(prefix + ".layer0.edge.w") > 0;
  const Index edge_dim =
      has_edge ? arrays.at(prefix + ".layer0.edge.w").rows() : 0;
  std::mt19937_64 scratch(0);
  EncoderParams p =
      init_encoder_params(feature_dim, hidden, layers, scratch, edge_dim);
  assign_from(arrays, p.named_tensors(prefix), path);
  return p;
}
}  // namespace

void save_checkpoint(const std::string& path, const NamedTensorCRefs& arrays) {
  json doc;
  doc["format"] = kFormat;
  json arr = json::object();
  for (auto& [name, t] : arrays) {
    json entry;
    entry["shape"] = t->shape();
    entry["data"] = t->data();
    arr[name] = std::move(entry);
  }
  doc["arrays"] = std::move(arr);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << doc.dump() << '\n';
}

std::map<std::string, Tensor> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("load_checkpoint: " + path + ": " + e.what());
  }
  if (!doc.contains("format") || doc["format"] != kFormat)
    throw std::runtime_error("load_checkpoint: " + path +
                             " is not an adgcl checkpoint");
  std::map<std::string, Tensor> arrays;
  for (auto& [name, entry] : doc["arrays"].items()) {
    std::vector<Index> shape = entry["shape"].get<std::vector<Index>>();
    std::vector<double> data = entry["data"].get<std::vector<double>>();
    arrays.emplace(name, Tensor(std::move(shape), std::move(data)));
  }
  return arrays;
}

void save_encoder(const std::string& path, const EncoderParams& p) {
  save_checkpoint(path, p.named_tensors());
}

void save_head(const std::string& path, const HeadParams& p) {
  save_checkpoint(path, p.named_tensors());
}

void save_augmenter(const std::string& path, const AugmenterParams& p) {
  save_checkpoint(path, p.named_tensors());
}

EncoderParams load_encoder(const std::string& path) {
  return encoder_from(load_checkpoint(path), "encoder", path);
}

HeadParams load_head(const std::string& path) {
  const auto arrays = load_checkpoint(path);
  auto w1 = arrays.find("head.w1");
  if (w1 == arrays.end())
    throw std::runtime_error(path + ": missing array 'head.w1'");
  std::mt19937_64 scratch(0);
  HeadParams p = init_head_params(w1->second.rows(), scratch);
  assign_from(arrays, p.named_tensors(), path);
  return p;
}

AugmenterParams load_augmenter(const std::string& path) {
  const auto arrays = load_checkpoint(path);
  AugmenterParams p;
  p.gnn = encoder_from(arrays, "augmenter.gnn", path);
  std::mt19937_64 scratch(0);
  AugmenterParams fresh = init_augmenter_params(
      p.gnn.input.w.rows(), p.gnn.hidden_dim, p.gnn.num_layers(), scratch,
      p.gnn.layers[0].edge_embed ? p.gnn.layers[0].edge_embed->w.rows() : 0);
  p.edge_mlp = fresh.edge_mlp;
  NamedTensorRefs edge_refs;
  edge_refs.emplace_back("augmenter.edge.w1", &p.edge_mlp.l1.w);
  edge_refs.emplace_back("augmenter.edge.b1", &p.edge_mlp.l1.b);
  edge_refs.emplace_back("augmenter.edge.w2", &p.edge_mlp.l2.w);
  edge_refs.emplace_back("augmenter.edge.b2", &p.edge_mlp.l2.b);
  assign_from(arrays, edge_refs, path);
  return p;
}

}  // namespace adgcl
