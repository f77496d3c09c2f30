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

#include "adgcl/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace adgcl {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct SplitData {
  DatasetSplit split;
  std::vector<Graph> train, val, test;
  std::uint64_t digest = 0;
};

SplitData make_split(const std::vector<Graph>& dataset, std::uint64_t seed) {
  SplitData s;
  s.split = split_dataset(static_cast<Index>(dataset.size()), 0.8, 0.1, 0.1,
                          splitmix64(seed ^ 0xA5A5));
  for (Index i : s.split.train) s.train.push_back(dataset[static_cast<size_t>(i)]);
  for (Index i : s.split.val) s.val.push_back(dataset[static_cast<size_t>(i)]);
  for (Index i : s.split.test) s.test.push_back(dataset[static_cast<size_t>(i)]);
  std::vector<Index> all;
  all.insert(all.end(), s.split.train.begin(), s.split.train.end());
  all.push_back(-1);
  all.insert(all.end(), s.split.val.begin(), s.split.val.end());
  all.push_back(-1);
  all.insert(all.end(), s.split.test.begin(), s.split.test.end());
  s.digest = fnv1a64(all.data(), all.size() * sizeof(Index));
  return s;
}

bool is_classification(const std::vector<Graph>& dataset) {
  return dataset.front().has_class_label();
}

struct ProbeScore {
  double val = 0.0;
  double test = 0.0;
};

// Linear probe of a frozen encoder on one split. Selection stays on the
// validation metric; the test metric rides along for final reporting.
ProbeScore probe_encoder(const EncoderParams& enc, const SplitData& s,
                         bool classification) {
  const RowMatrix xt = embed_dataset(enc, s.train);
  const RowMatrix xv = embed_dataset(enc, s.val);
  const RowMatrix xe = embed_dataset(enc, s.test);
  std::vector<Index> it(s.train.size()), iv(s.val.size()), ie(s.test.size());
  std::iota(it.begin(), it.end(), Index{0});
  std::iota(iv.begin(), iv.end(), Index{0});
  std::iota(ie.begin(), ie.end(), Index{0});
  if (classification) {
    const ProbeResult r = logistic_probe(
        xt, class_labels_of(s.train, it), xv, class_labels_of(s.val, iv), xe,
        class_labels_of(s.test, ie));
    return {r.val_metric, r.test_metric};
  }
  const ProbeResult r =
      ridge_probe(xt, targets_of(s.train, it), xv, targets_of(s.val, iv), xe,
                  targets_of(s.test, ie));
  return {r.val_metric, r.test_metric};
}

TrainConfig config_for(const TrainConfig& base, TrainMode mode,
                       std::uint64_t seed) {
  TrainConfig cfg = base;
  cfg.mode = mode;
  cfg.seed = seed;
  return cfg;
}

EncoderParams untrained_encoder(const std::vector<Graph>& dataset,
                                const TrainConfig& base, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed ^ 0x1111));
  const Index edge_dim =
      dataset[0].edge_feat ? dataset[0].edge_feat->cols() : 0;
  return init_encoder_params(dataset[0].feature_dim(), base.hidden_dim,
                             base.num_layers, rng, edge_dim);
}

// Returns (test metric, chosen hyperparameter or NaN).
std::pair<double, double> evaluate_method(const MethodSpec& m,
                                          const std::vector<Graph>& dataset,
                                          const SplitData& s,
                                          const TrainConfig& base,
                                          std::uint64_t seed,
                                          bool classification) {
  const double nan = std::nan("");
  const bool higher_better = classification;
  switch (m.kind) {
    case MethodKind::kRu: {
      const EncoderParams enc = untrained_encoder(dataset, base, seed);
      return {probe_encoder(enc, s, classification).test, nan};
    }
    case MethodKind::kInfoMax: {
      const TrainResult r =
          train_infomax(s.train, config_for(base, TrainMode::kInfoMax, seed));
      return {probe_encoder(r.encoder, s, classification).test, nan};
    }
    case MethodKind::kAdGclFix: {
      TrainConfig cfg = config_for(base, TrainMode::kAdGcl, seed);
      cfg.lambda_reg = m.lambda;
      const TrainResult r = train_adgcl(s.train, cfg);
      return {probe_encoder(r.encoder, s, classification).test, nan};
    }
    case MethodKind::kNadGclFix: {
      TrainConfig cfg = config_for(base, TrainMode::kNadGcl, seed);
      cfg.fixed_drop_ratio = m.drop_ratio;
      const TrainResult r = train_nadgcl(s.train, cfg);
      return {probe_encoder(r.encoder, s, classification).test, nan};
    }
    case MethodKind::kAdGclOpt: {
      double best_val = higher_better ? -1e300 : 1e300;
      double best_test = nan, chosen = nan;
      for (double lambda : kLambdaGrid) {
        TrainConfig cfg = config_for(base, TrainMode::kAdGcl,
                                     mix_seed(seed, lambda));
        cfg.lambda_reg = lambda;
        const TrainResult r = train_adgcl(s.train, cfg);
        const ProbeScore sc = probe_encoder(r.encoder, s, classification);
        const bool better = higher_better ? sc.val > best_val : sc.val < best_val;
        if (better) {
          best_val = sc.val;
          best_test = sc.test;
          chosen = lambda;
        }
      }
      return {best_test, chosen};
    }
    case MethodKind::kNadGclOpt: {
      double best_val = higher_better ? -1e300 : 1e300;
      double best_test = nan, chosen = nan;
      for (double ratio : kDropRatioGrid) {
        TrainConfig cfg = config_for(base, TrainMode::kNadGcl,
                                     mix_seed(seed, ratio));
        cfg.fixed_drop_ratio = ratio;
        const TrainResult r = train_nadgcl(s.train, cfg);
        const ProbeScore sc = probe_encoder(r.encoder, s, classification);
        const bool better = higher_better ? sc.val > best_val : sc.val < best_val;
        if (better) {
          best_val = sc.val;
          best_test = sc.test;
          chosen = ratio;
        }
      }
      return {best_test, chosen};
    }
  }
  throw std::logic_error("evaluate_method: bad kind");
}

}  // namespace

std::string MethodSpec::display_name() const {
  std::ostringstream os;
  switch (kind) {
    case MethodKind::kAdGclFix: os << "adgcl-fix(lambda=" << lambda << ")"; break;
    case MethodKind::kAdGclOpt: os << "adgcl-opt"; break;
    case MethodKind::kNadGclFix: os << "nadgcl-fix(r=" << drop_ratio << ")"; break;
    case MethodKind::kNadGclOpt: os << "nadgcl-opt"; break;
    case MethodKind::kRu: os << "ru"; break;
    case MethodKind::kInfoMax: os << "infomax"; break;
  }
  return os.str();
}

MethodSpec parse_method(const std::string& name) {
  MethodSpec m;
  const size_t colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? "" : name.substr(colon + 1);
  if (head == "adgcl-fix") {
    m.kind = MethodKind::kAdGclFix;
    if (!arg.empty()) m.lambda = std::stod(arg);
  } else if (head == "adgcl-opt") {
    m.kind = MethodKind::kAdGclOpt;
  } else if (head == "nadgcl-fix") {
    m.kind = MethodKind::kNadGclFix;
    if (!arg.empty()) m.drop_ratio = std::stod(arg);
  } else if (head == "nadgcl-opt") {
    m.kind = MethodKind::kNadGclOpt;
  } else if (head == "ru") {
    m.kind = MethodKind::kRu;
  } else if (head == "infomax") {
    m.kind = MethodKind::kInfoMax;
  } else {
    throw std::invalid_argument("unknown method '" + name + "'");
  }
  return m;
}

ComparisonReport run_comparison(const std::vector<Graph>& dataset,
                                const std::vector<MethodSpec>& methods,
                                const std::vector<std::uint64_t>& seeds,
                                const TrainConfig& base) {
  if (methods.empty() || seeds.empty())
    throw std::invalid_argument("run_comparison: methods and seeds required");
  const bool classification = is_classification(dataset);

  ComparisonReport report;
  report.seeds = seeds;

  std::vector<SplitData> splits;
  for (std::uint64_t seed : seeds) {
    splits.push_back(make_split(dataset, seed));
    report.split_digests.push_back(splits.back().digest);
  }
  {
    std::ostringstream os;
    os << dataset.size() << ":" << dataset[0].feature_dim();
    for (const Graph& g : dataset) os << "," << g.num_nodes << "/" << g.edges.size();
    const std::string sig = os.str();
    report.dataset_digest =
        std::to_string(fnv1a64(sig.data(), sig.size()));
  }
  {
    std::ostringstream os;
    os << base.hidden_dim << "," << base.num_layers << "," << base.epochs << ","
       << base.batch_size << "," << base.lr_encoder << "," << base.lambda_reg
       << "," << base.tau << "," << base.dropout;
    const std::string sig = os.str();
    report.config_digest = std::to_string(fnv1a64(sig.data(), sig.size()));
  }

  for (const MethodSpec& m : methods) {
    MethodResult res;
    res.name = m.display_name();
    res.metric_name = classification ? "accuracy" : "rmse";
    for (size_t k = 0; k < seeds.size(); ++k) {
      const auto [test, chosen] = evaluate_method(m, dataset, splits[k], base,
                                                  seeds[k], classification);
      res.per_seed.push_back(test);
      if (!std::isnan(chosen)) res.chosen.push_back(chosen);
    }
    const double n = static_cast<double>(res.per_seed.size());
    res.mean = std::accumulate(res.per_seed.begin(), res.per_seed.end(), 0.0) / n;
    double var = 0.0;
    for (double v : res.per_seed) var += (v - res.mean) * (v - res.mean);
    res.stdev = std::sqrt(var / n);
    report.methods.push_back(std::move(res));
  }

  std::stable_sort(report.methods.begin(), report.methods.end(),
                   [&](const MethodResult& a, const MethodResult& b) {
                     return classification ? a.mean > b.mean : a.mean < b.mean;
                   });
  return report;
}

void write_report_csv(const std::string& path, const ComparisonReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_report_csv: cannot open " + path);
  out << "rank,method,metric,mean,std,seeds,dataset_digest,config_digest\n";
  for (size_t r = 0; r < report.methods.size(); ++r) {
    const MethodResult& m = report.methods[r];
    out << (r + 1) << "," << m.name << "," << m.metric_name << ","
        << fmt(m.mean) << "," << fmt(m.stdev) << "," << report.seeds.size()
        << "," << report.dataset_digest << "," << report.config_digest << "\n";
  }
}

void write_report_text(const std::string& path, const ComparisonReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_report_text: cannot open " + path);
  out << "method comparison over " << report.seeds.size()
      << " seeds (shared splits)\n";
  out << "dataset digest: " << report.dataset_digest
      << "  config digest: " << report.config_digest << "\n\n";
  size_t width = 10;
  for (const MethodResult& m : report.methods)
    width = std::max(width, m.name.size());
  for (size_t r = 0; r < report.methods.size(); ++r) {
    const MethodResult& m = report.methods[r];
    out << (r + 1) << ". " << m.name
        << std::string(width - m.name.size() + 2, ' ') << m.metric_name << " "
        << fmt(m.mean) << " +/- " << fmt(m.stdev);
    if (!m.chosen.empty()) {
      out << "  (chosen:";
      for (double c : m.chosen) out << " " << fmt(c);
      out << ")";
    }
    out << "\n";
  }
}

std::uint64_t fnv1a64(const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace adgcl
