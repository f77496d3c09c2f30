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

// Experiment driver: dataset generation, the three training modes, linear
// probing, the regularization sweep and the method comparison, all driven by
// one JSON config with dotted-path flag overrides.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "adgcl/checkpoint.hpp"
#include "adgcl/comparison.hpp"
#include "adgcl/evaluation.hpp"
#include "adgcl/graph.hpp"
#include "adgcl/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adgcl;

namespace {

json load_config(const std::string& path, const std::vector<std::string>& sets) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json doc;
  in >> doc;
  for (const std::string& kv : sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--set expects key.path=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;  // bare strings are fine unquoted
    }
    json* node = &doc;
    size_t start = 0;
    while (true) {
      const size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  return doc;
}

fs::path resolve_output_dir(const json& cfg) {
  std::string dir = cfg.value("output_dir", "runs/out");
  fs::path p(dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv("ADGCL_OUTPUT_ROOT")) p = fs::path(root) / p;
  }
  fs::create_directories(p);
  return p;
}

MotifDatasetSpec motif_spec_from(const json& g) {
  MotifDatasetSpec spec;
  spec.background_p = g.value("background_p", spec.background_p);
  spec.min_nodes = g.value("min_nodes", spec.min_nodes);
  spec.max_nodes = g.value("max_nodes", spec.max_nodes);
  spec.motif_size = g.value("motif_size", spec.motif_size);
  spec.degree_cap = g.value("degree_cap", spec.degree_cap);
  auto motif_of = [](const std::string& s) {
    if (s == "none") return MotifKind::kNone;
    if (s == "cycle") return MotifKind::kCycle;
    if (s == "clique") return MotifKind::kClique;
    if (s == "star") return MotifKind::kStar;
    throw std::runtime_error("unknown motif '" + s + "'");
  };
  spec.class0_motif = motif_of(g.value("class0_motif", std::string("none")));
  spec.class1_motif = motif_of(g.value("class1_motif", std::string("cycle")));
  const std::string fm = g.value("feature_mode", std::string("constant"));
  if (fm == "constant") spec.feature_mode = FeatureMode::kConstant;
  else if (fm == "degree_onehot") spec.feature_mode = FeatureMode::kDegreeOneHot;
  else throw std::runtime_error("unknown feature_mode '" + fm + "'");
  return spec;
}

RegressionDatasetSpec regression_spec_from(const json& g) {
  RegressionDatasetSpec spec;
  spec.edge_p = g.value("edge_p", spec.edge_p);
  spec.min_nodes = g.value("min_nodes", spec.min_nodes);
  spec.max_nodes = g.value("max_nodes", spec.max_nodes);
  spec.noise_sigma = g.value("noise_sigma", spec.noise_sigma);
  spec.normalizer = g.value("normalizer", spec.normalizer);
  const std::string fm = g.value("feature_mode", std::string("constant"));
  if (fm == "degree_onehot") spec.feature_mode = FeatureMode::kDegreeOneHot;
  spec.degree_cap = g.value("degree_cap", spec.degree_cap);
  return spec;
}

std::vector<Graph> generate_from(const json& g) {
  const std::string kind = g.value("kind", std::string("motif"));
  const Index n = g.value("n", Index{200});
  const std::uint64_t seed = g.value("seed", std::uint64_t{0});
  if (kind == "motif") return generate_planted_motif(n, seed, motif_spec_from(g));
  if (kind == "regression")
    return generate_regression_degree_target(n, seed, regression_spec_from(g));
  throw std::runtime_error("unknown generator kind '" + kind + "'");
}

std::vector<Graph> dataset_from(const json& cfg) {
  if (!cfg.contains("dataset"))
    throw std::runtime_error("config has no 'dataset' section");
  const json& d = cfg["dataset"];
  if (d.contains("path") && !d["path"].get<std::string>().empty()) {
    const std::string path = d["path"].get<std::string>();
    if (!fs::exists(path))
      throw std::runtime_error("dataset path does not exist: " + path);
    return load_jsonl(path);
  }
  if (d.contains("generator")) return generate_from(d["generator"]);
  throw std::runtime_error("dataset needs either a path or a generator");
}

TrainConfig train_config_from(const json& cfg) {
  TrainConfig t;
  if (!cfg.contains("train")) return t;
  const json& j = cfg["train"];
  t.mode = parse_train_mode(j.value("mode", std::string("adgcl")));
  t.lambda_reg = j.value("lambda_reg", t.lambda_reg);
  t.tau = j.value("tau", t.tau);
  t.lr_encoder = j.value("lr_encoder", t.lr_encoder);
  t.lr_augmenter = j.value("lr_augmenter", t.lr_augmenter);
  t.epochs = j.value("epochs", t.epochs);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.hidden_dim = j.value("hidden_dim", t.hidden_dim);
  t.num_layers = j.value("num_layers", t.num_layers);
  t.dropout = j.value("dropout", t.dropout);
  t.seed = j.value("seed", t.seed);
  t.fixed_drop_ratio = j.value("fixed_drop_ratio", t.fixed_drop_ratio);
  t.shared_noise_draw = j.value("shared_noise_draw", t.shared_noise_draw);
  t.validate();
  return t;
}

DatasetSplit split_from(const json& cfg, Index n) {
  double tr = 0.8, va = 0.1, te = 0.1;
  std::uint64_t seed = 1;
  if (cfg.contains("split")) {
    const json& s = cfg["split"];
    tr = s.value("train", tr);
    va = s.value("val", va);
    te = s.value("test", te);
    seed = s.value("seed", seed);
  }
  return split_dataset(n, tr, va, te, seed);
}

std::vector<Graph> subset(const std::vector<Graph>& all,
                          const std::vector<Index>& idx) {
  std::vector<Graph> out;
  out.reserve(idx.size());
  for (Index i : idx) out.push_back(all[static_cast<size_t>(i)]);
  return out;
}

bool dataset_is_classification(const std::vector<Graph>& data) {
  return data.front().has_class_label();
}

// Minimal line chart, two panels: lambda vs drop ratio, lambda vs val metric.
void write_sweep_svg(const std::string& path, const std::vector<SweepRow>& rows) {
  const int w = 460, h = 220, pad = 45;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
      << 2 * h << "'>\n";
  auto panel = [&](int top, auto value_of, const std::string& label) {
    double lo = 1e300, hi = -1e300;
    for (const SweepRow& r : rows) {
      lo = std::min(lo, value_of(r));
      hi = std::max(hi, value_of(r));
    }
    if (hi - lo < 1e-12) { hi += 0.5; lo -= 0.5; }
    const double xlo = std::log10(rows.front().lambda);
    const double xhi = std::log10(rows.back().lambda);
    auto px = [&](double lam) {
      return pad + (std::log10(lam) - xlo) / std::max(1e-12, xhi - xlo) *
                       (w - 2 * pad);
    };
    auto py = [&](double v) {
      return top + h - pad - (v - lo) / (hi - lo) * (h - 2 * pad);
    };
    out << "<rect x='" << pad << "' y='" << top + pad << "' width='" << w - 2 * pad
        << "' height='" << h - 2 * pad << "' fill='none' stroke='black'/>\n";
    out << "<text x='" << pad << "' y='" << top + pad - 8 << "' font-size='12'>"
        << label << " vs lambda (log axis)</text>\n";
    out << "<polyline fill='none' stroke='steelblue' stroke-width='2' points='";
    for (const SweepRow& r : rows) out << px(r.lambda) << "," << py(value_of(r)) << " ";
    out << "'/>\n";
    for (const SweepRow& r : rows)
      out << "<circle cx='" << px(r.lambda) << "' cy='" << py(value_of(r))
          << "' r='3' fill='steelblue'/>\n";
  };
  panel(0, [](const SweepRow& r) { return r.final_drop_ratio; }, "drop ratio");
  panel(h, [](const SweepRow& r) { return r.val_metric; }, "val metric");
  out << "</svg>\n";
}

int cmd_gen_data(const json& cfg, const std::string& out_override) {
  if (!cfg.contains("dataset") || !cfg["dataset"].contains("generator"))
    throw std::runtime_error("gen-data needs dataset.generator in the config");
  const json& gen = cfg["dataset"]["generator"];
  std::string out_path = out_override;
  if (out_path.empty())
    out_path = cfg["dataset"].value("path", std::string());
  if (out_path.empty())
    throw std::runtime_error("gen-data needs dataset.path or --out");
  const auto graphs = generate_from(gen);
  if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  save_jsonl(out_path, graphs);

  json meta;
  meta["generator"] = gen;
  meta["count"] = graphs.size();
  std::map<long, Index> label_counts;
  for (const Graph& g : graphs)
    if (g.has_class_label()) label_counts[g.class_label()] += 1;
  if (!label_counts.empty()) {
    json lc = json::object();
    for (const auto& [k, v] : label_counts) lc[std::to_string(k)] = v;
    meta["label_counts"] = lc;
  }
  std::ofstream meta_out(out_path + ".meta.json", std::ios::binary);
  meta_out << meta.dump(2) << '\n';
  std::cout << "wrote " << graphs.size() << " graphs to " << out_path << "\n";
  return 0;
}

int cmd_train(const json& cfg) {
  const auto dataset = dataset_from(cfg);
  const TrainConfig tc = train_config_from(cfg);
  const DatasetSplit split = split_from(cfg, static_cast<Index>(dataset.size()));
  const fs::path out = resolve_output_dir(cfg);

  const TrainResult res = train(subset(dataset, split.train), tc);
  save_encoder((out / "encoder.ckpt.json").string(), res.encoder);
  save_head((out / "head.ckpt.json").string(), res.head);
  if (res.augmenter)
    save_augmenter((out / "augmenter.ckpt.json").string(), *res.augmenter);
  write_history_csv((out / "history.csv").string(), res.history);
  const EpochRecord& last = res.history.epochs.empty() ? EpochRecord{}
                                                       : res.history.epochs.back();
  std::cout << "mode=" << train_mode_name(tc.mode) << " epochs=" << tc.epochs
            << " final nce=" << last.nce << " drop_ratio=" << last.drop_ratio
            << "\nartifacts in " << out.string() << "\n";
  return 0;
}

int cmd_eval(const json& cfg, const std::string& checkpoint, bool untrained) {
  const auto dataset = dataset_from(cfg);
  const TrainConfig tc = train_config_from(cfg);
  const fs::path out = resolve_output_dir(cfg);

  EncoderParams enc;
  if (untrained) {
    std::mt19937_64 rng(cfg.value("eval", json::object())
                            .value("seed", std::uint64_t{0}));
    const Index edge_dim =
        dataset[0].edge_feat ? dataset[0].edge_feat->cols() : 0;
    enc = init_encoder_params(dataset[0].feature_dim(), tc.hidden_dim,
                              tc.num_layers, rng, edge_dim);
  } else {
    const std::string path =
        checkpoint.empty() ? (out / "encoder.ckpt.json").string() : checkpoint;
    enc = load_encoder(path);
    if (enc.input.w.rows() != dataset[0].feature_dim())
      throw std::runtime_error(
          "checkpoint expects feature dim " + std::to_string(enc.input.w.rows()) +
          " but the dataset has " + std::to_string(dataset[0].feature_dim()));
  }

  const json ev = cfg.value("eval", json::object());
  ProbeOptions opts;
  opts.standardize = ev.value("standardize", false);
  const std::uint64_t seed = ev.value("seed", std::uint64_t{0});
  std::string probe = ev.value("probe", std::string("auto"));
  const bool classification = dataset_is_classification(dataset);
  if (probe == "auto") probe = classification ? "logistic" : "ridge";
  if (probe == "logistic" && !classification)
    throw std::runtime_error("logistic probe requested on a regression dataset");
  if (probe == "ridge" && classification)
    throw std::runtime_error("ridge probe requested on a classification dataset");

  std::vector<ProbeResult> results;
  const RowMatrix X = embed_dataset(enc, dataset);
  std::vector<Index> all(dataset.size());
  std::iota(all.begin(), all.end(), Index{0});
  if (ev.value("ten_fold", false)) {
    if (classification) {
      results = kfold_probe(X, class_labels_of(dataset, all), Eigen::VectorXd{},
                            ProbeKind::kLogistic, ev.value("folds", 10), seed, opts);
    } else {
      results = kfold_probe(X, {}, targets_of(dataset, all), ProbeKind::kRidge,
                            ev.value("folds", 10), seed, opts);
    }
  } else {
    const DatasetSplit split = split_from(cfg, static_cast<Index>(dataset.size()));
    if (classification) {
      results.push_back(logistic_probe(
          rows_of(X, split.train), class_labels_of(dataset, split.train),
          rows_of(X, split.val), class_labels_of(dataset, split.val),
          rows_of(X, split.test), class_labels_of(dataset, split.test), opts));
    } else {
      results.push_back(ridge_probe(
          rows_of(X, split.train), targets_of(dataset, split.train),
          rows_of(X, split.val), targets_of(dataset, split.val),
          rows_of(X, split.test), targets_of(dataset, split.test), opts));
    }
  }
  write_metrics_csv((out / "metrics.csv").string(), results, seed);
  for (const ProbeResult& r : results)
    std::cout << r.metric_name << " test=" << r.test_metric
              << " (val=" << r.val_metric << ", l2=" << r.best_l2 << ")\n";
  if (results.size() > 1) {
    double mean = 0.0;
    for (const ProbeResult& r : results) mean += r.test_metric;
    mean /= static_cast<double>(results.size());
    double var = 0.0;
    for (const ProbeResult& r : results)
      var += (r.test_metric - mean) * (r.test_metric - mean);
    std::cout << results[0].metric_name << " over " << results.size()
              << " folds: " << mean << " +/- "
              << std::sqrt(var / static_cast<double>(results.size())) << "\n";
  }
  std::cout << "metrics in " << (out / "metrics.csv").string() << "\n";
  return 0;
}

int cmd_sweep(const json& cfg, bool plot_flag) {
  const auto dataset = dataset_from(cfg);
  TrainConfig tc = train_config_from(cfg);
  tc.mode = TrainMode::kAdGcl;
  const DatasetSplit split = split_from(cfg, static_cast<Index>(dataset.size()));
  const fs::path out = resolve_output_dir(cfg);

  std::vector<double> lambdas{0.1, 0.3, 0.5, 1.0, 2.0, 5.0, 10.0};
  bool plot = plot_flag;
  if (cfg.contains("sweep")) {
    const json& s = cfg["sweep"];
    if (s.contains("lambdas")) lambdas = s["lambdas"].get<std::vector<double>>();
    plot = plot || s.value("plot", false);
  }
  if (lambdas.empty()) throw std::runtime_error("sweep needs a non-empty lambda list");
  std::vector<double> unique;
  for (double l : lambdas) {
    if (std::find(unique.begin(), unique.end(), l) == unique.end())
      unique.push_back(l);
    else
      std::cerr << "warning: duplicate lambda " << l << " dropped\n";
  }

  const auto rows = sweep_lambda(dataset, split, unique, tc);
  write_sweep_csv((out / "sweep.csv").string(), rows);
  if (plot && rows.size() > 1) {
    std::vector<SweepRow> sorted = rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.lambda < b.lambda; });
    write_sweep_svg((out / "sweep.svg").string(), sorted);
  }
  for (const SweepRow& r : rows)
    std::cout << "lambda=" << r.lambda << " drop_ratio=" << r.final_drop_ratio
              << " val=" << r.val_metric << "\n";
  std::cout << "sweep table in " << (out / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_compare(const json& cfg) {
  const auto dataset = dataset_from(cfg);
  const TrainConfig tc = train_config_from(cfg);
  const fs::path out = resolve_output_dir(cfg);

  std::vector<std::string> method_names{"adgcl-fix", "ru"};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  if (cfg.contains("compare")) {
    const json& c = cfg["compare"];
    if (c.contains("methods"))
      method_names = c["methods"].get<std::vector<std::string>>();
    if (c.contains("seeds")) seeds = c["seeds"].get<std::vector<std::uint64_t>>();
  }
  std::vector<MethodSpec> methods;
  for (const std::string& m : method_names) methods.push_back(parse_method(m));

  const ComparisonReport report = run_comparison(dataset, methods, seeds, tc);
  write_report_csv((out / "report.csv").string(), report);
  write_report_text((out / "report.txt").string(), report);
  std::ifstream txt(out / "report.txt");
  std::cout << txt.rdbuf();
  return 0;
}

int cmd_export_embeddings(const json& cfg, const std::string& checkpoint,
                          const std::string& out_override) {
  const auto dataset = dataset_from(cfg);
  const fs::path out_dir = resolve_output_dir(cfg);
  const std::string ckpt =
      checkpoint.empty() ? (out_dir / "encoder.ckpt.json").string() : checkpoint;
  const EncoderParams enc = load_encoder(ckpt);
  const RowMatrix X = embed_dataset(enc, dataset);
  const std::string out_path =
      out_override.empty() ? (out_dir / "embeddings.csv").string() : out_override;
  std::ofstream outf(out_path, std::ios::binary);
  if (!outf) throw std::runtime_error("cannot open " + out_path);
  outf << "graph,label";
  for (Index j = 0; j < X.cols(); ++j) outf << ",e" << j;
  outf << "\n";
  char buf[40];
  for (Index i = 0; i < X.rows(); ++i) {
    outf << i << ",";
    const Graph& g = dataset[static_cast<size_t>(i)];
    if (g.has_class_label()) outf << g.class_label();
    else if (g.label) outf << std::get<Eigen::VectorXd>(*g.label)(0);
    for (Index j = 0; j < X.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", X(i, j));
      outf << "," << buf;
    }
    outf << "\n";
  }
  std::cout << "wrote " << X.rows() << " embeddings to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph contrastive learning lab with a learnable edge-dropping "
               "augmenter"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand name

  std::string config_path;
  std::vector<std::string> sets;
  app.add_option("-c,--config", config_path, "JSON config file")
      ->required();
  app.add_option("--set", sets,
                 "override a config field by dotted path, e.g. "
                 "--set train.lambda_reg=2.0");

  std::string out_override, checkpoint;
  bool untrained = false, plot = false;

  CLI::App* gen = app.add_subcommand("gen-data", "write a synthetic dataset");
  gen->add_option("--out", out_override, "output JSONL path");

  app.add_subcommand("train", "train per the config's train section");

  CLI::App* ev = app.add_subcommand("eval", "linear-probe a frozen encoder");
  ev->add_option("--checkpoint", checkpoint, "encoder checkpoint path");
  ev->add_flag("--untrained", untrained,
               "evaluate a freshly initialized encoder instead");

  CLI::App* sw = app.add_subcommand("sweep", "regularization-weight sweep");
  sw->add_flag("--plot", plot, "also write an SVG line chart");

  app.add_subcommand("compare", "train and probe several methods on shared splits");

  CLI::App* ex = app.add_subcommand("export-embeddings",
                                    "write per-graph embeddings as CSV");
  ex->add_option("--checkpoint", checkpoint, "encoder checkpoint path");
  ex->add_option("--out", out_override, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config(config_path, sets);
    if (gen->parsed()) return cmd_gen_data(cfg, out_override);
    if (app.get_subcommand("train")->parsed()) return cmd_train(cfg);
    if (ev->parsed()) return cmd_eval(cfg, checkpoint, untrained);
    if (sw->parsed()) return cmd_sweep(cfg, plot);
    if (app.get_subcommand("compare")->parsed()) return cmd_compare(cfg);
    if (ex->parsed()) return cmd_export_embeddings(cfg, checkpoint, out_override);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
