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

#include "adgcl/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "adgcl/evaluation.hpp"

namespace adgcl {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Adam states keyed by parameter name.
class Optimizer {
 public:
  explicit Optimizer(double lr) : lr_(lr) {}

  void step(const NamedTensorRefs& params, const NamedTensorRefs& leaves,
            const Tape& tape) {
    for (size_t i = 0; i < params.size(); ++i) {
      AdamState& st = states_[params[i].first];
      st.lr = lr_;
      adam_update(st, *params[i].second, tape.grad(*leaves[i].second),
                  StepDirection::kDescent);
    }
  }

 private:
  double lr_;
  std::map<std::string, AdamState> states_;
};

struct BatchView {
  GraphBatch batch;
  Tensor anchor_keep;  // exactly one on every directed edge
};

BatchView build_batch(const std::vector<Graph>& dataset,
                      const std::vector<Index>& order, size_t start, size_t end) {
  std::vector<Graph> graphs;
  graphs.reserve(end - start);
  for (size_t i = start; i < end; ++i)
    graphs.push_back(dataset[static_cast<size_t>(order[i])]);
  BatchView v{make_batch(graphs), {}};
  v.anchor_keep = Tensor::ones({v.batch.num_edges(), 1});
  return v;
}

struct EpochAccumulator {
  double nce = 0.0, reg = 0.0, drop = 0.0;
  Index steps = 0;
  void add(double n, double r, double d) {
    nce += n;
    reg += r;
    drop += d;
    steps += 1;
  }
  EpochRecord finish(int epoch, double seconds) const {
    EpochRecord rec;
    rec.epoch = epoch;
    const double k = std::max<double>(1.0, static_cast<double>(steps));
    rec.nce = nce / k;
    rec.reg = reg / k;
    rec.drop_ratio = drop / k;
    rec.seconds = seconds;
    return rec;
  }
};

void abort_on_nonfinite(const Tensor& loss, int epoch, size_t batch_idx) {
  if (!loss.all_finite())
    throw std::runtime_error("training aborted: non-finite loss at epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(batch_idx));
}

struct TrainerState {
  EncoderParams encoder;
  HeadParams head;
  AugmenterParams augmenter;  // unused outside adgcl
  Optimizer opt_encoder, opt_augmenter;
  std::mt19937_64 rng_shuffle, rng_noise, rng_dropout;

  TrainerState(const std::vector<Graph>& dataset, const TrainConfig& cfg,
               bool with_augmenter)
      : opt_encoder(cfg.lr_encoder), opt_augmenter(cfg.lr_augmenter) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    cfg.validate();
    const Index feat_dim = dataset[0].feature_dim();
    const Index edge_dim =
        dataset[0].edge_feat ? dataset[0].edge_feat->cols() : 0;
    std::mt19937_64 rng_init(splitmix64(cfg.seed ^ 0x1111));
    encoder = init_encoder_params(feat_dim, cfg.hidden_dim, cfg.num_layers,
                                  rng_init, edge_dim);
    head = init_head_params(cfg.hidden_dim, rng_init);
    if (with_augmenter)
      augmenter = init_augmenter_params(feat_dim, cfg.hidden_dim,
                                        cfg.num_layers, rng_init, edge_dim);
    rng_shuffle.seed(splitmix64(cfg.seed ^ 0x2222));
    rng_noise.seed(splitmix64(cfg.seed ^ 0x3333));
    rng_dropout.seed(splitmix64(cfg.seed ^ 0x4444));
  }
};

enum class ViewKind { kRelaxed, kHard, kIdentity };

// One encoder/head descent step against the given augmented-view keep
// weights. Returns the estimate value.
double encoder_step(TrainerState& st, const TrainConfig& cfg, const BatchView& v,
                    const Tensor& view_keep, int epoch, size_t batch_idx) {
  for (double w : v.anchor_keep.data())
    if (w != 1.0) throw std::logic_error("anchor view must use keep weights 1");
  Tape tape;
  EncoderParams enc = watch(tape, st.encoder);
  HeadParams head = watch(tape, st.head);
  ForwardOptions fwd{cfg.dropout, &st.rng_dropout};
  const Tensor z1 = project(encode(v.batch, enc, v.anchor_keep, fwd), head);
  const Tensor z2 = project(encode(v.batch, enc, view_keep, fwd), head);
  const Tensor nce = info_nce({z1, z2});
  const LossBundle losses = assemble_losses(nce, Tensor::scalar(0.0), 0.0);
  abort_on_nonfinite(losses.encoder_loss, epoch, batch_idx);
  tape.backward(losses.encoder_loss);
  NamedTensorRefs params = st.encoder.named_tensors();
  NamedTensorRefs leaves = enc.named_tensors();
  const NamedTensorRefs hp = st.head.named_tensors();
  const NamedTensorRefs hl = head.named_tensors();
  params.insert(params.end(), hp.begin(), hp.end());
  leaves.insert(leaves.end(), hl.begin(), hl.end());
  st.opt_encoder.step(params, leaves, tape);
  return nce.scalar_value();
}

// Augmenter step on a fresh tape: descends nce + lambda * drop_ratio, the
// descent form of the ascent on (nce_loss - lambda * drop_ratio). Encoder and
// head stay untracked, so their bits cannot move. Returns (nce, reg).
std::pair<double, double> augmenter_step(TrainerState& st, const TrainConfig& cfg,
                                         const BatchView& v, const Tensor& delta,
                                         int epoch, size_t batch_idx) {
  Tape tape;
  AugmenterParams aug = watch(tape, st.augmenter);
  const Tensor omega = augmenter_logits(v.batch, aug);
  const Tensor p = gumbel_relax(omega, cfg.tau, delta);
  const Tensor keep = relaxed_keep_weights(p, v.batch);
  ForwardOptions fwd{cfg.dropout, &st.rng_dropout};
  const Tensor z1 = project(encode(v.batch, st.encoder, v.anchor_keep, fwd), st.head);
  const Tensor z2 = project(encode(v.batch, st.encoder, keep, fwd), st.head);
  const Tensor nce = info_nce({z1, z2});
  const Tensor reg = expected_drop_ratio(p, v.batch);
  const LossBundle losses = assemble_losses(nce, reg, cfg.lambda_reg);
  abort_on_nonfinite(losses.augmenter_loss, epoch, batch_idx);
  tape.backward(losses.augmenter_loss);
  st.opt_augmenter.step(st.augmenter.named_tensors(), aug.named_tensors(), tape);
  return {nce.scalar_value(), reg.scalar_value()};
}

TrainResult run_training(const std::vector<Graph>& dataset,
                         const TrainConfig& cfg, ViewKind view_kind,
                         const StepObserver& observer) {
  const bool adversarial = view_kind == ViewKind::kRelaxed;
  TrainerState st(dataset, cfg, adversarial);

  std::vector<Index> order(dataset.size());
  std::iota(order.begin(), order.end(), Index{0});

  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), st.rng_shuffle);
    EpochAccumulator acc;
    for (size_t start = 0, batch_idx = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch_size), ++batch_idx) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      if (end - start < 2) continue;  // the estimator needs negatives
      const BatchView v = build_batch(dataset, order, start, end);

      Tensor view_keep;
      Tensor encoder_delta;
      double measured_drop = 0.0;
      switch (view_kind) {
        case ViewKind::kRelaxed: {
          encoder_delta = draw_edge_noise(v.batch.num_undirected(), st.rng_noise);
          const Tensor omega = augmenter_logits(v.batch, st.augmenter);
          const Tensor p = gumbel_relax(omega, cfg.tau, encoder_delta);
          view_keep = relaxed_keep_weights(p, v.batch);
          measured_drop = drop_ratio_stats(p, v.batch).batch_mean;
          break;
        }
        case ViewKind::kHard: {
          std::uniform_real_distribution<double> u(0.0, 1.0);
          std::vector<std::uint8_t> dropped(
              static_cast<size_t>(v.batch.num_undirected()));
          Index total_dropped = 0;
          for (auto& d : dropped) {
            d = u(st.rng_noise) < cfg.fixed_drop_ratio ? 1 : 0;
            total_dropped += d;
          }
          view_keep = hard_keep_weights(dropped, v.batch);
          measured_drop =
              v.batch.num_undirected() == 0
                  ? 0.0
                  : static_cast<double>(total_dropped) /
                        static_cast<double>(v.batch.num_undirected());
          break;
        }
        case ViewKind::kIdentity:
          view_keep = v.anchor_keep;
          break;
      }

      const double nce =
          encoder_step(st, cfg, v, view_keep, epoch, batch_idx);
      if (observer)
        observer(TrainPhase::kAfterEncoderStep, st.encoder, st.head,
                 adversarial ? &st.augmenter : nullptr);

      double reg = 0.0;
      if (adversarial) {
        const Tensor delta =
            cfg.shared_noise_draw
                ? encoder_delta
                : draw_edge_noise(v.batch.num_undirected(), st.rng_noise);
        reg = augmenter_step(st, cfg, v, delta, epoch, batch_idx).second;
        if (observer)
          observer(TrainPhase::kAfterAugmenterStep, st.encoder, st.head,
                   &st.augmenter);
      }
      acc.add(nce, reg, measured_drop);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.history.epochs.push_back(acc.finish(epoch, seconds));
  }
  result.encoder = std::move(st.encoder);
  result.head = std::move(st.head);
  if (adversarial) result.augmenter = std::move(st.augmenter);
  return result;
}

}  // namespace

TrainMode parse_train_mode(const std::string& name) {
  if (name == "adgcl") return TrainMode::kAdGcl;
  if (name == "nadgcl") return TrainMode::kNadGcl;
  if (name == "infomax") return TrainMode::kInfoMax;
  throw std::invalid_argument("unknown training mode '" + name +
                              "' (expected adgcl, nadgcl or infomax)");
}

std::string train_mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::kAdGcl: return "adgcl";
    case TrainMode::kNadGcl: return "nadgcl";
    case TrainMode::kInfoMax: return "infomax";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (lambda_reg < 0) throw std::invalid_argument("config: lambda_reg < 0");
  if (tau <= 0) throw std::invalid_argument("config: tau <= 0");
  if (lr_encoder <= 0 || lr_augmenter <= 0)
    throw std::invalid_argument("config: learning rates must be positive");
  if (epochs < 0) throw std::invalid_argument("config: epochs < 0");
  if (batch_size < 2) throw std::invalid_argument("config: batch_size < 2");
  if (hidden_dim < 1 || num_layers < 1)
    throw std::invalid_argument("config: encoder dims must be positive");
  if (dropout < 0 || dropout >= 1)
    throw std::invalid_argument("config: dropout must be in [0,1)");
  if (mode == TrainMode::kNadGcl &&
      (fixed_drop_ratio < 0 || fixed_drop_ratio >= 1))
    throw std::invalid_argument("config: fixed_drop_ratio must be in [0,1)");
}

TrainResult train_adgcl(const std::vector<Graph>& dataset,
                        const TrainConfig& config, const StepObserver& observer) {
  if (config.mode != TrainMode::kAdGcl)
    throw std::invalid_argument("train_adgcl: config.mode is not adgcl");
  return run_training(dataset, config, ViewKind::kRelaxed, observer);
}

TrainResult train_nadgcl(const std::vector<Graph>& dataset,
                         const TrainConfig& config, const StepObserver& observer) {
  if (config.mode != TrainMode::kNadGcl)
    throw std::invalid_argument("train_nadgcl: config.mode is not nadgcl");
  return run_training(dataset, config, ViewKind::kHard, observer);
}

TrainResult train_infomax(const std::vector<Graph>& dataset,
                          const TrainConfig& config, const StepObserver& observer) {
  if (config.mode != TrainMode::kInfoMax)
    throw std::invalid_argument("train_infomax: config.mode is not infomax");
  return run_training(dataset, config, ViewKind::kIdentity, observer);
}

TrainResult train(const std::vector<Graph>& dataset, const TrainConfig& config,
                  const StepObserver& observer) {
  switch (config.mode) {
    case TrainMode::kAdGcl: return train_adgcl(dataset, config, observer);
    case TrainMode::kNadGcl: return train_nadgcl(dataset, config, observer);
    case TrainMode::kInfoMax: return train_infomax(dataset, config, observer);
  }
  throw std::logic_error("train: bad mode");
}

std::uint64_t mix_seed(std::uint64_t seed, double lambda) {
  std::uint64_t bits = 0;
  static_assert(sizeof(bits) == sizeof(lambda));
  std::memcpy(&bits, &lambda, sizeof(bits));
  return splitmix64(seed ^ splitmix64(bits));
}

std::vector<SweepRow> sweep_lambda(const std::vector<Graph>& dataset,
                                   const DatasetSplit& split,
                                   const std::vector<double>& lambdas,
                                   const TrainConfig& base) {
  if (lambdas.empty()) throw std::invalid_argument("sweep_lambda: empty grid");
  std::vector<Graph> train_set;
  for (Index i : split.train) train_set.push_back(dataset[static_cast<size_t>(i)]);

  const bool classification =
      dataset[static_cast<size_t>(split.train[0])].has_class_label();

  // One derived seed shared by every run: the grid points then differ only
  // through lambda's pull on the same trajectory, which keeps the converged
  // ratios comparable across the transition region.
  const std::uint64_t run_seed = splitmix64(base.seed ^ 0x5EEDULL);
  std::vector<SweepRow> rows;
  for (double lambda : lambdas) {
    TrainConfig cfg = base;
    cfg.mode = TrainMode::kAdGcl;
    cfg.lambda_reg = lambda;
    cfg.seed = run_seed;
    const TrainResult res = train_adgcl(train_set, cfg);

    SweepRow row;
    row.lambda = lambda;
    row.epochs = cfg.epochs;
    row.seed = cfg.seed;
    row.final_drop_ratio =
        res.history.epochs.empty() ? 0.0 : res.history.epochs.back().drop_ratio;

    const RowMatrix x_train = embed_dataset(res.encoder, train_set);
    std::vector<Graph> val_set;
    for (Index i : split.val) val_set.push_back(dataset[static_cast<size_t>(i)]);
    const RowMatrix x_val = embed_dataset(res.encoder, val_set);
    std::vector<Index> all_train(split.train.size());
    std::iota(all_train.begin(), all_train.end(), Index{0});
    std::vector<Index> all_val(split.val.size());
    std::iota(all_val.begin(), all_val.end(), Index{0});
    if (classification) {
      const ProbeResult pr = logistic_probe(
          x_train, class_labels_of(train_set, all_train), x_val,
          class_labels_of(val_set, all_val), x_val,
          class_labels_of(val_set, all_val));
      row.val_metric = pr.val_metric;
    } else {
      const ProbeResult pr =
          ridge_probe(x_train, targets_of(train_set, all_train), x_val,
                      targets_of(val_set, all_val), x_val,
                      targets_of(val_set, all_val));
      row.val_metric = pr.val_metric;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_history_csv(const std::string& path, const TrainHistory& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_history_csv: cannot open " + path);
  out << "epoch,nce,reg,drop_ratio,seconds\n";
  for (const EpochRecord& r : history.epochs)
    out << r.epoch << "," << fmt(r.nce) << "," << fmt(r.reg) << ","
        << fmt(r.drop_ratio) << "," << fmt(r.seconds) << "\n";
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path);
  out << "lambda,final_drop_ratio,val_metric,epochs,seed\n";
  for (const SweepRow& r : rows)
    out << fmt(r.lambda) << "," << fmt(r.final_drop_ratio) << ","
        << fmt(r.val_metric) << "," << r.epochs << "," << r.seed << "\n";
}

}  // namespace adgcl
