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

#include "adgcl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

namespace adgcl {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const RowMatrix& X) {
    Standardizer s;
    s.mean = X.colwise().mean();
    Eigen::RowVectorXd var =
        ((X.rowwise() - s.mean).array().square().colwise().sum() /
         std::max<double>(1.0, static_cast<double>(X.rows())))
            .matrix();
    s.scale = var.array().sqrt().max(1e-12).matrix();
    return s;
  }
  RowMatrix apply(const RowMatrix& X) const {
    return ((X.rowwise() - mean).array().rowwise() / scale.array()).matrix();
  }
};

double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& y) {
  return std::sqrt((pred - y).squaredNorm() / static_cast<double>(y.size()));
}

double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& y) {
  return (pred - y).cwiseAbs().mean();
}

Eigen::VectorXd ridge_predict(const RowMatrix& X, const Eigen::VectorXd& w,
                              bool fit_bias) {
  if (fit_bias)
    return X * w.head(w.size() - 1) +
           Eigen::VectorXd::Constant(X.rows(), w(w.size() - 1));
  return X * w;
}

// One binary logistic fit on the tensor core. Labels in {0,1}; returns the
// trained (w, b). Loss = sum_i softplus(s_i) - y_i s_i + l2/2 |w|^2, softplus
// built as a row-wise logsumexp over [s, 0].
std::pair<Tensor, Tensor> fit_logistic_binary(const RowMatrix& X,
                                              const std::vector<long>& y,
                                              double l2) {
  const Index n = X.rows(), d = X.cols();
  Tensor w_val = Tensor::zeros({d, 1});
  Tensor b_val = Tensor::zeros({1, 1});
  const Tensor x = Tensor::from_matrix(X);
  Tensor ycol = Tensor::zeros({n, 1});
  for (Index i = 0; i < n; ++i)
    ycol.data()[static_cast<size_t>(i)] = static_cast<double>(y[static_cast<size_t>(i)]);

  auto loss_of = [&](const Tensor& w, const Tensor& b) {
    const Tensor s = add_rowvec(matmul(x, w), b);
    const Tensor sp = logsumexp_rows(concat(s, Tensor::zeros({n, 1}), 1));
    const Tensor nll = sum(add(sp, neg(mul(ycol, s))));
    return add(nll, mul(sum(mul(w, w)), Tensor::scalar(0.5 * l2)));
  };

  double step = 0.1 / static_cast<double>(n);
  double prev_loss = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 500; ++it) {
    Tape tape;
    const Tensor w = tape.leaf(w_val);
    const Tensor b = tape.leaf(b_val);
    const Tensor loss = loss_of(w, b);
    tape.backward(loss);
    const Tensor& gw = tape.grad(w);
    const Tensor& gb = tape.grad(b);

    // the loss must never increase; shrink the step until it does not
    while (true) {
      Tensor w_next = w_val, b_next = b_val;
      for (size_t k = 0; k < w_next.data().size(); ++k)
        w_next.data()[k] -= step * gw.data()[k];
      b_next.data()[0] -= step * gb.data()[0];
      const double next_loss =
          loss_of(w_next.detached(), b_next.detached()).scalar_value();
      if (next_loss <= loss.scalar_value() + 1e-12) {
        w_val = std::move(w_next);
        b_val = std::move(b_next);
        prev_loss = next_loss;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) { prev_loss = loss.scalar_value(); break; }
    }
    if (!std::isfinite(prev_loss))
      throw std::runtime_error("logistic_probe: diverged");
  }
  return {w_val, b_val};
}

std::vector<long> sorted_classes(const std::vector<long>& y) {
  std::set<long> s(y.begin(), y.end());
  return {s.begin(), s.end()};
}

// Per-class scores [n, C]; binary fits one model and scores its complement
// as the negation.
RowMatrix logistic_scores(const RowMatrix& x_train, const std::vector<long>& y_train,
                          const std::vector<long>& classes, double l2,
                          const RowMatrix& X) {
  RowMatrix scores(X.rows(), static_cast<Index>(classes.size()));
  if (classes.size() == 2) {
    std::vector<long> y01(y_train.size());
    for (size_t i = 0; i < y_train.size(); ++i)
      y01[i] = y_train[i] == classes[1] ? 1 : 0;
    const auto [w, b] = fit_logistic_binary(x_train, y01, l2);
    const Eigen::VectorXd s =
        X * w.mat() + Eigen::VectorXd::Constant(X.rows(), b.scalar_value());
    scores.col(1) = s;
    scores.col(0) = -s;
    return scores;
  }
  for (size_t c = 0; c < classes.size(); ++c) {
    std::vector<long> y01(y_train.size());
    for (size_t i = 0; i < y_train.size(); ++i)
      y01[i] = y_train[i] == classes[c] ? 1 : 0;
    const auto [w, b] = fit_logistic_binary(x_train, y01, l2);
    scores.col(static_cast<Index>(c)) =
        X * w.mat() + Eigen::VectorXd::Constant(X.rows(), b.scalar_value());
  }
  return scores;
}

// argmax with ties broken toward the lowest class index
std::vector<long> predict_classes(const RowMatrix& scores,
                                  const std::vector<long>& classes) {
  std::vector<long> pred(static_cast<size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    for (Index c = 1; c < scores.cols(); ++c)
      if (scores(i, c) > scores(i, best)) best = c;
    pred[static_cast<size_t>(i)] = classes[static_cast<size_t>(best)];
  }
  return pred;
}

double accuracy(const std::vector<long>& pred, const std::vector<long>& y) {
  Index hit = 0;
  for (size_t i = 0; i < y.size(); ++i)
    if (pred[i] == y[i]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(y.size());
}

}  // namespace

RowMatrix embed_dataset(const EncoderParams& params,
                        const std::vector<Graph>& graphs, Index batch_size) {
  if (graphs.empty()) throw std::invalid_argument("embed_dataset: empty dataset");
  RowMatrix out(static_cast<Index>(graphs.size()), params.hidden_dim);
  Index row = 0;
  for (size_t start = 0; start < graphs.size();
       start += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(graphs.size(), start + static_cast<size_t>(batch_size));
    const std::vector<Graph> chunk(graphs.begin() + static_cast<long>(start),
                                   graphs.begin() + static_cast<long>(end));
    const Tensor emb = encode(make_batch(chunk), params);
    out.middleRows(row, emb.rows()) = emb.mat();
    row += emb.rows();
  }
  return out;
}

Eigen::VectorXd ridge_solve(const RowMatrix& X, const Eigen::VectorXd& y,
                            double l2, bool fit_bias) {
  if (X.rows() != y.size())
    throw std::invalid_argument("ridge_solve: row count mismatch");
  RowMatrix A;
  if (fit_bias) {
    A.resize(X.rows(), X.cols() + 1);
    A.leftCols(X.cols()) = X;
    A.col(X.cols()).setOnes();
  } else {
    A = X;
  }
  Eigen::MatrixXd G = A.transpose() * A;
  for (Index j = 0; j < G.rows(); ++j)
    if (!(fit_bias && j == G.rows() - 1)) G(j, j) += l2;
  return G.ldlt().solve(A.transpose() * y);
}

ProbeResult ridge_probe(const RowMatrix& x_train, const Eigen::VectorXd& y_train,
                        const RowMatrix& x_val, const Eigen::VectorXd& y_val,
                        const RowMatrix& x_test, const Eigen::VectorXd& y_test,
                        const ProbeOptions& opts) {
  RowMatrix tr = x_train, va = x_val, te = x_test;
  if (opts.standardize) {
    const Standardizer z = Standardizer::fit(x_train);
    tr = z.apply(x_train);
    va = z.apply(x_val);
    te = z.apply(x_test);
  }
  ProbeResult best;
  best.metric_name = "rmse";
  best.val_metric = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_w;
  for (double l2 : kL2Grid) {
    const Eigen::VectorXd w = ridge_solve(tr, y_train, l2, /*fit_bias=*/true);
    const double val = rmse(ridge_predict(va, w, true), y_val);
    if (val < best.val_metric) {
      best.val_metric = val;
      best.best_l2 = l2;
      best_w = w;
    }
  }
  // terminal step: only now do the test labels enter
  const Eigen::VectorXd pred = ridge_predict(te, best_w, true);
  best.test_metric = rmse(pred, y_test);
  best.aux_metric = mae(pred, y_test);
  best.aux_name = "mae";
  return best;
}

ProbeResult logistic_probe(const RowMatrix& x_train,
                           const std::vector<long>& y_train,
                           const RowMatrix& x_val, const std::vector<long>& y_val,
                           const RowMatrix& x_test,
                           const std::vector<long>& y_test,
                           const ProbeOptions& opts) {
  const std::vector<long> classes = sorted_classes(y_train);
  if (classes.size() < 2)
    throw std::invalid_argument("logistic_probe: training split has a single class");
  RowMatrix tr = x_train, va = x_val, te = x_test;
  if (opts.standardize) {
    const Standardizer z = Standardizer::fit(x_train);
    tr = z.apply(x_train);
    va = z.apply(x_val);
    te = z.apply(x_test);
  }
  ProbeResult best;
  best.metric_name = "accuracy";
  best.val_metric = -1.0;
  for (double l2 : kL2Grid) {
    const RowMatrix val_scores = logistic_scores(tr, y_train, classes, l2, va);
    const double acc = accuracy(predict_classes(val_scores, classes), y_val);
    if (acc > best.val_metric) {
      best.val_metric = acc;
      best.best_l2 = l2;
    }
  }
  const RowMatrix test_scores =
      logistic_scores(tr, y_train, classes, best.best_l2, te);
  best.test_metric = accuracy(predict_classes(test_scores, classes), y_test);
  if (classes.size() == 2) {
    std::vector<double> s(static_cast<size_t>(test_scores.rows()));
    std::vector<long> y01(y_test.size());
    for (Index i = 0; i < test_scores.rows(); ++i) {
      s[static_cast<size_t>(i)] = test_scores(i, 1);
      y01[static_cast<size_t>(i)] =
          y_test[static_cast<size_t>(i)] == classes[1] ? 1 : 0;
    }
    const bool both_present =
        std::count(y01.begin(), y01.end(), 1) > 0 &&
        std::count(y01.begin(), y01.end(), 0) > 0;
    if (both_present) {
      best.aux_metric = roc_auc(s, y01);
      best.aux_name = "roc_auc";
    }
  }
  return best;
}

double roc_auc(const std::vector<double>& scores, const std::vector<long>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("roc_auc: size mismatch");
  const size_t n = scores.size();
  size_t n_pos = 0;
  for (long y : labels) n_pos += y == 1 ? 1u : 0u;
  const size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("roc_auc: one class absent");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // average ranks over tie groups
  std::vector<double> rank(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  double rank_sum_pos = 0.0;
  for (size_t k = 0; k < n; ++k)
    if (labels[k] == 1) rank_sum_pos += rank[k];
  const double u = rank_sum_pos - static_cast<double>(n_pos) *
                                      (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<ProbeResult> kfold_probe(const RowMatrix& X,
                                     const std::vector<long>& class_labels,
                                     const Eigen::VectorXd& targets,
                                     ProbeKind kind, int folds,
                                     std::uint64_t seed,
                                     const ProbeOptions& opts) {
  const Index n = X.rows();
  if (folds < 3 || n < folds)
    throw std::invalid_argument("kfold_probe: need 3 <= folds <= n");
  std::vector<Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<Index>> fold_idx(static_cast<size_t>(folds));
  for (Index i = 0; i < n; ++i)
    fold_idx[static_cast<size_t>(i) % static_cast<size_t>(folds)].push_back(
        perm[static_cast<size_t>(i)]);

  std::vector<ProbeResult> out;
  for (int f = 0; f < folds; ++f) {
    const auto& test = fold_idx[static_cast<size_t>(f)];
    const auto& val = fold_idx[static_cast<size_t>((f + 1) % folds)];
    std::vector<Index> train;
    for (int g = 0; g < folds; ++g)
      if (g != f && g != (f + 1) % folds)
        train.insert(train.end(), fold_idx[static_cast<size_t>(g)].begin(),
                     fold_idx[static_cast<size_t>(g)].end());
    auto pick_labels = [&](const std::vector<Index>& idx) {
      std::vector<long> y;
      for (Index i : idx) y.push_back(class_labels[static_cast<size_t>(i)]);
      return y;
    };
    auto pick_targets = [&](const std::vector<Index>& idx) {
      Eigen::VectorXd y(static_cast<Index>(idx.size()));
      for (size_t i = 0; i < idx.size(); ++i) y(static_cast<Index>(i)) = targets(idx[i]);
      return y;
    };
    if (kind == ProbeKind::kLogistic) {
      out.push_back(logistic_probe(rows_of(X, train), pick_labels(train),
                                   rows_of(X, val), pick_labels(val),
                                   rows_of(X, test), pick_labels(test), opts));
    } else {
      out.push_back(ridge_probe(rows_of(X, train), pick_targets(train),
                                rows_of(X, val), pick_targets(val),
                                rows_of(X, test), pick_targets(test), opts));
    }
  }
  return out;
}

std::vector<long> class_labels_of(const std::vector<Graph>& graphs,
                                  const std::vector<Index>& idx) {
  std::vector<long> y;
  y.reserve(idx.size());
  for (Index i : idx) {
    const Graph& g = graphs[static_cast<size_t>(i)];
    if (!g.has_class_label())
      throw std::invalid_argument("graph " + std::to_string(i) +
                                  " has no class label");
    y.push_back(g.class_label());
  }
  return y;
}

Eigen::VectorXd targets_of(const std::vector<Graph>& graphs,
                           const std::vector<Index>& idx) {
  Eigen::VectorXd y(static_cast<Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) {
    const Graph& g = graphs[static_cast<size_t>(idx[k])];
    if (!g.label || !std::holds_alternative<Eigen::VectorXd>(*g.label))
      throw std::invalid_argument("graph " + std::to_string(idx[k]) +
                                  " has no regression target");
    y(static_cast<Index>(k)) = std::get<Eigen::VectorXd>(*g.label)(0);
  }
  return y;
}

RowMatrix rows_of(const RowMatrix& X, const std::vector<Index>& idx) {
  RowMatrix out(static_cast<Index>(idx.size()), X.cols());
  for (size_t k = 0; k < idx.size(); ++k)
    out.row(static_cast<Index>(k)) = X.row(idx[k]);
  return out;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<ProbeResult>& results,
                       std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_metrics_csv: cannot open " + path);
  out << "metric,split,value,l2,seed,fold\n";
  for (size_t f = 0; f < results.size(); ++f) {
    const ProbeResult& r = results[f];
    out << r.metric_name << ",val," << fmt(r.val_metric) << "," << fmt(r.best_l2)
        << "," << seed << "," << f << "\n";
    out << r.metric_name << ",test," << fmt(r.test_metric) << ","
        << fmt(r.best_l2) << "," << seed << "," << f << "\n";
    if (r.aux_metric)
      out << r.aux_name << ",test," << fmt(*r.aux_metric) << "," << fmt(r.best_l2)
          << "," << seed << "," << f << "\n";
  }
}

}  // namespace adgcl
