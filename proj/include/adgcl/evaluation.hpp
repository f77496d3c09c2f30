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

#ifndef ADGCL_EVALUATION_HPP
#define ADGCL_EVALUATION_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adgcl/encoder.hpp"
#include "adgcl/graph.hpp"

namespace adgcl {

/// L2 strengths searched on the validation split for every probe.
inline constexpr std::array<double, 7> kL2Grid{0.001, 0.01, 0.1,
                                               1.0,   10.0, 100.0, 1000.0};

/// Embeds every graph with the frozen encoder (pre-projection-head, keep
/// weights all one, no dropout). One row per graph.
RowMatrix embed_dataset(const EncoderParams& params,
                        const std::vector<Graph>& graphs,
                        Index batch_size = 64);

struct ProbeResult {
  double best_l2 = 0.0;
  double val_metric = 0.0;
  double test_metric = 0.0;
  std::string metric_name;  // accuracy | roc_auc | rmse | mae
  // secondary test metric: mae for ridge, roc_auc for binary classification
  std::optional<double> aux_metric;
  std::string aux_name;
};

struct ProbeOptions {
  bool standardize = false;  // z-score features, fitted on train only
};

/// Solves (A^T A + l2 J) w = A^T y where A is X with an appended constant
/// column when fit_bias is set and J is the identity with a zero in the bias
/// slot (the bias is never regularized).
Eigen::VectorXd ridge_solve(const RowMatrix& X, const Eigen::VectorXd& y,
                            double l2, bool fit_bias);

/// Ridge regression probe: fits per grid point on train, picks the l2 with
/// the lowest validation RMSE, then (and only then) touches the test labels.
ProbeResult ridge_probe(const RowMatrix& x_train, const Eigen::VectorXd& y_train,
                        const RowMatrix& x_val, const Eigen::VectorXd& y_val,
                        const RowMatrix& x_test, const Eigen::VectorXd& y_test,
                        const ProbeOptions& opts = {});

/// L2-regularized logistic regression (one-vs-rest for more than two
/// classes), fitted by full-batch gradient descent on the tensor core with a
/// fixed 500-iteration budget; the step (initially 0.1/n on the summed loss)
/// is halved whenever it would increase the loss, so the loss is
/// non-increasing. Grid selection on validation accuracy.
ProbeResult logistic_probe(const RowMatrix& x_train,
                           const std::vector<long>& y_train,
                           const RowMatrix& x_val, const std::vector<long>& y_val,
                           const RowMatrix& x_test,
                           const std::vector<long>& y_test,
                           const ProbeOptions& opts = {});

/// Mann-Whitney formulation via average ranks:
/// P(score_pos > score_neg) + P(tie)/2. Both classes must be present.
double roc_auc(const std::vector<double>& scores, const std::vector<long>& labels);

/// 10-fold (TU-style) evaluation: fold k tests, fold k+1 validates, the rest
/// train. Returns one result per fold.
enum class ProbeKind { kLogistic, kRidge };
std::vector<ProbeResult> kfold_probe(const RowMatrix& X,
                                     const std::vector<long>& class_labels,
                                     const Eigen::VectorXd& targets,
                                     ProbeKind kind, int folds,
                                     std::uint64_t seed,
                                     const ProbeOptions& opts = {});

// Label plumbing shared by the CLI and the harnesses.
std::vector<long> class_labels_of(const std::vector<Graph>& graphs,
                                  const std::vector<Index>& idx);
Eigen::VectorXd targets_of(const std::vector<Graph>& graphs,
                           const std::vector<Index>& idx);
RowMatrix rows_of(const RowMatrix& X, const std::vector<Index>& idx);

/// CSV rows "metric,split,value,l2,seed,fold".
void write_metrics_csv(const std::string& path,
                       const std::vector<ProbeResult>& results,
                       std::uint64_t seed);

}  // namespace adgcl

#endif  // ADGCL_EVALUATION_HPP
