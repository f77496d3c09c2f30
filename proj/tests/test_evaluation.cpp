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

#include <cmath>
#include <random>

#include "doctest.h"

using namespace adgcl;

namespace {

RowMatrix gaussian(Index r, Index c, std::mt19937_64& rng, double shift = 0.0) {
  std::normal_distribution<double> n(shift, 1.0);
  RowMatrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("evaluation");

TEST_CASE("the l2 grid is pinned") {
  CHECK(kL2Grid == std::array<double, 7>{0.001, 0.01, 0.1, 1, 10, 100, 1000});
}

TEST_CASE("ridge solve matches the one-dimensional closed form") {
  RowMatrix X(2, 1);
  X << 1, 2;
  Eigen::VectorXd y(2);
  y << 1, 2;
  // no bias: w = (X^T X + 1)^-1 X^T y = 5/6
  const Eigen::VectorXd w = ridge_solve(X, y, 1.0, /*fit_bias=*/false);
  CHECK(w(0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("ridge residuals satisfy the normal equations") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const RowMatrix X = gaussian(20, 6, rng);
    const Eigen::VectorXd y = gaussian(20, 1, rng).col(0);
    for (double l2 : kL2Grid) {
      const Eigen::VectorXd w = ridge_solve(X, y, l2, /*fit_bias=*/false);
      const Eigen::VectorXd resid =
          (X.transpose() * X + l2 * Eigen::MatrixXd::Identity(6, 6)) * w -
          X.transpose() * y;
      CHECK(resid.cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("ridge probe nearly interpolates X == y") {
  RowMatrix X(8, 1), Xv(3, 1), Xt(3, 1);
  X << 0, 1, 2, 3, 4, 5, 6, 7;
  Xv << 0.5, 2.5, 6.5;
  Xt << 1.5, 3.5, 5.5;
  const ProbeResult r = ridge_probe(X, X.col(0), Xv, Xv.col(0), Xt, Xt.col(0));
  CHECK(r.best_l2 == 0.001);
  CHECK(r.test_metric < 1e-3);
  CHECK(r.metric_name == "rmse");
  CHECK(r.aux_name == "mae");
}

TEST_CASE("ridge probe fits a constant target through the bias") {
  std::mt19937_64 rng(3);
  const RowMatrix X = gaussian(20, 4, rng);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 3.25);
  const RowMatrix Xv = gaussian(6, 4, rng);
  const Eigen::VectorXd yv = Eigen::VectorXd::Constant(6, 3.25);
  const ProbeResult r = ridge_probe(X, y, Xv, yv, Xv, yv);
  CHECK(r.test_metric < 1e-6);
}

TEST_CASE("logistic probe separates two clusters perfectly") {
  std::mt19937_64 rng(5);
  const Index n = 30;
  RowMatrix X(2 * n, 3);
  X.topRows(n) = gaussian(n, 3, rng, +4.0);
  X.bottomRows(n) = gaussian(n, 3, rng, -4.0);
  std::vector<long> y(static_cast<size_t>(2 * n), 0);
  for (Index i = 0; i < n; ++i) y[static_cast<size_t>(i)] = 1;
  const ProbeResult r = logistic_probe(X, y, X, y, X, y);
  CHECK(r.test_metric == 1.0);
  REQUIRE(r.aux_metric.has_value());
  CHECK(*r.aux_metric == 1.0);  // roc auc
}

TEST_CASE("labels independent of features give chance accuracy") {
  double acc_sum = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(100 + static_cast<unsigned>(s));
    const RowMatrix X = gaussian(60, 4, rng);
    std::vector<long> y(60);
    for (size_t i = 0; i < 60; ++i) y[i] = static_cast<long>(i % 2);
    std::shuffle(y.begin(), y.end(), rng);
    const RowMatrix Xt = gaussian(40, 4, rng);
    std::vector<long> yt(40);
    for (size_t i = 0; i < 40; ++i) yt[i] = static_cast<long>(i % 2);
    std::shuffle(yt.begin(), yt.end(), rng);
    const ProbeResult r = logistic_probe(X, y, Xt, yt, Xt, yt);
    acc_sum += r.test_metric;
  }
  CHECK(std::abs(acc_sum / seeds - 0.5) < 0.1);
}

TEST_CASE("logistic probe refuses a single-class training split") {
  std::mt19937_64 rng(6);
  const RowMatrix X = gaussian(10, 2, rng);
  const std::vector<long> y(10, 1);
  CHECK_THROWS_AS(static_cast<void>(logistic_probe(X, y, X, y, X, y)),
                  std::invalid_argument);
}

TEST_CASE("multiclass one-vs-rest handles three clusters") {
  std::mt19937_64 rng(7);
  const Index n = 20;
  RowMatrix X(3 * n, 2);
  std::vector<long> y(static_cast<size_t>(3 * n));
  for (int c = 0; c < 3; ++c) {
    const double angle = 2.0 * M_PI * c / 3.0;
    RowMatrix blob = gaussian(n, 2, rng) * 0.3;
    blob.col(0).array() += 5.0 * std::cos(angle);
    blob.col(1).array() += 5.0 * std::sin(angle);
    X.middleRows(c * n, n) = blob;
    for (Index i = 0; i < n; ++i) y[static_cast<size_t>(c * n + i)] = c;
  }
  const ProbeResult r = logistic_probe(X, y, X, y, X, y);
  CHECK(r.test_metric > 0.95);
  CHECK_FALSE(r.aux_metric.has_value());
}

TEST_CASE("roc_auc trivia") {
  CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == 1.0);
  CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {0, 0, 1, 1}) == 0.0);
  CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == 0.5);
  CHECK(roc_auc({1.0, 2.0, 3.0}, {1, 0, 1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(roc_auc({0.5, 0.1}, {1, 1}), std::invalid_argument);
}

TEST_CASE("roc_auc is invariant under strictly increasing transforms") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> s(40);
  std::vector<long> y(40);
  for (size_t i = 0; i < 40; ++i) {
    s[i] = n(rng);
    y[i] = static_cast<long>(rng() % 2);
  }
  y[0] = 0;
  y[1] = 1;
  const double base = roc_auc(s, y);
  std::vector<double> t = s;
  for (double& v : t) v = std::exp(3.0 * v) + 7.0;
  CHECK(roc_auc(t, y) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("scores equal to labels give a perfect auc") {
  std::vector<double> s{1, 0, 1, 0, 1};
  std::vector<long> y{1, 0, 1, 0, 1};
  CHECK(roc_auc(s, y) == 1.0);
}

TEST_CASE("kfold probe produces one result per fold on shared data") {
  std::mt19937_64 rng(9);
  const Index n = 50;
  RowMatrix X(n, 3);
  X.topRows(25) = gaussian(25, 3, rng, 3.0);
  X.bottomRows(25) = gaussian(25, 3, rng, -3.0);
  std::vector<long> y(static_cast<size_t>(n), 0);
  for (Index i = 0; i < 25; ++i) y[static_cast<size_t>(i)] = 1;
  const auto results =
      kfold_probe(X, y, Eigen::VectorXd{}, ProbeKind::kLogistic, 10, 4);
  CHECK(results.size() == 10);
  for (const ProbeResult& r : results) CHECK(r.test_metric >= 0.8);
}

TEST_CASE("embeddings are reproducible and match single-graph encoding") {
  MotifDatasetSpec spec;
  const auto graphs = generate_planted_motif(10, 44, spec);
  std::mt19937_64 rng(1);
  const EncoderParams params = init_encoder_params(1, 8, 2, rng);
  const RowMatrix a = embed_dataset(params, graphs, 4);
  const RowMatrix b = embed_dataset(params, graphs, 4);
  CHECK(a == b);
  const RowMatrix c = embed_dataset(params, graphs, 3);  // different batching
  CHECK((a - c).cwiseAbs().maxCoeff() < 1e-12);
  const Tensor one = encode(make_batch({graphs[3]}), params);
  CHECK((a.row(3) - one.mat().row(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardization changes features but keeps the pipeline sound") {
  std::mt19937_64 rng(10);
  RowMatrix X = gaussian(30, 3, rng);
  X.col(1) *= 100.0;
  const Eigen::VectorXd y = X.col(1) / 100.0;
  ProbeOptions opts;
  opts.standardize = true;
  const ProbeResult r = ridge_probe(X, y, X, y, X, y, opts);
  CHECK(r.test_metric < 1e-2);
}

TEST_SUITE_END();
