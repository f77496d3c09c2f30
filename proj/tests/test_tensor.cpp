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

#include "adgcl/tensor.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace adgcl;

TEST_SUITE_BEGIN("tensor");

TEST_CASE("relu definition") {
  const Tensor x = Tensor::column({-1.0, 0.0, 2.0});
  const Tensor y = relu(x);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == 2.0);
}

TEST_CASE("sigmoid at zero") {
  CHECK(sigmoid(Tensor::scalar(0.0)).scalar_value() == 0.5);
}

TEST_CASE("matmul identity") {
  const Tensor a({2, 2}, {1, 2, 3, 4});
  const Tensor eye({2, 2}, {1, 0, 0, 1});
  const Tensor c = matmul(a, eye);
  CHECK(c.data() == a.data());
}

TEST_CASE("matmul shape mismatch names the primitive") {
  const Tensor a({2, 3}, std::vector<double>(6, 1.0));
  const Tensor b({2, 3}, std::vector<double>(6, 1.0));
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("matmul"),
                       std::invalid_argument);
}

TEST_CASE("log rejects non-positive input") {
  CHECK_THROWS_AS(log(Tensor::scalar(0.0)), std::domain_error);
  CHECK_THROWS_AS(log(Tensor::column({1.0, -2.0})), std::domain_error);
}

TEST_CASE("backward of x*x at x=3") {
  Tape tape;
  const Tensor x = tape.leaf(Tensor::scalar(3.0));
  const Tensor y = mul(x, x);
  tape.backward(y);
  CHECK(tape.grad(x).scalar_value() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("backward of sigmoid at 0") {
  Tape tape;
  const Tensor x = tape.leaf(Tensor::scalar(0.0));
  const Tensor y = sigmoid(x);
  tape.backward(y);
  CHECK(tape.grad(x).scalar_value() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("backward of sum(relu(x)) uses subgradient 0 at the kink") {
  Tape tape;
  const Tensor x = tape.leaf(Tensor::column({-1.0, 2.0}));
  const Tensor y = sum(relu(x));
  tape.backward(y);
  CHECK(tape.grad(x)[0] == 0.0);
  CHECK(tape.grad(x)[1] == 1.0);

  Tape tape2;
  const Tensor x2 = tape2.leaf(Tensor::column({0.0}));
  const Tensor y2 = sum(relu(x2));
  tape2.backward(y2);
  CHECK(tape2.grad(x2)[0] == 0.0);
}

TEST_CASE("backward requires a scalar seed") {
  Tape tape;
  const Tensor x = tape.leaf(Tensor::column({1.0, 2.0}));
  const Tensor y = relu(x);
  CHECK_THROWS_AS(tape.backward(y), std::invalid_argument);
}

TEST_CASE("untouched nodes keep zero gradient") {
  Tape tape;
  const Tensor x = tape.leaf(Tensor::scalar(2.0));
  const Tensor unused = tape.leaf(Tensor::scalar(5.0));
  const Tensor y = mul(x, x);
  tape.backward(y);
  CHECK(tape.grad(unused).scalar_value() == 0.0);
}

TEST_CASE("tape linearity: independent subgraphs keep separate gradients") {
  Tape tape;
  const Tensor x = tape.leaf(Tensor::column({1.0, 2.0}));
  const Tensor w = tape.leaf(Tensor::column({3.0, -1.0}));
  const Tensor y = add(sum(mul(x, x)), sum(mul(w, w)));
  tape.backward(y);

  Tape tx;
  const Tensor x2 = tx.leaf(Tensor::column({1.0, 2.0}));
  tx.backward(sum(mul(x2, x2)));
  Tape tw;
  const Tensor w2 = tw.leaf(Tensor::column({3.0, -1.0}));
  tw.backward(sum(mul(w2, w2)));

  CHECK(tape.grad(x).data() == tx.grad(x2).data());
  CHECK(tape.grad(w).data() == tw.grad(w2).data());
}

TEST_CASE("ops are deterministic bit for bit") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> av(12), bv(12);
  for (auto& v : av) v = u(rng);
  for (auto& v : bv) v = u(rng);
  const Tensor a({3, 4}, av), b({4, 3}, bv);
  const Tensor c1 = matmul(a, b);
  const Tensor c2 = matmul(a, b);
  CHECK(c1.data() == c2.data());
  CHECK(sigmoid(a).data() == sigmoid(a).data());
}

TEST_CASE("gather and scatter round trip gradients") {
  Tape tape;
  const Tensor h = tape.leaf(Tensor({3, 2}, {1, 2, 3, 4, 5, 6}));
  const Tensor picked = gather_rows(h, {2, 0, 2});
  CHECK(picked.data() == std::vector<double>{5, 6, 1, 2, 5, 6});
  const Tensor back = scatter_add_rows(picked, {2, 0, 2}, 3);
  CHECK(back.data() == std::vector<double>{1, 2, 0, 0, 10, 12});
  tape.backward(sum(back));
  CHECK(tape.grad(h).data() == std::vector<double>{1, 1, 0, 0, 2, 2});
}

TEST_CASE("concat along both axes") {
  const Tensor a({2, 1}, {1, 2}), b({2, 2}, {3, 4, 5, 6});
  CHECK(concat(a, b, 1).data() == std::vector<double>{1, 3, 4, 2, 5, 6});
  const Tensor c({1, 1}, {9});
  CHECK(concat(a, c, 0).data() == std::vector<double>{1, 2, 9});
  CHECK_THROWS_AS(concat(a, b, 0), std::invalid_argument);
}

TEST_CASE("logsumexp is finite on large inputs and masks the diagonal") {
  const Tensor big({1, 3}, {1000.0, 1000.0, 1000.0});
  CHECK(logsumexp_rows(big)[0] ==
        doctest::Approx(1000.0 + std::log(3.0)).epsilon(1e-12));

  const Tensor s({2, 2}, {5.0, 1.0, 2.0, 7.0});
  const Tensor mask({2, 2}, {0.0, 1.0, 1.0, 0.0});
  const Tensor l = logsumexp_rows(s, mask);
  CHECK(l[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("finite difference of a quadratic is near exact") {
  const auto f = [](Tape&, const Tensor& x) { return mul(x, x); };
  const double err = finite_difference_check(f, Tensor::scalar(3.0), 1e-5);
  CHECK(err < 1e-6);
}

TEST_CASE("finite difference of sum(sigmoid(x)) on a random point") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> xv(8);
  for (auto& v : xv) v = u(rng);
  const auto f = [](Tape&, const Tensor& x) { return sum(sigmoid(x)); };
  const double err = finite_difference_check(f, Tensor::column(xv), 1e-5);
  CHECK(err < 1e-4);
}

TEST_CASE("finite difference of a constant function is zero") {
  const auto f = [](Tape&, const Tensor&) { return Tensor::scalar(4.0); };
  CHECK(finite_difference_check(f, Tensor::column({1.0, 2.0}), 1e-5) == 0.0);
}

TEST_CASE("finite difference over composed primitives stays below 1e-4") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto f = [](Tape&, const std::vector<Tensor>& xs) {
    const Tensor& w = xs[0];
    const Tensor& b = xs[1];
    const Tensor h = sigmoid(add_rowvec(matmul(xs[2], w), b));
    const Tensor s = matmul(h, transpose(h));
    return mean(logsumexp_rows(s));
  };
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Tensor> point;
    auto rnd = [&](std::vector<Index> shape) {
      Tensor t = Tensor::zeros(shape);
      for (auto& v : t.data()) v = u(rng);
      return t;
    };
    point.push_back(rnd({3, 2}));
    point.push_back(rnd({1, 2}));
    point.push_back(rnd({4, 3}));
    CHECK(finite_difference_check(f, point, 1e-5) < 1e-4);
  }
}

TEST_CASE("adam first step moves by about lr") {
  AdamState st;
  st.lr = 0.001;
  Tensor x = Tensor::scalar(0.0);
  adam_update(st, x, Tensor::scalar(1.0), StepDirection::kDescent);
  CHECK(x.scalar_value() == doctest::Approx(-0.001).epsilon(1e-6));
  CHECK(std::abs(x.scalar_value() + 0.001) < 1e-9);

  AdamState st2;
  st2.lr = 0.001;
  Tensor y = Tensor::scalar(0.0);
  adam_update(st2, y, Tensor::scalar(1.0), StepDirection::kAscent);
  CHECK(std::abs(y.scalar_value() - 0.001) < 1e-9);
}

TEST_CASE("adam leaves the parameter alone on zero gradient") {
  AdamState st;
  Tensor x = Tensor::column({1.0, -2.0});
  adam_update(st, x, Tensor::zeros({2, 1}).detached(), StepDirection::kDescent);
  CHECK(x.data() == std::vector<double>{1.0, -2.0});
}

TEST_CASE("adam rejects non-finite gradients") {
  AdamState st;
  Tensor x = Tensor::scalar(0.0);
  CHECK_THROWS_AS(
      adam_update(st, x, Tensor::scalar(std::nan("")), StepDirection::kDescent),
      std::runtime_error);
}

TEST_CASE("adam ascent mirrors descent") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor g = Tensor::zeros({4, 1});
  for (auto& v : g.data()) v = n(rng);
  AdamState sd, sa;
  Tensor xd = Tensor::zeros({4, 1}), xa = Tensor::zeros({4, 1});
  for (int i = 0; i < 5; ++i) {
    adam_update(sd, xd, g, StepDirection::kDescent);
    adam_update(sa, xa, g, StepDirection::kAscent);
  }
  for (size_t k = 0; k < 4; ++k)
    CHECK(xd.data()[k] == doctest::Approx(-xa.data()[k]).epsilon(1e-15));
}

TEST_SUITE_END();
