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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace adgcl {

namespace {

Index shape_numel(const std::vector<Index>& shape) {
  Index n = 1;
  for (Index d : shape) {
    if (d < 0) throw std::invalid_argument("tensor: negative dimension");
    n *= d;
  }
  return n;
}

[[noreturn]] void shape_error(const char* prim, const Tensor& a) {
  throw std::invalid_argument(std::string(prim) + ": bad shape " + a.shape_str());
}

[[noreturn]] void shape_error(const char* prim, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(prim) + ": incompatible shapes " +
                              a.shape_str() + " and " + b.shape_str());
}

void require_rank2(const char* prim, const Tensor& a) {
  if (a.shape().size() != 2) shape_error(prim, a);
}

// Resolves the tape shared by the tracked operands, or nullptr.
Tape* common_tape(std::initializer_list<const Tensor*> ts) {
  Tape* tape = nullptr;
  for (const Tensor* t : ts) {
    if (!t->tracked()) continue;
    if (tape != nullptr && tape != t->tape())
      throw std::logic_error("op: operands live on different tapes");
    tape = t->tape();
  }
  return tape;
}

Tensor finish(Op op, std::initializer_list<const Tensor*> ins, Tensor value,
              std::vector<Index> indices = {}, Index iarg = 0, Tensor aux = {}) {
  Tape* tape = common_tape(ins);
  if (tape == nullptr) return value;
  std::array<Index, 2> in_nodes{{-1, -1}};
  std::vector<Tensor> in_vals;
  int k = 0;
  for (const Tensor* t : ins) {
    in_nodes[static_cast<size_t>(k++)] = t->tracked() ? t->node() : -1;
    in_vals.push_back(t->detached());
  }
  return tape->record(op, in_nodes, std::move(in_vals), std::move(value),
                      std::move(indices), iarg, std::move(aux));
}

Tensor map_unary(Op op, const Tensor& a, const std::function<double(double)>& f) {
  Tensor out = a.detached();
  for (double& x : out.data()) x = f(x);
  return finish(op, {&a}, std::move(out));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor::Tensor(std::vector<Index> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.size() > 2) throw std::invalid_argument("tensor: rank > 2 unsupported");
  if (shape_numel(shape_) != numel())
    throw std::invalid_argument("tensor: shape does not match data length");
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::zeros(std::vector<Index> shape) {
  const Index n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(static_cast<size_t>(n), 0.0));
}

Tensor Tensor::full(std::vector<Index> shape, double v) {
  const Index n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(static_cast<size_t>(n), v));
}

Tensor Tensor::from_matrix(const RowMatrix& m) {
  std::vector<double> data(m.data(), m.data() + m.size());
  return Tensor({m.rows(), m.cols()}, std::move(data));
}

Tensor Tensor::column(const std::vector<double>& v) {
  return Tensor({static_cast<Index>(v.size()), 1}, v);
}

Index Tensor::rows() const {
  if (shape_.empty()) return 1;
  return shape_[0];
}

Index Tensor::cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

double Tensor::scalar_value() const {
  if (numel() != 1) throw std::logic_error("scalar_value: tensor has " +
                                           std::to_string(numel()) + " entries");
  return data_[0];
}

Eigen::Map<const RowMatrix> Tensor::mat() const {
  return Eigen::Map<const RowMatrix>(data_.data(), rows(), cols());
}

Eigen::Map<RowMatrix> Tensor::mat() {
  return Eigen::Map<RowMatrix>(data_.data(), rows(), cols());
}

Tensor Tensor::detached() const {
  Tensor t;
  t.shape_ = shape_;
  t.data_ = data_;
  return t;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
  os << ']';
  return os.str();
}

const char* op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kMatmul: return "matmul";
    case Op::kTranspose: return "transpose";
    case Op::kAdd: return "add";
    case Op::kMul: return "mul";
    case Op::kNeg: return "neg";
    case Op::kRelu: return "relu";
    case Op::kSigmoid: return "sigmoid";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kConcatCols: return "concat_cols";
    case Op::kConcatRows: return "concat_rows";
    case Op::kGatherRows: return "gather_rows";
    case Op::kScatterAddRows: return "scatter_add_rows";
    case Op::kLogSumExp: return "logsumexp";
  }
  return "?";
}

Tensor Tape::leaf(const Tensor& value) {
  return record(Op::kLeaf, {{-1, -1}}, {}, value.detached());
}

Tensor Tape::record(Op op, std::array<Index, 2> in_nodes,
                    std::vector<Tensor> in_vals, Tensor value,
                    std::vector<Index> indices, Index iarg, Tensor aux) {
  Node n;
  n.op = op;
  n.in_node = in_nodes;
  n.in_val = std::move(in_vals);
  n.value = std::move(value);
  n.indices = std::move(indices);
  n.iarg = iarg;
  n.aux = std::move(aux);
  nodes_.push_back(std::move(n));
  Tensor out = nodes_.back().value;  // detached copy of the stored value
  out.tape_ = this;
  out.node_ = static_cast<Index>(nodes_.size()) - 1;
  return out;
}

void Tape::accumulate(Index node, const Tensor& g) {
  if (node < 0) return;
  Tensor& acc = grads_[static_cast<size_t>(node)];
  const Tensor& val = nodes_[static_cast<size_t>(node)].value;
  if (val.is_scalar() && !g.is_scalar()) {
    // broadcast operand: fold the upstream gradient back into a scalar
    acc.data()[0] += std::accumulate(g.data().begin(), g.data().end(), 0.0);
    return;
  }
  for (size_t i = 0; i < acc.data().size(); ++i) acc.data()[i] += g.data()[i];
}

void Tape::backward(const Tensor& seed) {
  if (!seed.tracked() || seed.tape() != this)
    throw std::invalid_argument("backward: seed is not on this tape");
  if (seed.numel() != 1)
    throw std::invalid_argument("backward: seed must be a scalar, got shape " +
                                seed.shape_str());
  grads_.clear();
  grads_.reserve(nodes_.size());
  for (const Node& n : nodes_) grads_.push_back(Tensor::zeros(n.value.shape()));
  grads_[static_cast<size_t>(seed.node())].data()[0] = 1.0;
  has_grads_ = true;
  for (Index i = seed.node(); i >= 0; --i) backprop_node(i);
}

const Tensor& Tape::grad(const Tensor& t) const {
  if (!t.tracked() || t.tape() != this)
    throw std::invalid_argument("grad: tensor is not on this tape");
  if (!has_grads_) throw std::logic_error("grad: backward() has not run");
  return grads_[static_cast<size_t>(t.node())];
}

void Tape::backprop_node(Index i) {
  const Node& n = nodes_[static_cast<size_t>(i)];
  const Tensor& g = grads_[static_cast<size_t>(i)];
  switch (n.op) {
    case Op::kLeaf:
      break;
    case Op::kMatmul: {
      const Tensor& a = n.in_val[0];
      const Tensor& b = n.in_val[1];
      if (n.in_node[0] >= 0) {
        Tensor ga = Tensor::zeros(a.shape());
        ga.mat() = g.mat() * b.mat().transpose();
        accumulate(n.in_node[0], ga);
      }
      if (n.in_node[1] >= 0) {
        Tensor gb = Tensor::zeros(b.shape());
        gb.mat() = a.mat().transpose() * g.mat();
        accumulate(n.in_node[1], gb);
      }
      break;
    }
    case Op::kTranspose: {
      Tensor ga = Tensor::zeros(n.in_val[0].shape());
      ga.mat() = g.mat().transpose();
      accumulate(n.in_node[0], ga);
      break;
    }
    case Op::kAdd:
      accumulate(n.in_node[0], g);
      accumulate(n.in_node[1], g);
      break;
    case Op::kMul: {
      const Tensor& a = n.in_val[0];
      const Tensor& b = n.in_val[1];
      if (n.in_node[0] >= 0) {
        Tensor ga = g.detached();
        if (b.is_scalar()) {
          for (double& x : ga.data()) x *= b.data()[0];
        } else if (a.is_scalar()) {
          // gradient w.r.t. the scalar side: accumulate() folds it
          for (size_t k = 0; k < ga.data().size(); ++k) ga.data()[k] *= b.data()[k];
        } else {
          for (size_t k = 0; k < ga.data().size(); ++k) ga.data()[k] *= b.data()[k];
        }
        accumulate(n.in_node[0], ga);
      }
      if (n.in_node[1] >= 0) {
        Tensor gb = g.detached();
        if (a.is_scalar()) {
          for (double& x : gb.data()) x *= a.data()[0];
        } else {
          for (size_t k = 0; k < gb.data().size(); ++k) gb.data()[k] *= a.data()[k];
        }
        accumulate(n.in_node[1], gb);
      }
      break;
    }
    case Op::kNeg: {
      Tensor ga = g.detached();
      for (double& x : ga.data()) x = -x;
      accumulate(n.in_node[0], ga);
      break;
    }
    case Op::kRelu: {
      const Tensor& a = n.in_val[0];
      Tensor ga = g.detached();
      for (size_t k = 0; k < ga.data().size(); ++k)
        if (a.data()[k] <= 0.0) ga.data()[k] = 0.0;
      accumulate(n.in_node[0], ga);
      break;
    }
    case Op::kSigmoid: {
      const Tensor& s = n.value;
      Tensor ga = g.detached();
      for (size_t k = 0; k < ga.data().size(); ++k)
        ga.data()[k] *= s.data()[k] * (1.0 - s.data()[k]);
      accumulate(n.in_node[0], ga);
      break;
    }
    case Op::kExp: {
      Tensor ga = g.detached();
      for (size_t k = 0; k < ga.data().size(); ++k) ga.data()[k] *= n.value.data()[k];
      accumulate(n.in_node[0], ga);
      break;
    }
    case Op::kLog: {
      const Tensor& a = n.in_val[0];
      Tensor ga = g.detached();
      for (size_t k = 0; k < ga.data().size(); ++k) ga.data()[k] /= a.data()[k];
      accumulate(n.in_node[0], ga);
      break;
    }
    case Op::kSum: {
      Tensor ga = Tensor::full(n.in_val[0].shape(), g.data()[0]);
      accumulate(n.in_node[0], ga);
      break;
    }
    case Op::kMean: {
      const double n_in = static_cast<double>(n.in_val[0].numel());
      Tensor ga = Tensor::full(n.in_val[0].shape(), g.data()[0] / n_in);
      accumulate(n.in_node[0], ga);
      break;
    }
    case Op::kConcatCols: {
      const Index c0 = n.in_val[0].cols();
      const Index c1 = n.in_val[1].cols();
      if (n.in_node[0] >= 0) {
        Tensor ga = Tensor::zeros(n.in_val[0].shape());
        ga.mat() = g.mat().leftCols(c0);
        accumulate(n.in_node[0], ga);
      }
      if (n.in_node[1] >= 0) {
        Tensor gb = Tensor::zeros(n.in_val[1].shape());
        gb.mat() = g.mat().rightCols(c1);
        accumulate(n.in_node[1], gb);
      }
      break;
    }
    case Op::kConcatRows: {
      const Index r0 = n.in_val[0].rows();
      const Index r1 = n.in_val[1].rows();
      if (n.in_node[0] >= 0) {
        Tensor ga = Tensor::zeros(n.in_val[0].shape());
        ga.mat() = g.mat().topRows(r0);
        accumulate(n.in_node[0], ga);
      }
      if (n.in_node[1] >= 0) {
        Tensor gb = Tensor::zeros(n.in_val[1].shape());
        gb.mat() = g.mat().bottomRows(r1);
        accumulate(n.in_node[1], gb);
      }
      break;
    }
    case Op::kGatherRows: {
      Tensor ga = Tensor::zeros(n.in_val[0].shape());
      const Index c = ga.cols();
      for (size_t r = 0; r < n.indices.size(); ++r) {
        const Index src = static_cast<Index>(r);
        const Index dst = n.indices[r];
        for (Index j = 0; j < c; ++j)
          ga.data()[static_cast<size_t>(dst * c + j)] +=
              g.data()[static_cast<size_t>(src * c + j)];
      }
      accumulate(n.in_node[0], ga);
      break;
    }
    case Op::kScatterAddRows: {
      Tensor ga = Tensor::zeros(n.in_val[0].shape());
      const Index c = ga.cols();
      for (size_t r = 0; r < n.indices.size(); ++r) {
        const Index dst = n.indices[r];
        for (Index j = 0; j < c; ++j)
          ga.data()[static_cast<size_t>(static_cast<Index>(r) * c + j)] =
              g.data()[static_cast<size_t>(dst * c + j)];
      }
      accumulate(n.in_node[0], ga);
      break;
    }
    case Op::kLogSumExp: {
      const Tensor& a = n.in_val[0];
      const Index r = a.rows(), c = a.cols();
      Tensor ga = Tensor::zeros(a.shape());
      for (Index i2 = 0; i2 < r; ++i2) {
        const double lse = n.value.data()[static_cast<size_t>(i2)];
        const double up = g.data()[static_cast<size_t>(i2)];
        for (Index j = 0; j < c; ++j) {
          const size_t k = static_cast<size_t>(i2 * c + j);
          const double m = n.aux.numel() == 0 ? 1.0 : n.aux.data()[k];
          if (m != 0.0)
            ga.data()[k] = up * std::exp(a.data()[k] - lse);
        }
      }
      accumulate(n.in_node[0], ga);
      break;
    }
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2("matmul", a);
  require_rank2("matmul", b);
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  Tensor out = Tensor::zeros({a.rows(), b.cols()});
  out.mat() = a.mat() * b.mat();
  return finish(Op::kMatmul, {&a, &b}, std::move(out));
}

Tensor transpose(const Tensor& a) {
  require_rank2("transpose", a);
  Tensor out = Tensor::zeros({a.cols(), a.rows()});
  out.mat() = a.mat().transpose();
  return finish(Op::kTranspose, {&a}, std::move(out));
}

namespace {
Tensor elementwise_binary(Op op, const Tensor& a, const Tensor& b,
                          const std::function<double(double, double)>& f) {
  const bool as = a.is_scalar(), bs = b.is_scalar();
  if (!as && !bs && a.shape() != b.shape()) shape_error(op_name(op), a, b);
  // output takes the non-scalar shape; between two scalars, the higher rank
  const Tensor& shaped =
      !bs ? b : (!as ? a : (a.shape().size() >= b.shape().size() ? a : b));
  Tensor out = shaped.detached();
  for (size_t k = 0; k < out.data().size(); ++k) {
    const double x = as ? a.data()[0] : a.data()[k];
    const double y = bs ? b.data()[0] : b.data()[k];
    out.data()[k] = f(x, y);
  }
  return finish(op, {&a, &b}, std::move(out));
}
}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise_binary(Op::kAdd, a, b, [](double x, double y) { return x + y; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise_binary(Op::kMul, a, b, [](double x, double y) { return x * y; });
}

Tensor neg(const Tensor& a) {
  return map_unary(Op::kNeg, a, [](double x) { return -x; });
}

Tensor relu(const Tensor& a) {
  return map_unary(Op::kRelu, a, [](double x) { return x > 0.0 ? x : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return map_unary(Op::kSigmoid, a, stable_sigmoid);
}

Tensor exp(const Tensor& a) {
  return map_unary(Op::kExp, a, [](double x) { return std::exp(x); });
}

Tensor log(const Tensor& a) {
  for (double x : a.data())
    if (x <= 0.0)
      throw std::domain_error("log: non-positive input " + std::to_string(x));
  return map_unary(Op::kLog, a, [](double x) { return std::log(x); });
}

Tensor sum(const Tensor& a) {
  const double s = std::accumulate(a.data().begin(), a.data().end(), 0.0);
  return finish(Op::kSum, {&a}, Tensor::scalar(s));
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) throw std::invalid_argument("mean: empty tensor");
  const double s = std::accumulate(a.data().begin(), a.data().end(), 0.0);
  return finish(Op::kMean, {&a}, Tensor::scalar(s / static_cast<double>(a.numel())));
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
  require_rank2("concat", a);
  require_rank2("concat", b);
  if (axis == 1) {
    if (a.rows() != b.rows()) shape_error("concat", a, b);
    Tensor out = Tensor::zeros({a.rows(), a.cols() + b.cols()});
    out.mat().leftCols(a.cols()) = a.mat();
    out.mat().rightCols(b.cols()) = b.mat();
    return finish(Op::kConcatCols, {&a, &b}, std::move(out));
  }
  if (axis == 0) {
    if (a.cols() != b.cols()) shape_error("concat", a, b);
    Tensor out = Tensor::zeros({a.rows() + b.rows(), a.cols()});
    out.mat().topRows(a.rows()) = a.mat();
    out.mat().bottomRows(b.rows()) = b.mat();
    return finish(Op::kConcatRows, {&a, &b}, std::move(out));
  }
  throw std::invalid_argument("concat: axis must be 0 or 1");
}

Tensor gather_rows(const Tensor& a, const std::vector<Index>& idx) {
  require_rank2("gather_rows", a);
  for (Index i : idx)
    if (i < 0 || i >= a.rows())
      throw std::out_of_range("gather_rows: index " + std::to_string(i) +
                              " out of range for " + a.shape_str());
  Tensor out = Tensor::zeros({static_cast<Index>(idx.size()), a.cols()});
  for (size_t r = 0; r < idx.size(); ++r)
    out.mat().row(static_cast<Index>(r)) = a.mat().row(idx[r]);
  return finish(Op::kGatherRows, {&a}, std::move(out), idx);
}

Tensor scatter_add_rows(const Tensor& a, const std::vector<Index>& idx,
                        Index out_rows) {
  require_rank2("scatter_add_rows", a);
  if (static_cast<Index>(idx.size()) != a.rows())
    throw std::invalid_argument("scatter_add_rows: " + std::to_string(idx.size()) +
                                " indices for " + a.shape_str());
  for (Index i : idx)
    if (i < 0 || i >= out_rows)
      throw std::out_of_range("scatter_add_rows: index " + std::to_string(i) +
                              " out of range for " + std::to_string(out_rows) +
                              " rows");
  Tensor out = Tensor::zeros({out_rows, a.cols()});
  for (size_t r = 0; r < idx.size(); ++r)
    out.mat().row(idx[r]) += a.mat().row(static_cast<Index>(r));
  return finish(Op::kScatterAddRows, {&a}, std::move(out), idx, out_rows);
}

namespace {
Tensor logsumexp_impl(const Tensor& a, const Tensor& mask) {
  require_rank2("logsumexp", a);
  const bool masked = mask.numel() != 0;
  if (masked && mask.shape() != a.shape()) shape_error("logsumexp", a, mask);
  const Index r = a.rows(), c = a.cols();
  Tensor out = Tensor::zeros({r, 1});
  for (Index i = 0; i < r; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < c; ++j) {
      const size_t k = static_cast<size_t>(i * c + j);
      if (masked && mask.data()[k] == 0.0) continue;
      mx = std::max(mx, a.data()[k]);
    }
    if (!std::isfinite(mx))
      throw std::invalid_argument("logsumexp: row " + std::to_string(i) +
                                  " has no unmasked entries");
    double s = 0.0;
    for (Index j = 0; j < c; ++j) {
      const size_t k = static_cast<size_t>(i * c + j);
      if (masked && mask.data()[k] == 0.0) continue;
      s += std::exp(a.data()[k] - mx);
    }
    out.data()[static_cast<size_t>(i)] = mx + std::log(s);
  }
  return finish(Op::kLogSumExp, {&a}, std::move(out), {}, 0,
                masked ? mask.detached() : Tensor{});
}
}  // namespace

Tensor logsumexp_rows(const Tensor& a) { return logsumexp_impl(a, Tensor{}); }

Tensor logsumexp_rows(const Tensor& a, const Tensor& mask) {
  return logsumexp_impl(a, mask);
}

Tensor scale_rows(const Tensor& a, const Tensor& s) {
  require_rank2("scale_rows", a);
  Tensor col = s;
  if (s.shape().size() != 2) {
    if (s.tracked() || s.numel() != a.rows()) shape_error("scale_rows", a, s);
    col = Tensor::column(s.data());
  }
  if (col.rows() != a.rows() || col.cols() != 1) shape_error("scale_rows", a, col);
  return mul(a, matmul(col, Tensor::ones({1, a.cols()})));
}

Tensor add_rowvec(const Tensor& a, const Tensor& b) {
  require_rank2("add_rowvec", a);
  Tensor row = b;
  if (b.shape().size() != 2) {
    if (b.tracked() || b.numel() != a.cols()) shape_error("add_rowvec", a, b);
    row = Tensor({1, b.numel()}, b.data());
  }
  if (row.rows() != 1 || row.cols() != a.cols()) shape_error("add_rowvec", a, row);
  return add(a, matmul(Tensor::ones({a.rows(), 1}), row));
}

Tensor l2_normalize_rows(const Tensor& a, double eps) {
  require_rank2("l2_normalize_rows", a);
  const Tensor norm_sq =
      add(matmul(mul(a, a), Tensor::ones({a.cols(), 1})), Tensor::scalar(eps));
  const Tensor inv_norm = exp(mul(log(norm_sq), Tensor::scalar(-0.5)));
  return mul(a, matmul(inv_norm, Tensor::ones({1, a.cols()})));
}

void adam_update(AdamState& state, Tensor& param, const Tensor& grad,
                 StepDirection direction) {
  if (grad.shape() != param.shape())
    throw std::invalid_argument("adam_update: gradient shape " + grad.shape_str() +
                                " does not match parameter " + param.shape_str());
  if (!grad.all_finite())
    throw std::runtime_error("adam_update: non-finite gradient");
  if (state.m.numel() == 0) {
    state.m = Tensor::zeros(param.shape());
    state.v = Tensor::zeros(param.shape());
  }
  if (state.m.shape() != param.shape())
    throw std::invalid_argument("adam_update: moment shape " + state.m.shape_str() +
                                " does not match parameter " + param.shape_str());
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const double sign = direction == StepDirection::kDescent ? -1.0 : 1.0;
  for (size_t k = 0; k < param.data().size(); ++k) {
    const double g = grad.data()[k];
    state.m.data()[k] = state.beta1 * state.m.data()[k] + (1.0 - state.beta1) * g;
    state.v.data()[k] = state.beta2 * state.v.data()[k] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m.data()[k] / bc1;
    const double vhat = state.v.data()[k] / bc2;
    param.data()[k] += sign * state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

double finite_difference_check(
    const std::function<Tensor(Tape&, const std::vector<Tensor>&)>& f,
    const std::vector<Tensor>& point, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("finite_difference_check: eps <= 0");

  Tape tape;
  std::vector<Tensor> leaves;
  leaves.reserve(point.size());
  for (const Tensor& p : point) leaves.push_back(tape.leaf(p));
  Tensor y = f(tape, leaves);
  if (y.numel() != 1)
    throw std::invalid_argument("finite_difference_check: function is not scalar");
  if (!y.all_finite())
    throw std::runtime_error("finite_difference_check: non-finite function value");
  // A constant function never touches the tape; its gradient is zero.
  if (y.tracked()) tape.backward(y);

  auto eval = [&](const std::vector<Tensor>& at) {
    Tape scratch;  // stays empty: inputs are untracked
    const Tensor v = f(scratch, at);
    if (!v.all_finite())
      throw std::runtime_error("finite_difference_check: non-finite function value");
    return v.scalar_value();
  };

  double worst = 0.0;
  std::vector<Tensor> probe = point;
  for (size_t t = 0; t < point.size(); ++t) {
    const Tensor g_ad =
        y.tracked() ? tape.grad(leaves[t]) : Tensor::zeros(point[t].shape());
    for (size_t k = 0; k < point[t].data().size(); ++k) {
      const double x0 = point[t].data()[k];
      probe[t].data()[k] = x0 + eps;
      const double fp = eval(probe);
      probe[t].data()[k] = x0 - eps;
      const double fm = eval(probe);
      probe[t].data()[k] = x0;
      const double g_fd = (fp - fm) / (2.0 * eps);
      const double g = g_ad.data()[k];
      const double denom = std::max({1.0, std::abs(g), std::abs(g_fd)});
      worst = std::max(worst, std::abs(g - g_fd) / denom);
    }
  }
  return worst;
}

double finite_difference_check(
    const std::function<Tensor(Tape&, const Tensor&)>& f, const Tensor& point,
    double eps) {
  return finite_difference_check(
      [&f](Tape& tape, const std::vector<Tensor>& xs) { return f(tape, xs[0]); },
      std::vector<Tensor>{point}, eps);
}

}  // namespace adgcl
