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

#ifndef ADGCL_TENSOR_HPP
#define ADGCL_TENSOR_HPP

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace adgcl {

using Index = Eigen::Index;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tape;

/// Dense 64-bit float tensor of rank 0, 1 or 2, stored row-major.
/// A Tensor is a plain value unless it was produced by an op whose inputs
/// live on a Tape, in which case it carries a handle to its tape node.
/// Rank-1 tensors behave as column vectors in matrix contexts.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<Index> shape, std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor zeros(std::vector<Index> shape);
  static Tensor full(std::vector<Index> shape, double v);
  static Tensor ones(std::vector<Index> shape) { return full(std::move(shape), 1.0); }
  static Tensor from_matrix(const RowMatrix& m);
  static Tensor column(const std::vector<double>& v);

  const std::vector<Index>& shape() const { return shape_; }
  Index numel() const { return static_cast<Index>(data_.size()); }
  bool is_scalar() const { return numel() == 1; }
  /// Number of rows/cols when viewed as a matrix (scalar -> 1x1, [n] -> nx1).
  Index rows() const;
  Index cols() const;

  double scalar_value() const;
  double operator[](Index i) const { return data_[static_cast<size_t>(i)]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Eigen::Map<const RowMatrix> mat() const;
  Eigen::Map<RowMatrix> mat();

  bool tracked() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  Index node() const { return node_; }
  /// Same values, no tape handle.
  Tensor detached() const;

  bool all_finite() const;
  std::string shape_str() const;

 private:
  friend class Tape;
  std::vector<Index> shape_;
  std::vector<double> data_;
  Tape* tape_ = nullptr;
  Index node_ = -1;
};

enum class Op : std::uint8_t {
  kLeaf,
  kMatmul,
  kTranspose,
  kAdd,
  kMul,
  kNeg,
  kRelu,
  kSigmoid,
  kExp,
  kLog,
  kSum,
  kMean,
  kConcatCols,
  kConcatRows,
  kGatherRows,
  kScatterAddRows,
  kLogSumExp,
};

const char* op_name(Op op);

/// Reverse-mode gradient tape. Single-threaded; built for one forward/backward
/// pair and discarded. Nodes are appended in topological order by the op free
/// functions below.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Registers a copy of `value` as a differentiable leaf on this tape.
  Tensor leaf(const Tensor& value);

  /// Seeds d(seed)/d(seed) = 1 and accumulates gradients for every node the
  /// seed depends on. Untouched nodes keep an all-zero gradient. Throws if
  /// `seed` is not a scalar on this tape.
  void backward(const Tensor& seed);

  /// Gradient of the last backward() seed w.r.t. `t`. Valid until the tape is
  /// destroyed or backward() runs again.
  const Tensor& grad(const Tensor& t) const;

  Index size() const { return static_cast<Index>(nodes_.size()); }

  // Internal: used by the op implementations.
  Tensor record(Op op, std::array<Index, 2> in_nodes, std::vector<Tensor> in_vals,
                Tensor value, std::vector<Index> indices = {}, Index iarg = 0,
                Tensor aux = {});

 private:
  struct Node {
    Op op;
    std::array<Index, 2> in_node{{-1, -1}};
    std::vector<Tensor> in_val;  // saved operand values, in op order
    Tensor value;                // forward result
    std::vector<Index> indices;  // gather/scatter row indices
    Index iarg = 0;              // scatter output rows
    Tensor aux;                  // logsumexp mask (empty -> all ones)
  };
  void accumulate(Index node, const Tensor& g);
  void backprop_node(Index i);

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  bool has_grads_ = false;
};

// Primitive ops. Each appends one node to the tape inferred from its tracked
// inputs (mixing two tapes is an error); with no tracked input the result is a
// plain value. Shape errors name the primitive and the offending shapes.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
/// Elementwise; one side may be a scalar (broadcast).
Tensor add(const Tensor& a, const Tensor& b);
/// Elementwise; one side may be a scalar (broadcast).
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor relu(const Tensor& a);  // subgradient 0 at the kink
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);  // throws on non-positive entries
Tensor sum(const Tensor& a);   // full reduction -> scalar
Tensor mean(const Tensor& a);  // full reduction -> scalar
/// axis 0 stacks rows, axis 1 stacks columns.
Tensor concat(const Tensor& a, const Tensor& b, int axis);
Tensor gather_rows(const Tensor& a, const std::vector<Index>& idx);
/// out[idx[i], :] += a[i, :]; output has `out_rows` rows.
Tensor scatter_add_rows(const Tensor& a, const std::vector<Index>& idx,
                        Index out_rows);
/// Row-wise log(sum_j exp(a_ij)) with max-subtraction, result [r,1].
Tensor logsumexp_rows(const Tensor& a);
/// Same, restricted to entries where mask != 0. `mask` is a constant (no
/// gradient flows into it); every row needs at least one unmasked entry.
Tensor logsumexp_rows(const Tensor& a, const Tensor& mask);

// Sugar composed from the primitives above.
inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator-(const Tensor& a) { return neg(a); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return add(a, neg(b)); }
inline Tensor operator+(const Tensor& a, double b) { return add(a, Tensor::scalar(b)); }
inline Tensor operator+(double a, const Tensor& b) { return add(Tensor::scalar(a), b); }
inline Tensor operator*(const Tensor& a, double b) { return mul(a, Tensor::scalar(b)); }
inline Tensor operator*(double a, const Tensor& b) { return mul(Tensor::scalar(a), b); }
inline Tensor operator-(double a, const Tensor& b) { return add(Tensor::scalar(a), neg(b)); }
inline Tensor operator-(const Tensor& a, double b) { return add(a, Tensor::scalar(-b)); }

/// out[i,:] = a[i,:] * s[i]; s is [r], [r,1] or [1,r]. Composed as
/// mul(a, s * ones(1, cols)) so it stays within the primitive set.
Tensor scale_rows(const Tensor& a, const Tensor& s);
/// Adds a [1,c] (or [c]) row vector to every row of a, via ones(r,1) * b.
Tensor add_rowvec(const Tensor& a, const Tensor& b);
/// Rows scaled to unit L2 norm; rows with squared norm below eps stay near
/// zero instead of erroring. Differentiable (1/|x| via exp(-log(.)/2)).
Tensor l2_normalize_rows(const Tensor& a, double eps = 1e-12);

/// Adam with the usual bias correction. `m`/`v` are sized on first use.
struct AdamState {
  Index step = 0;
  Tensor m, v;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

enum class StepDirection { kDescent, kAscent };

/// One Adam step in-place on `param`. kAscent flips the sign of the applied
/// step. Throws on non-finite gradient entries (training abort signal).
void adam_update(AdamState& state, Tensor& param, const Tensor& grad,
                 StepDirection direction = StepDirection::kDescent);

/// Compares reverse-mode gradients of a scalar-valued function against central
/// finite differences at `point`, returning
///   max_i |g_ad(i) - g_fd(i)| / max(1, |g_ad(i)|, |g_fd(i)|).
/// `f` must build its result from the supplied leaves; it is re-evaluated with
/// plain (untracked) tensors for the difference quotients. Throws if the
/// function value is not finite.
double finite_difference_check(
    const std::function<Tensor(Tape&, const std::vector<Tensor>&)>& f,
    const std::vector<Tensor>& point, double eps);

double finite_difference_check(
    const std::function<Tensor(Tape&, const Tensor&)>& f, const Tensor& point,
    double eps);

}  // namespace adgcl

#endif  // ADGCL_TENSOR_HPP
