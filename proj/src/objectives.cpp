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

#include "adgcl/objectives.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adgcl {

namespace {

// Row-normalizes z to unit L2 norm. 1/|z_i| is computed as exp(-0.5 log |z|^2)
// to stay inside the primitive set; zero-norm rows are rejected first.
Tensor normalize_rows(const Tensor& z, const char* which) {
  const Index d = z.cols();
  const Tensor norm_sq = matmul(mul(z, z), Tensor::ones({d, 1}));  // [m,1]
  for (Index i = 0; i < norm_sq.numel(); ++i)
    if (std::sqrt(norm_sq[i]) < 1e-12)
      throw std::invalid_argument(std::string("cosine_similarity_matrix: ") +
                                  which + " row " + std::to_string(i) +
                                  " has zero norm");
  const Tensor inv_norm = exp(mul(log(norm_sq), Tensor::scalar(-0.5)));
  return mul(z, matmul(inv_norm, Tensor::ones({1, d})));
}

}  // namespace

Tensor cosine_similarity_matrix(const Tensor& z1, const Tensor& z2) {
  if (z1.shape().size() != 2 || z2.shape().size() != 2 ||
      z1.rows() != z2.rows() || z1.cols() != z2.cols())
    throw std::invalid_argument("cosine_similarity_matrix: shapes " +
                                z1.shape_str() + " and " + z2.shape_str() +
                                " do not match");
  return matmul(normalize_rows(z1, "z1"), transpose(normalize_rows(z2, "z2")));
}

Tensor info_nce(const ContrastivePair& pair) {
  const Index m = pair.z1.rows();
  if (m < 2)
    throw std::invalid_argument("info_nce: need at least 2 pairs, got " +
                                std::to_string(m));
  const Tensor s = cosine_similarity_matrix(pair.z1, pair.z2);

  Tensor eye = Tensor::zeros({m, m});
  Tensor off_diag = Tensor::ones({m, m});
  for (Index i = 0; i < m; ++i) {
    eye.data()[static_cast<size_t>(i * m + i)] = 1.0;
    off_diag.data()[static_cast<size_t>(i * m + i)] = 0.0;
  }
  // diag(S) as [m,1] via a constant mask and row sums
  const Tensor diag = matmul(mul(s, eye), Tensor::ones({m, 1}));
  const Tensor denom = logsumexp_rows(s, off_diag);
  return mean(add(diag, neg(denom)));
}

LossBundle assemble_losses(const Tensor& nce, const Tensor& reg,
                           double lambda_reg) {
  if (!nce.all_finite() || !reg.all_finite() || !std::isfinite(lambda_reg))
    throw std::invalid_argument("assemble_losses: non-finite input");
  if (lambda_reg < 0.0)
    throw std::invalid_argument("assemble_losses: lambda_reg must be >= 0");
  LossBundle b;
  b.nce = nce;
  b.reg = reg;
  b.lambda_reg = lambda_reg;
  b.encoder_loss = neg(nce);
  b.augmenter_loss = add(nce, mul(reg, Tensor::scalar(lambda_reg)));
  return b;
}

}  // namespace adgcl
