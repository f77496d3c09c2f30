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

#ifndef ADGCL_OBJECTIVES_HPP
#define ADGCL_OBJECTIVES_HPP

#include "adgcl/tensor.hpp"

namespace adgcl {

/// Projected anchors (z1) and augmented views (z2), one row per graph.
struct ContrastivePair {
  Tensor z1, z2;
};

/// S[i][j] = <z1_i, z2_j> / (|z1_i| |z2_j|). Rows with norm below 1e-12 are an
/// error (a collapsed projection is worth surfacing, not papering over).
Tensor cosine_similarity_matrix(const Tensor& z1, const Tensor& z2);

/// Contrastive mutual-information estimate over a minibatch of m >= 2 pairs:
///   (1/m) sum_i [ S[i][i] - log sum_{i' != i} exp(S[i][i']) ].
/// The denominator excludes the positive pair, so the value is bounded by the
/// cosine range: |I| <= 2 + |log(m-1)| rather than log m.
Tensor info_nce(const ContrastivePair& pair);

/// The two optimization targets of the alternating min-max loop, both written
/// as losses to descend:
///   encoder_loss   = -nce                 (encoder/head maximize the estimate)
///   augmenter_loss = nce + lambda * reg   (augmenter minimizes it, and large
///                                          lambda pushes the drop ratio down)
struct LossBundle {
  Tensor nce;       // scalar estimate
  Tensor reg;       // batch-mean expected drop ratio
  Tensor encoder_loss;
  Tensor augmenter_loss;
  double lambda_reg = 0.0;
};

LossBundle assemble_losses(const Tensor& nce, const Tensor& reg, double lambda_reg);

}  // namespace adgcl

#endif  // ADGCL_OBJECTIVES_HPP
