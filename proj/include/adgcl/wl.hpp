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

#ifndef ADGCL_WL_HPP
#define ADGCL_WL_HPP

#include <utility>
#include <vector>

#include "adgcl/graph.hpp"

namespace adgcl {

/// Result of iterative color refinement. Colors are dictionary ids: two nodes
/// share a color at round k iff their (own color, neighbor color multiset)
/// histories match. Signatures are only comparable across graphs when they
/// were produced with a shared dictionary (see wl_equivalent).
struct WlColoring {
  std::vector<std::vector<int>> rounds;  // rounds[k][v] = color of v at round k
  int stable_round = 0;                  // first round with no new refinement
  std::vector<std::pair<int, Index>> signature;  // sorted (color, count) of final round
};

/// Refines node colors until the number of color classes stops growing or
/// `max_rounds` is reached. Initial colors come from exact node_feat rows
/// (identical rows share a color); edge attributes are ignored.
WlColoring wl_refine(const Graph& g, int max_rounds);

/// True iff the two graphs get identical color histograms under joint
/// refinement with one shared color dictionary. Feature dims must match.
bool wl_equivalent(const Graph& g1, const Graph& g2);

}  // namespace adgcl

#endif  // ADGCL_WL_HPP
