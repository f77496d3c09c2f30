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

#ifndef ADGCL_COMPARISON_HPP
#define ADGCL_COMPARISON_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "adgcl/evaluation.hpp"
#include "adgcl/training.hpp"

namespace adgcl {

/// The adversarially trained model against its ablations: fixed and
/// validation-tuned variants, uniform random dropping, an untrained encoder
/// and the no-augmentation mode.
enum class MethodKind {
  kAdGclFix,   // fixed regularization weight (default 5)
  kAdGclOpt,   // weight tuned on validation over the 7-point grid
  kNadGclFix,  // uniform dropping at a fixed ratio
  kNadGclOpt,  // ratio tuned on validation over {0.1..0.9}
  kRu,         // randomly initialized untrained encoder
  kInfoMax,    // identity augmentation
};

struct MethodSpec {
  MethodKind kind = MethodKind::kAdGclFix;
  double lambda = 5.0;      // adgcl-fix
  double drop_ratio = 0.3;  // nadgcl-fix
  std::string display_name() const;
};

/// Parses "adgcl-fix", "adgcl-opt", "nadgcl-fix:<ratio>", "nadgcl-opt", "ru",
/// "infomax"; adgcl-fix accepts an optional ":<lambda>" suffix.
MethodSpec parse_method(const std::string& name);

inline constexpr std::array<double, 7> kLambdaGrid{0.1, 0.3, 0.5, 1.0,
                                                   2.0, 5.0, 10.0};
inline constexpr std::array<double, 9> kDropRatioGrid{0.1, 0.2, 0.3, 0.4, 0.5,
                                                      0.6, 0.7, 0.8, 0.9};

struct MethodResult {
  std::string name;
  std::string metric_name;
  double mean = 0.0;
  double stdev = 0.0;
  std::vector<double> per_seed;  // test metric per seed
  std::vector<double> chosen;    // tuned lambda/ratio per seed; empty for fixed
};

struct ComparisonReport {
  std::vector<MethodResult> methods;  // ranked best first
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> split_digests;  // per seed, shared by all methods
  std::string dataset_digest;
  std::string config_digest;
};

/// Trains and probes every method over all seeds on shared per-seed splits.
/// Classification data is scored by linear-probe accuracy, regression by RMSE.
ComparisonReport run_comparison(const std::vector<Graph>& dataset,
                                const std::vector<MethodSpec>& methods,
                                const std::vector<std::uint64_t>& seeds,
                                const TrainConfig& base);

void write_report_csv(const std::string& path, const ComparisonReport& report);
void write_report_text(const std::string& path, const ComparisonReport& report);

std::uint64_t fnv1a64(const void* data, size_t len);

}  // namespace adgcl

#endif  // ADGCL_COMPARISON_HPP
