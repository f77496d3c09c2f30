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

#ifndef ADGCL_CHECKPOINT_HPP
#define ADGCL_CHECKPOINT_HPP

#include <map>
#include <string>

#include "adgcl/augmenter.hpp"
#include "adgcl/encoder.hpp"

namespace adgcl {

/// JSON container of named float arrays with shapes. Keys follow the
/// parameter naming used throughout ("encoder.layer0.w1", "head.w2",
/// "augmenter.gnn.input.w", ...). Round trips are value exact.
void save_checkpoint(const std::string& path, const NamedTensorCRefs& arrays);

std::map<std::string, Tensor> load_checkpoint(const std::string& path);

// Typed wrappers. Loading validates that every expected key is present with a
// matching shape and reports the offending key otherwise.
void save_encoder(const std::string& path, const EncoderParams& p);
void save_head(const std::string& path, const HeadParams& p);
void save_augmenter(const std::string& path, const AugmenterParams& p);

EncoderParams load_encoder(const std::string& path);
HeadParams load_head(const std::string& path);
AugmenterParams load_augmenter(const std::string& path);

}  // namespace adgcl

#endif  // ADGCL_CHECKPOINT_HPP
