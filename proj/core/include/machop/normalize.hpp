// Copyright 2026 The machop Authors.
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

#ifndef MACHOP_NORMALIZE_HPP_
#define MACHOP_NORMALIZE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "machop/explain.hpp"

namespace machop {

enum class Normalization { kDefault, kNone, kCumulative, kLocal };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view s);  // throws std::invalid_argument

// Per-feature scaling of the feature vectors seen by the learner.
struct NormState {
  Normalization mode = Normalization::kNone;
  std::vector<double> ub;
  std::vector<double> lb;

  static NormState make(Normalization mode, int num_features = kNumFeatures);
  // Default mode with precomputed upper bounds. Features whose bound is not
  // above the lower bound fall back to the raw scale.
  static NormState with_bounds(std::vector<double> ub, int num_features = kNumFeatures);

  std::vector<double> normalize(const FeatureVector& phi) const;
  // Cumulative and Local modes: fold in a freshly generated pair.
  void update(const FeatureVector& phi1, const FeatureVector& phi2);
};

// Approximate per-feature upper bounds for the Default mode: for every
// solution state that leaves exactly one decision variable open, the feature
// counts of the full candidate set (all known facts and all groups).
std::vector<double> approximate_upper_bounds(const std::vector<Instance>& problems);

}  // namespace machop

#endif  // MACHOP_NORMALIZE_HPP_
