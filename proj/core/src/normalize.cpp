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

#include "machop/normalize.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace machop {

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::kDefault: return "default";
    case Normalization::kNone: return "none";
    case Normalization::kCumulative: return "cumulative";
    case Normalization::kLocal: return "local";
  }
  return "none";
}

Normalization parse_normalization(std::string_view s) {
  if (s == "default") return Normalization::kDefault;
  if (s == "none") return Normalization::kNone;
  if (s == "cumulative") return Normalization::kCumulative;
  if (s == "local") return Normalization::kLocal;
  throw std::invalid_argument("unknown normalization '" + std::string(s) + "'");
}

NormState NormState::make(Normalization mode, int num_features) {
  NormState n;
  n.mode = mode;
  n.ub.assign(num_features, 1.0);
  n.lb.assign(num_features, 0.0);
  return n;
}

NormState NormState::with_bounds(std::vector<double> ub, int num_features) {
  NormState n = make(Normalization::kDefault, num_features);
  if (static_cast<int>(ub.size()) != num_features) {
    throw std::invalid_argument("upper bounds must have one entry per feature");
  }
  for (int i = 0; i < num_features; ++i) {
    if (ub[i] - n.lb[i] <= 0.0) {
      std::clog << "warning: feature " << i << " has a zero normalization range; using raw scale\n";
      ub[i] = 1.0;
    }
  }
  n.ub = std::move(ub);
  return n;
}

std::vector<double> NormState::normalize(const FeatureVector& phi) const {
  std::vector<double> out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    out[i] = mode == Normalization::kNone ? phi[i] : (phi[i] - lb[i]) / (ub[i] - lb[i]);
  }
  return out;
}

void NormState::update(const FeatureVector& phi1, const FeatureVector& phi2) {
  for (std::size_t i = 0; i < ub.size(); ++i) {
    const double m = std::max(phi1[i], phi2[i]);
    if (mode == Normalization::kCumulative) ub[i] = std::max(ub[i], m);
    else if (mode == Normalization::kLocal) ub[i] = m > 0 ? m : 1.0;
  }
}

std::vector<double> approximate_upper_bounds(const std::vector<Instance>& problems) {
  std::vector<double> ub(kNumFeatures, 0.0);
  for (const Instance& inst : problems) {
    for (std::size_t d = 0; d < inst.solution.size(); ++d) {
      std::vector<Fact> given;
      for (std::size_t k = 0; k < inst.solution.size(); ++k) {
        if (k != d) given.push_back(inst.solution[k]);
      }
      const ExplContext ctx(inst.csp, std::move(given), inst.solution[d]);
      std::vector<int> items(ctx.num_items() - 1);
      std::iota(items.begin(), items.end(), 1);
      const FeatureVector phi = ctx.features(items);
      for (int i = 0; i < kNumFeatures; ++i) ub[i] = std::max<double>(ub[i], phi[i]);
    }
  }
  return ub;
}

}  // namespace machop
