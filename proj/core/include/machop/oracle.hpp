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

// Simulated users answering pairwise queries.

#ifndef MACHOP_ORACLE_HPP_
#define MACHOP_ORACLE_HPP_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "machop/explain.hpp"

namespace machop {

enum class Label { kLeft, kRight, kIndifferent };

std::string_view to_string(Label l);
Label parse_label(std::string_view s);  // throws std::invalid_argument

// Each weight is 10^j with j uniform on [-2, 2].
std::vector<double> sample_true_weights(std::uint64_t seed, int num_features = kNumFeatures);

class OracleUser {
 public:
  OracleUser(std::vector<double> w_star, double beta, double mislabel_rate,
             std::uint64_t response_seed);

  static OracleUser sample(std::uint64_t weight_seed, std::uint64_t response_seed,
                           double beta = 1.0, double mislabel_rate = 0.1);

  const std::vector<double>& w_star() const { return w_star_; }
  double beta() const { return beta_; }
  double mislabel_rate() const { return mislabel_rate_; }

  // Utility of raw features under the true weights (lower is better).
  double utility(const FeatureVector& phi) const;
  double indifference_probability(const FeatureVector& phi1, const FeatureVector& phi2) const;

  Label respond(const FeatureVector& phi1, const FeatureVector& phi2);

 private:
  std::vector<double> w_star_;
  double beta_;
  double mislabel_rate_;
  std::mt19937_64 rng_;
};

}  // namespace machop

#endif  // MACHOP_ORACLE_HPP_
