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

#include "machop/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace machop {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::kLeft: return "left";
    case Label::kRight: return "right";
    case Label::kIndifferent: return "indifferent";
  }
  return "indifferent";
}

Label parse_label(std::string_view s) {
  if (s == "left") return Label::kLeft;
  if (s == "right") return Label::kRight;
  if (s == "indifferent") return Label::kIndifferent;
  throw std::invalid_argument("unknown label '" + std::string(s) + "'");
}

std::vector<double> sample_true_weights(std::uint64_t seed, int num_features) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> exponent(-2.0, 2.0);
  std::vector<double> w(num_features);
  for (double& x : w) x = std::pow(10.0, exponent(rng));
  return w;
}

OracleUser::OracleUser(std::vector<double> w_star, double beta, double mislabel_rate,
                       std::uint64_t response_seed)
    : w_star_(std::move(w_star)), beta_(beta), mislabel_rate_(mislabel_rate), rng_(response_seed) {
  if (!(beta_ > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(mislabel_rate_ >= 0.0 && mislabel_rate_ < 0.5)) {
    throw std::invalid_argument("mislabel rate must lie in [0, 0.5)");
  }
}

OracleUser OracleUser::sample(std::uint64_t weight_seed, std::uint64_t response_seed, double beta,
                              double mislabel_rate) {
  return OracleUser(sample_true_weights(weight_seed), beta, mislabel_rate, response_seed);
}

double OracleUser::utility(const FeatureVector& phi) const { return machop::utility(w_star_, {}, phi); }

double OracleUser::indifference_probability(const FeatureVector& phi1,
                                            const FeatureVector& phi2) const {
  return std::exp(-beta_ * std::abs(utility(phi2) - utility(phi1)));
}

Label OracleUser::respond(const FeatureVector& phi1, const FeatureVector& phi2) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double f1 = utility(phi1), f2 = utility(phi2);
  if (unit(rng_) < std::exp(-beta_ * std::abs(f2 - f1))) return Label::kIndifferent;
  Label pick = f1 < f2 ? Label::kLeft : Label::kRight;
  if (unit(rng_) < mislabel_rate_) pick = pick == Label::kLeft ? Label::kRight : Label::kLeft;
  return pick;
}

}  // namespace machop
