// Copyright 2026 The tokscope Authors.
//
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

#ifndef TOKSCOPE_PROBABILITY_MATRIX_H_
#define TOKSCOPE_PROBABILITY_MATRIX_H_

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tokscope {

// Square matrix of win probabilities P(row beats column) over named items.
// NaN marks an uncompared pair; the diagonal is 0.5 by convention.
class ProbabilityMatrix {
 public:
  ProbabilityMatrix() = default;
  explicit ProbabilityMatrix(std::vector<std::string> names)
      : names_(std::move(names)),
        values_(names_.size() * names_.size(),
                std::numeric_limits<double>::quiet_NaN()) {
    for (std::size_t i = 0; i < size(); ++i) at(i, i) = 0.5;
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  double& at(std::size_t i, std::size_t j) { return values_[i * size() + j]; }
  double at(std::size_t i, std::size_t j) const {
    return values_[i * size() + j];
  }
  bool compared(std::size_t i, std::size_t j) const {
    return i != j && !std::isnan(at(i, j));
  }

  std::optional<std::size_t> IndexOf(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return i;
    }
    return std::nullopt;
  }

  // Sets P(i beats j) = p and P(j beats i) = 1 - p.
  void SetPair(std::size_t i, std::size_t j, double p) {
    at(i, j) = p;
    at(j, i) = 1.0 - p;
  }

  friend bool operator==(const ProbabilityMatrix& a,
                         const ProbabilityMatrix& b) {
    if (a.names_ != b.names_) return false;
    for (std::size_t k = 0; k < a.values_.size(); ++k) {
      const double x = a.values_[k], y = b.values_[k];
      if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
    }
    return true;
  }

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

}  // namespace tokscope

#endif  // TOKSCOPE_PROBABILITY_MATRIX_H_
