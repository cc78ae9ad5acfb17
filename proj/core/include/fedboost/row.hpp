/*
 * Copyright 2026 the fedboost authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace fedboost {

/// Sparse feature vector; absent indices read as 0 (the libsvm convention).
struct SparseRow {
  std::vector<std::pair<uint32_t, double>> values;  // sorted by feature index

  double value_or_zero(uint32_t feature) const {
    auto it = std::lower_bound(values.begin(), values.end(), feature,
                               [](const auto& kv, uint32_t f) { return kv.first < f; });
    return (it != values.end() && it->first == feature) ? it->second : 0.0;
  }

  void set(uint32_t feature, double v) {
    auto it = std::lower_bound(values.begin(), values.end(), feature,
                               [](const auto& kv, uint32_t f) { return kv.first < f; });
    if (it != values.end() && it->first == feature) {
      it->second = v;
    } else {
      values.insert(it, {feature, v});
    }
  }
};

}  // namespace fedboost
