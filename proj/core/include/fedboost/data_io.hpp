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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fedboost/bignum.hpp"
#include "fedboost/row.hpp"
#include "fedboost/xgboost.hpp"

namespace fedboost {

struct Dataset {
  std::vector<SparseRow> rows;
  std::vector<int> labels;  // {0,1} binary, 0..9 multiclass
  uint32_t n_features = 0;
  int n_classes = 2;
  std::vector<FeatureDomain> feature_domains;  // public manifest for binning
  std::string name;
};

/// "label idx:val ..." with libsvm's 1-based indices kept as feature ids.
/// Labels -1/+1 are mapped to 0/1. Throws ParseError with the line number on
/// malformed input.
Dataset load_libsvm(const std::string& path);
void save_libsvm(const Dataset& ds, const std::string& path);

/// Header row required; `label_column` names the label. Non-numeric cells
/// raise ParseError naming row and column.
Dataset load_csv(const std::string& path, const std::string& label_column);

/// IDX image/label pair (magic 0x803 / 0x801); pixels scale to [0,1].
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path);

/// Recomputes min/max per feature over the dataset, including the implicit
/// zeros of sparse rows.
std::vector<FeatureDomain> compute_feature_domains(const std::vector<SparseRow>& rows,
                                                   uint32_t n_features);

/// user id (1-based) -> disjoint row-index list; sizes differ by at most 1.
using Partition = std::map<uint32_t, std::vector<size_t>>;
Partition partition(size_t n_rows, uint32_t n_users, Rng& rng);

/// Seeded shuffle split; returns (train_ids, test_ids).
std::pair<std::vector<size_t>, std::vector<size_t>> train_test_split(size_t n_rows,
                                                                     double test_fraction,
                                                                     Rng& rng);

/// Deterministic census-like binary classification data: a handful of
/// continuous columns plus one-hot groups, labels from a noisy logistic
/// ground truth (roughly 1:3 positive rate).
Dataset generate_census_like(size_t rows, uint64_t seed);

}  // namespace fedboost
