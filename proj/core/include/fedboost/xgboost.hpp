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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedboost/bignum.hpp"
#include "fedboost/row.hpp"

namespace fedboost {

struct GradientPair {
  double w = 0;  // first-order derivative of the loss
  double h = 0;  // second-order derivative, >= 0 for convex losses
};

double sigmoid(double z);

/// Binary logistic loss: p = sigmoid(margin), w = p - y, h = p(1-p).
GradientPair logistic_gradients(double prediction_margin, int label);

double logistic_loss(double prediction_margin, int label);

/// Gain of partitioning aggregated gradients (W,H) into (W_L,H_L)/(W_R,H_R):
///   1/2 * (W_L^2/(H_L+l) + W_R^2/(H_R+l) - (W_L+W_R)^2/(H_L+H_R+l)).
double split_score(double w_left, double h_left, double w_right, double h_right, double lambda);

/// Leaf output -W/(H+lambda).
double leaf_weight(double w_sum, double h_sum, double lambda);

struct SplitCandidate {
  uint32_t feature = 0;
  double threshold = 0;
};

struct FeatureDomain {
  double lo = 0;
  double hi = 0;
};

/// `bins` equally spaced interior thresholds per feature; degenerate domains
/// (lo == hi) produce an empty list and are recorded in `skipped`.
struct CandidateEnumeration {
  std::vector<std::vector<double>> thresholds;  // per input feature
  std::vector<uint32_t> skipped;
};
CandidateEnumeration enumerate_candidates(std::span<const FeatureDomain> domains, unsigned bins);

struct CartNode {
  int32_t left = -1;  // -1 on both children marks a leaf
  int32_t right = -1;
  uint32_t feature = 0;
  double threshold = 0;
  double weight = 0;
  bool is_leaf() const { return left < 0; }
};

struct CartTree {
  std::vector<CartNode> nodes;
};

/// Routing: value < threshold goes left; a NaN value follows default_left.
double tree_value(const CartTree& tree, const SparseRow& x, bool default_left = true);

struct BoostModel {
  std::vector<CartTree> trees;
  double learning_rate = 0.3;
  double base_score = 0.0;
};

double predict_margin(const BoostModel& model, const SparseRow& x);
double accuracy(const BoostModel& model, std::span<const SparseRow> rows,
                std::span<const int> labels);
double mean_loss(const BoostModel& model, std::span<const SparseRow> rows,
                 std::span<const int> labels);

/// Human-readable tree dump; the byte-level diff surface between federated
/// and centralized runs. Thresholds print at full precision, weights at the
/// published 1e-6 quantum.
std::string format_tree(const CartTree& tree, size_t index);
std::string format_model(const BoostModel& model);
CartTree parse_tree(const std::string& dump);
BoostModel parse_model(const std::string& dump);

/// Rounds leaf weights to the dump quantum so in-memory models match their
/// published form.
void quantize_weights(CartTree& tree);

struct GrowthConfig {
  unsigned max_depth = 3;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_hessian = 1.0;
  unsigned bins = 16;
  double feature_subsample = 1.0;
};

struct LeafStats {
  double w = 0;
  double h = 0;
};

/// Source of aggregated gradient statistics during tree growth. The grower
/// is shared between the centralized trainer and the federated protocol;
/// providers differ only in where the sums come from.
class SplitStatProvider {
 public:
  virtual ~SplitStatProvider() = default;
  /// Aggregated (W, H) over instances routed to `node`.
  virtual LeafStats node_totals(int node_id) = 0;
  /// Per-candidate left-child sums, aligned with `candidates`.
  virtual std::pair<std::vector<double>, std::vector<double>> left_sums(
      int node_id, std::span<const SplitCandidate> candidates) = 0;
  /// Observers learn the chosen split so they can keep routing instances.
  virtual void apply_split(int node_id, const SplitCandidate& split, int left_id,
                           int right_id) = 0;
};

/// Level-wise greedy growth. Feature subsets come from `grow_rng`, so two
/// runs with equal seeds and domains enumerate identical candidates. A
/// RoundAbort from the provider finalizes the tree at its finished depth.
CartTree grow_tree(const GrowthConfig& cfg, std::span<const FeatureDomain> domains, Rng& grow_rng,
                   SplitStatProvider& provider);

struct SplitChoice {
  int index = -1;
  double score = 0.0;
};

/// argmax of split_score over candidates, gated by gamma and the min-child
/// hessian. Ties keep the first (lowest feature, then threshold) candidate.
/// nullopt when no candidate clears the gates — the leaf is final.
std::optional<SplitChoice> choose_split(const LeafStats& totals,
                                        std::span<const SplitCandidate> candidates,
                                        std::span<const double> w_left,
                                        std::span<const double> h_left, const GrowthConfig& cfg);

/// Shared helper: per-candidate left sums of (w, h) for a set of rows.
/// `candidates` must be sorted by (feature, threshold).
void accumulate_left_sums(std::span<const SparseRow* const> rows,
                          std::span<const GradientPair> gradients,
                          std::span<const SplitCandidate> candidates, std::span<double> w_left,
                          std::span<double> h_left);

/// Sorted flat candidate list for the sampled features.
std::vector<SplitCandidate> flatten_candidates(std::span<const uint32_t> features,
                                               const CandidateEnumeration& enumeration);

struct TrainConfig {
  GrowthConfig growth;
  unsigned rounds = 10;
  double eta = 0.3;
  double base_score = 0.0;
};

struct TrainLog {
  std::vector<double> accuracy;  // per completed round, on the eval set
  std::vector<double> loss;
};

/// Plaintext greedy trainer over pooled rows: the no-crypto oracle the
/// federated runs are compared against.
BoostModel centralized_train(std::span<const SparseRow> rows, std::span<const int> labels,
                             std::span<const FeatureDomain> domains, const TrainConfig& cfg,
                             const Rng& master_rng, TrainLog* log = nullptr,
                             std::span<const SparseRow> eval_rows = {},
                             std::span<const int> eval_labels = {});

/// One-vs-rest stack of binary models for 0..n_classes-1 labels.
struct MulticlassModel {
  std::vector<BoostModel> per_class;
};
MulticlassModel train_one_vs_rest(std::span<const SparseRow> rows, std::span<const int> labels,
                                  int n_classes, std::span<const FeatureDomain> domains,
                                  const TrainConfig& cfg, const Rng& master_rng);
int predict_class(const MulticlassModel& model, const SparseRow& x);
double multiclass_accuracy(const MulticlassModel& model, std::span<const SparseRow> rows,
                           std::span<const int> labels);

}  // namespace fedboost
