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
#include "fedboost/xgboost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>

#include "fedboost/errors.hpp"

namespace fedboost {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

GradientPair logistic_gradients(double prediction_margin, int label) {
  if (label != 0 && label != 1) throw DomainError("logistic_gradients: label must be 0 or 1");
  double p = sigmoid(prediction_margin);
  return GradientPair{p - label, p * (1.0 - p)};
}

double logistic_loss(double prediction_margin, int label) {
  double p = sigmoid(prediction_margin);
  constexpr double eps = 1e-15;
  p = std::min(1.0 - eps, std::max(eps, p));
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

double split_score(double w_left, double h_left, double w_right, double h_right, double lambda) {
  double total_w = w_left + w_right;
  double total_h = h_left + h_right;
  return 0.5 * (w_left * w_left / (h_left + lambda) + w_right * w_right / (h_right + lambda) -
                total_w * total_w / (total_h + lambda));
}

double leaf_weight(double w_sum, double h_sum, double lambda) {
  return -w_sum / (h_sum + lambda);
}

CandidateEnumeration enumerate_candidates(std::span<const FeatureDomain> domains, unsigned bins) {
  if (bins < 1) throw DomainError("enumerate_candidates: bins must be >= 1");
  CandidateEnumeration out;
  out.thresholds.resize(domains.size());
  for (size_t f = 0; f < domains.size(); ++f) {
    const FeatureDomain& d = domains[f];
    if (!(d.lo < d.hi)) {
      out.skipped.push_back(static_cast<uint32_t>(f));
      continue;
    }
    double step = (d.hi - d.lo) / (bins + 1);
    out.thresholds[f].reserve(bins);
    for (unsigned i = 1; i <= bins; ++i) out.thresholds[f].push_back(d.lo + step * i);
  }
  return out;
}

double tree_value(const CartTree& tree, const SparseRow& x, bool default_left) {
  if (tree.nodes.empty()) return 0.0;
  const CartNode* node = &tree.nodes[0];
  while (!node->is_leaf()) {
    double v = x.value_or_zero(node->feature);
    bool go_left = std::isnan(v) ? default_left : v < node->threshold;
    node = &tree.nodes[go_left ? node->left : node->right];
  }
  return node->weight;
}

double predict_margin(const BoostModel& model, const SparseRow& x) {
  double sum = 0;
  for (const CartTree& t : model.trees) sum += tree_value(t, x);
  return model.base_score + model.learning_rate * sum;
}

double accuracy(const BoostModel& model, std::span<const SparseRow> rows,
                std::span<const int> labels) {
  if (rows.empty()) return 0.0;
  size_t hits = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    int pred = sigmoid(predict_margin(model, rows[i])) > 0.5 ? 1 : 0;
    if (pred == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / rows.size();
}

double mean_loss(const BoostModel& model, std::span<const SparseRow> rows,
                 std::span<const int> labels) {
  if (rows.empty()) return 0.0;
  double sum = 0;
  for (size_t i = 0; i < rows.size(); ++i) sum += logistic_loss(predict_margin(model, rows[i]), labels[i]);
  return sum / rows.size();
}

namespace {

constexpr const char* kWeightFormat = "%.6f";

double quantize_one(double w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, kWeightFormat, w);
  return std::strtod(buf, nullptr);
}

}  // namespace

void quantize_weights(CartTree& tree) {
  for (CartNode& n : tree.nodes) {
    if (n.is_leaf()) n.weight = quantize_one(n.weight);
  }
}

std::string format_tree(const CartTree& tree, size_t index) {
  std::string out;
  char line[192];
  std::snprintf(line, sizeof line, "tree %zu nodes=%zu\n", index, tree.nodes.size());
  out += line;
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const CartNode& n = tree.nodes[i];
    if (n.is_leaf()) {
      std::snprintf(line, sizeof line, "  %zu leaf weight=%.6f\n", i, n.weight);
    } else {
      std::snprintf(line, sizeof line, "  %zu split feature=%u threshold=%.17g left=%d right=%d\n",
                    i, n.feature, n.threshold, n.left, n.right);
    }
    out += line;
  }
  return out;
}

std::string format_model(const BoostModel& model) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "booster trees=%zu eta=%.17g base=%.17g\n", model.trees.size(),
                model.learning_rate, model.base_score);
  out += line;
  for (size_t i = 0; i < model.trees.size(); ++i) out += format_tree(model.trees[i], i);
  return out;
}

CartTree parse_tree(const std::string& dump) {
  std::istringstream in(dump);
  std::string line;
  if (!std::getline(in, line) || line.rfind("tree ", 0) != 0) {
    throw ParseError("tree dump: missing header");
  }
  size_t index, count;
  if (std::sscanf(line.c_str(), "tree %zu nodes=%zu", &index, &count) != 2) {
    throw ParseError("tree dump: bad header");
  }
  CartTree tree;
  tree.nodes.resize(count);
  for (size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw ParseError("tree dump: truncated");
    size_t id;
    CartNode node;
    if (line.find(" leaf ") != std::string::npos) {
      if (std::sscanf(line.c_str(), " %zu leaf weight=%lf", &id, &node.weight) != 2) {
        throw ParseError("tree dump: bad leaf line");
      }
    } else {
      if (std::sscanf(line.c_str(), " %zu split feature=%u threshold=%lg left=%d right=%d", &id,
                      &node.feature, &node.threshold, &node.left, &node.right) != 5) {
        throw ParseError("tree dump: bad split line");
      }
    }
    if (id >= count) throw ParseError("tree dump: node id out of range");
    tree.nodes[id] = node;
  }
  return tree;
}

BoostModel parse_model(const std::string& dump) {
  std::istringstream in(dump);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("model dump: empty");
  BoostModel model;
  size_t trees = 0;
  if (std::sscanf(line.c_str(), "booster trees=%zu eta=%lg base=%lg", &trees,
                  &model.learning_rate, &model.base_score) != 3) {
    throw ParseError("model dump: bad header");
  }
  std::string block;
  for (size_t t = 0; t < trees; ++t) {
    block.clear();
    if (!std::getline(in, line) || line.rfind("tree ", 0) != 0) {
      throw ParseError("model dump: missing tree header");
    }
    size_t index, count;
    if (std::sscanf(line.c_str(), "tree %zu nodes=%zu", &index, &count) != 2) {
      throw ParseError("model dump: bad tree header");
    }
    block = line + "\n";
    for (size_t i = 0; i < count; ++i) {
      if (!std::getline(in, line)) throw ParseError("model dump: truncated tree");
      block += line + "\n";
    }
    model.trees.push_back(parse_tree(block));
  }
  return model;
}

void accumulate_left_sums(std::span<const SparseRow* const> rows,
                          std::span<const GradientPair> gradients,
                          std::span<const SplitCandidate> candidates, std::span<double> w_left,
                          std::span<double> h_left) {
  if (candidates.empty()) return;
  std::fill(w_left.begin(), w_left.end(), 0.0);
  std::fill(h_left.begin(), h_left.end(), 0.0);
  size_t group_start = 0;
  while (group_start < candidates.size()) {
    uint32_t feature = candidates[group_start].feature;
    size_t group_end = group_start;
    while (group_end < candidates.size() && candidates[group_end].feature == feature) ++group_end;
    // Bucket each row at the first threshold above its value, then prefix-sum:
    // candidate j's left child contains every row with value < threshold_j.
    for (size_t r = 0; r < rows.size(); ++r) {
      double v = rows[r]->value_or_zero(feature);
      size_t k = group_start;
      while (k < group_end && !(candidates[k].threshold > v)) ++k;
      if (k < group_end) {
        w_left[k] += gradients[r].w;
        h_left[k] += gradients[r].h;
      }
    }
    for (size_t j = group_start + 1; j < group_end; ++j) {
      w_left[j] += w_left[j - 1];
      h_left[j] += h_left[j - 1];
    }
    group_start = group_end;
  }
}

std::vector<SplitCandidate> flatten_candidates(std::span<const uint32_t> features,
                                               const CandidateEnumeration& enumeration) {
  std::vector<SplitCandidate> flat;
  for (uint32_t f : features) {
    if (f >= enumeration.thresholds.size()) continue;
    for (double thr : enumeration.thresholds[f]) flat.push_back(SplitCandidate{f, thr});
  }
  return flat;
}

std::optional<SplitChoice> choose_split(const LeafStats& totals,
                                        std::span<const SplitCandidate> candidates,
                                        std::span<const double> w_left,
                                        std::span<const double> h_left,
                                        const GrowthConfig& cfg) {
  int best = -1;
  double best_score = cfg.gamma;
  for (size_t c = 0; c < candidates.size(); ++c) {
    double wl = w_left[c], hl = h_left[c];
    double wr = totals.w - wl, hr = totals.h - hl;
    if (hl < cfg.min_child_hessian || hr < cfg.min_child_hessian) continue;
    double score = split_score(wl, hl, wr, hr, cfg.lambda);
    // Strict comparison keeps the first (lowest feature, threshold) candidate
    // on ties.
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(c);
    }
  }
  if (best < 0) return std::nullopt;
  return SplitChoice{best, best_score};
}

CartTree grow_tree(const GrowthConfig& cfg, std::span<const FeatureDomain> domains, Rng& grow_rng,
                   SplitStatProvider& provider) {
  CartTree tree;
  tree.nodes.push_back(CartNode{});
  CandidateEnumeration enumeration = enumerate_candidates(domains, cfg.bins);

  struct Pending {
    int node = 0;
    unsigned depth = 0;
    bool has_stats = false;
    LeafStats stats;
  };
  std::vector<Pending> current{Pending{0, 0, false, {}}};
  std::vector<Pending> next;

  uint32_t n_features = static_cast<uint32_t>(domains.size());
  uint32_t sample_count =
      std::clamp<uint32_t>(static_cast<uint32_t>(std::llround(cfg.feature_subsample * n_features)),
                           n_features > 0 ? 1 : 0, n_features);

  auto finalize = [&](const Pending& p, const LeafStats& stats) {
    tree.nodes[p.node].weight = leaf_weight(stats.w, stats.h, cfg.lambda);
  };

  size_t abort_from = 0;
  bool aborted = false;
  while (!current.empty() && !aborted) {
    next.clear();
    for (size_t i = 0; i < current.size(); ++i) {
      Pending& pend = current[i];
      try {
        // Leaves at the depth cap take their aggregates from the parent's
        // split statistics; everything else re-aggregates at this node.
        LeafStats totals;
        if (pend.depth >= cfg.max_depth && pend.has_stats) {
          totals = pend.stats;
        } else {
          totals = provider.node_totals(pend.node);
        }
        if (pend.depth >= cfg.max_depth) {
          finalize(pend, totals);
          continue;
        }
        std::vector<uint32_t> sampled = grow_rng.sample_indices(n_features, sample_count);
        std::vector<SplitCandidate> candidates = flatten_candidates(sampled, enumeration);
        if (candidates.empty()) {
          finalize(pend, totals);
          continue;
        }
        auto [w_left, h_left] = provider.left_sums(pend.node, candidates);
        std::optional<SplitChoice> choice = choose_split(totals, candidates, w_left, h_left, cfg);
        if (!choice) {
          finalize(pend, totals);
          continue;
        }
        int best = choice->index;
        const SplitCandidate& chosen = candidates[best];
        int left_id = static_cast<int>(tree.nodes.size());
        int right_id = left_id + 1;
        tree.nodes.push_back(CartNode{});
        tree.nodes.push_back(CartNode{});
        CartNode& node = tree.nodes[pend.node];
        node.left = left_id;
        node.right = right_id;
        node.feature = chosen.feature;
        node.threshold = chosen.threshold;
        provider.apply_split(pend.node, chosen, left_id, right_id);
        LeafStats ls{w_left[best], h_left[best]};
        LeafStats rs{totals.w - ls.w, totals.h - ls.h};
        next.push_back(Pending{left_id, pend.depth + 1, true, ls});
        next.push_back(Pending{right_id, pend.depth + 1, true, rs});
      } catch (const RoundAbort&) {
        aborted = true;
        abort_from = i;
        break;
      }
    }
    if (aborted) {
      // Freeze the tree at its finished depth: every pending node becomes a
      // leaf using whatever aggregates its parent split produced.
      for (size_t i = abort_from; i < current.size(); ++i) {
        finalize(current[i], current[i].has_stats ? current[i].stats : LeafStats{});
      }
      for (const Pending& p : next) finalize(p, p.has_stats ? p.stats : LeafStats{});
      break;
    }
    std::swap(current, next);
  }
  return tree;
}

namespace {

/// Stat provider backed by pooled plaintext rows.
class CentralizedProvider final : public SplitStatProvider {
 public:
  CentralizedProvider(std::span<const SparseRow> rows, std::span<const GradientPair> gradients,
                      std::span<const size_t> row_ids)
      : rows_(rows), gradients_(gradients) {
    routing_[0].assign(row_ids.begin(), row_ids.end());
  }

  LeafStats node_totals(int node_id) override {
    LeafStats stats;
    for (size_t r : routing_[node_id]) {
      stats.w += gradients_[r].w;
      stats.h += gradients_[r].h;
    }
    return stats;
  }

  std::pair<std::vector<double>, std::vector<double>> left_sums(
      int node_id, std::span<const SplitCandidate> candidates) override {
    const std::vector<size_t>& ids = routing_[node_id];
    std::vector<const SparseRow*> ptrs;
    std::vector<GradientPair> grads;
    ptrs.reserve(ids.size());
    grads.reserve(ids.size());
    for (size_t r : ids) {
      ptrs.push_back(&rows_[r]);
      grads.push_back(gradients_[r]);
    }
    std::vector<double> wl(candidates.size()), hl(candidates.size());
    accumulate_left_sums(ptrs, grads, candidates, wl, hl);
    return {std::move(wl), std::move(hl)};
  }

  void apply_split(int node_id, const SplitCandidate& split, int left_id, int right_id) override {
    std::vector<size_t>& ids = routing_[node_id];
    std::vector<size_t>& left = routing_[left_id];
    std::vector<size_t>& right = routing_[right_id];
    for (size_t r : ids) {
      double v = rows_[r].value_or_zero(split.feature);
      (v < split.threshold ? left : right).push_back(r);
    }
    routing_.erase(node_id);
  }

 private:
  std::span<const SparseRow> rows_;
  std::span<const GradientPair> gradients_;
  std::map<int, std::vector<size_t>> routing_;
};

}  // namespace

BoostModel centralized_train(std::span<const SparseRow> rows, std::span<const int> labels,
                             std::span<const FeatureDomain> domains, const TrainConfig& cfg,
                             const Rng& master_rng, TrainLog* log,
                             std::span<const SparseRow> eval_rows,
                             std::span<const int> eval_labels) {
  if (rows.empty()) throw DomainError("centralized_train: empty dataset");
  BoostModel model;
  model.learning_rate = cfg.eta;
  model.base_score = cfg.base_score;
  std::vector<double> margins(rows.size(), cfg.base_score);
  std::vector<GradientPair> gradients(rows.size());
  std::vector<size_t> all_rows(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) all_rows[i] = i;

  for (unsigned round = 0; round < cfg.rounds; ++round) {
    for (size_t i = 0; i < rows.size(); ++i) {
      gradients[i] = logistic_gradients(margins[i], labels[i]);
    }
    CentralizedProvider provider(rows, gradients, all_rows);
    Rng grow_rng = master_rng.fork("tree:" + std::to_string(round));
    CartTree tree = grow_tree(cfg.growth, domains, grow_rng, provider);
    quantize_weights(tree);
    for (size_t i = 0; i < rows.size(); ++i) {
      margins[i] += cfg.eta * tree_value(tree, rows[i]);
    }
    model.trees.push_back(std::move(tree));
    if (log != nullptr) {
      std::span<const SparseRow> er = eval_rows.empty() ? rows : eval_rows;
      std::span<const int> el = eval_rows.empty() ? labels : eval_labels;
      log->accuracy.push_back(accuracy(model, er, el));
      log->loss.push_back(mean_loss(model, er, el));
    }
  }
  return model;
}

MulticlassModel train_one_vs_rest(std::span<const SparseRow> rows, std::span<const int> labels,
                                  int n_classes, std::span<const FeatureDomain> domains,
                                  const TrainConfig& cfg, const Rng& master_rng) {
  if (n_classes < 2) throw DomainError("train_one_vs_rest: need >= 2 classes");
  MulticlassModel model;
  std::vector<int> binary(labels.size());
  for (int cls = 0; cls < n_classes; ++cls) {
    for (size_t i = 0; i < labels.size(); ++i) binary[i] = labels[i] == cls ? 1 : 0;
    Rng sub = master_rng.fork("class:" + std::to_string(cls));
    model.per_class.push_back(centralized_train(rows, binary, domains, cfg, sub));
  }
  return model;
}

int predict_class(const MulticlassModel& model, const SparseRow& x) {
  int best = 0;
  double best_margin = 0;
  for (size_t cls = 0; cls < model.per_class.size(); ++cls) {
    double margin = predict_margin(model.per_class[cls], x);
    if (cls == 0 || margin > best_margin) {
      best_margin = margin;
      best = static_cast<int>(cls);
    }
  }
  return best;
}

double multiclass_accuracy(const MulticlassModel& model, std::span<const SparseRow> rows,
                           std::span<const int> labels) {
  if (rows.empty()) return 0.0;
  size_t hits = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (predict_class(model, rows[i]) == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / rows.size();
}

}  // namespace fedboost
