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

#include <map>
#include <memory>
#include <optional>
#include <set>

#include "fedboost/data_io.hpp"
#include "fedboost/secagg.hpp"
#include "fedboost/simnet.hpp"
#include "fedboost/xgboost.hpp"

namespace fedboost {

constexpr uint32_t kServerId = 0;
constexpr uint32_t kCenterId = 0xffffffffu;  // trusted key generation center

/// When scheduled dropouts strike. Sharing-phase drops are refused for the
/// round (replaced from the standby pool when possible); aggregation-phase
/// drops vanish before sending their masked vector; reveal-phase drops vanish
/// after it, exercising the demotion/recovery path.
enum class DropPhase { Sharing, Aggregation, Reveal };

struct ProtocolConfig {
  uint32_t n_users = 4;
  uint32_t standby_users = 0;
  uint32_t threshold_t = 2;
  unsigned sec_param = 128;
  unsigned frac_bits = 40;
  bool reshare_per_tree = true;
  TrainConfig train;
  DropoutSchedule dropout;
  DropPhase drop_phase = DropPhase::Aggregation;
};

/// One simulated mobile user: local shard, two key pairs, stored foreign
/// shares, margins, and per-tree instance routing. All outbound data flows
/// through the bus.
class UserNode {
 public:
  UserNode(uint32_t index, const Dataset* data, std::vector<size_t> shard, Bus* bus,
           unsigned frac_bits);

  uint32_t index() const { return index_; }
  void handle(const Envelope& env);

  // Driven by the simulation in protocol order.
  void install_params(const GroupParams& gp);
  void generate_keys(Rng&& rng);
  void send_public_keys();
  void share_mask_key(uint32_t t, Rng&& rng);
  void begin_tree(double eta, double base_score);
  /// Synthetic input for aggregation-only sweeps.
  void set_bench_vector(std::vector<double> values);

  size_t stored_share_count() const { return stored_shares_.size(); }
  size_t peer_key_count() const { return peer_sk_pubs_.size(); }
  size_t synced_trees() const { return synced_trees_; }
  bool flagged(uint32_t peer) const { return flagged_senders_.count(peer) > 0; }
  const std::vector<size_t>& shard() const { return shard_; }

 private:
  friend class FedTrainer;
  std::vector<double> local_stat(uint32_t node, uint32_t stat) const;
  void respond_agg_request(const Envelope& env);
  void respond_active_list(const Envelope& env);
  void apply_split_decision(const Envelope& env);
  void ingest_tree(const Envelope& env);
  void store_share(const Envelope& env);

  uint32_t index_;
  const Dataset* data_;
  std::vector<size_t> shard_;
  Bus* bus_;
  unsigned frac_bits_;

  std::optional<GroupParams> params_;
  FixedPointConfig codec_;
  std::unique_ptr<Rng> rng_own_;
  KeyPair ek_, sk_;
  std::map<uint32_t, Bigint> peer_ek_pubs_;
  std::map<uint32_t, Bigint> peer_sk_pubs_;
  Bigint server_sk_pub_;
  MaskKeyring keyring_;
  bool keyring_ready_ = false;
  std::map<uint32_t, KeyShare> stored_shares_;  // owner -> my share
  std::set<uint32_t> flagged_senders_;
  uint32_t nonce_counter_ = 0;

  // Round-local aggregation scratch.
  std::vector<uint32_t> round_peers_;  // U for the pending invocation
  Bigint current_r_;
  std::map<uint32_t, std::vector<SplitCandidate>> node_candidates_;
  std::vector<double> bench_vector_;

  // Model-tracking state.
  std::vector<double> margins_;
  std::vector<GradientPair> gradients_;
  std::map<int, std::vector<size_t>> routing_;  // tree node -> shard offsets
  size_t synced_trees_ = 0;
  double eta_ = 0.3;
};

/// Server-side bookkeeping: key directory, the active aggregation, the model.
class ServerNode {
 public:
  explicit ServerNode(Bus* bus) : bus_(bus) {}
  void handle(const Envelope& env);

  Bus* bus_;
  std::optional<GroupParams> params_;
  KeyPair sk_;
  uint32_t threshold_t = 1;
  std::map<uint32_t, std::pair<Bigint, Bigint>> directory_;  // idx -> (ek_pub, sk_pub)
  std::unique_ptr<AggregationState> agg_;
  std::map<uint32_t, std::vector<KeyShare>> response_shares_;
  BoostModel model_;
};

/// Outcome of one split-finding round on a leaf.
struct RoundOutcome {
  std::optional<SplitCandidate> chosen;
  double score = 0.0;
  LeafStats totals;                        // aggregated (W, H)
  std::vector<SplitCandidate> candidates;  // evaluated candidates, sorted
  std::vector<double> w_left, h_left;      // aggregated left sums per candidate
  std::vector<uint32_t> dropped_this_round;
};

/// Drives Setup, Mask Key Sharing and Split Finding over the simulated bus,
/// one boosting round per tree.
class FedTrainer {
 public:
  FedTrainer(const Dataset* data, const Partition& shards, const ProtocolConfig& cfg,
             uint64_t seed);

  /// Runs `cfg.train.rounds` boosting rounds and returns the published model.
  BoostModel train(TrainLog* log = nullptr, std::span<const SparseRow> eval_rows = {},
                   std::span<const int> eval_labels = {});

  Bus& bus() { return bus_; }
  const GroupParams& params() const { return params_; }
  unsigned aborted_rounds() const { return aborted_rounds_; }
  const std::vector<uint32_t>& registered() const { return registered_; }
  UserNode& user(uint32_t idx) { return *users_.at(idx); }

  /// One secure aggregation over the current user set; exposed for the
  /// aggregation-level sweeps. `values` maps user index -> input vector.
  std::vector<double> run_secagg_once(const std::map<uint32_t, std::vector<double>>& values);

  /// One complete split-finding round on the root of a fresh tree. Exposed
  /// for protocol-level tests; train() runs the same flow through grow_tree.
  RoundOutcome run_split_finding(Rng& grow_rng);

 private:
  friend class FedStatProvider;

  void setup_round(unsigned tree_round);
  void run_setup();
  void run_mask_key_sharing();
  void apply_scheduled_drops(unsigned tree_round, DropPhase phase);
  std::vector<double> run_secagg(uint32_t node, uint32_t stat, size_t expected_m);
  void publish_candidates(uint32_t node, std::span<const SplitCandidate> candidates);
  void publish_split(uint32_t node, const SplitCandidate& split, int left, int right);
  void publish_tree(const CartTree& tree);
  void sync_user_trees();

  const Dataset* data_;
  ProtocolConfig cfg_;
  Rng master_;
  Bus bus_;
  GroupParams params_;
  FixedPointConfig codec_;
  std::map<uint32_t, std::unique_ptr<UserNode>> users_;
  ServerNode server_;

  std::vector<uint32_t> registered_;       // U for the current tree round
  std::vector<uint32_t> pending_drops_;    // scheduled, not yet applied
  DropPhase pending_phase_ = DropPhase::Aggregation;
  std::set<uint32_t> permanently_dropped_;
  bool keys_ready_ = false;
  bool burned_keys_ = false;  // some private mask key was recovered server-side
  uint32_t invocation_ = 0;
  unsigned aborted_rounds_ = 0;
};

}  // namespace fedboost
