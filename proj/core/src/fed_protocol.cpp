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
#include "fedboost/fed_protocol.hpp"

#include <algorithm>
#include <cmath>

#include "fedboost/errors.hpp"
#include "fedboost/transport.hpp"
#include "fedboost/wire.hpp"

namespace fedboost {

namespace {

constexpr uint32_t kStatH = 0;
constexpr uint32_t kStatW = 1;
constexpr uint32_t kStatHLeft = 2;
constexpr uint32_t kStatWLeft = 3;
constexpr uint32_t kStatBench = 4;

std::vector<uint8_t> pack_share_list(std::span<const KeyShare> shares, size_t share_width) {
  std::vector<uint8_t> out;
  wire::put_u32(out, static_cast<uint32_t>(shares.size()));
  for (const KeyShare& s : shares) {
    wire::put_u32(out, s.owner);
    wire::put_u32(out, s.holder);
    wire::put_bigint(out, s.y, share_width);
  }
  return out;
}

std::vector<KeyShare> unpack_share_list(wire::Reader& r, size_t share_width) {
  uint32_t count = r.u32();
  std::vector<KeyShare> shares;
  shares.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    KeyShare s;
    s.owner = r.u32();
    s.holder = r.u32();
    s.x = s.holder;
    s.y = r.bigint(share_width);
    shares.push_back(std::move(s));
  }
  return shares;
}

}  // namespace

// ---------------------------------------------------------------------------
// UserNode

UserNode::UserNode(uint32_t index, const Dataset* data, std::vector<size_t> shard, Bus* bus,
                   unsigned frac_bits)
    : index_(index), data_(data), shard_(std::move(shard)), bus_(bus), frac_bits_(frac_bits) {}

void UserNode::install_params(const GroupParams& gp) {
  params_ = gp;
  codec_ = FixedPointConfig{frac_bits_, gp.N};
  keyring_ready_ = false;
}

void UserNode::set_bench_vector(std::vector<double> values) { bench_vector_ = std::move(values); }

void UserNode::generate_keys(Rng&& rng) {
  if (!params_) throw ProtocolIncomplete("user: params not installed");
  rng_own_ = std::make_unique<Rng>(std::move(rng));
  ek_ = key_gen(*params_, *rng_own_);
  sk_ = key_gen(*params_, *rng_own_);
  bus_->clock().charge_modexp(index_, bit_length(params_->ord_g), bit_length(params_->N2));
  bus_->clock().charge_modexp(index_, bit_length(params_->ord_g), bit_length(params_->N2));
  peer_ek_pubs_.clear();
  peer_sk_pubs_.clear();
  stored_shares_.clear();
  keyring_ready_ = false;
}

void UserNode::send_public_keys() {
  size_t eb = params_->element_bytes();
  std::vector<uint8_t> payload;
  wire::put_u32(payload, index_);
  wire::put_bigint(payload, ek_.pub, eb);
  wire::put_bigint(payload, sk_.pub, eb);
  bus_->send(index_, kServerId, MsgKind::PublicKeys, std::move(payload));
}

void UserNode::share_mask_key(uint32_t t, Rng&& rng) {
  const GroupParams& gp = *params_;
  std::vector<uint32_t> xs;
  xs.push_back(index_);
  for (const auto& [peer, pub] : peer_ek_pubs_) xs.push_back(peer);
  std::sort(xs.begin(), xs.end());
  std::vector<KeyShare> shares = share_at(sk_.pri, t, xs, gp.p, rng, index_);
  bus_->clock().charge_field_ops(index_, bit_length(gp.p),
                                 static_cast<uint64_t>(t) * shares.size());
  size_t sb = gp.share_bytes();
  for (const KeyShare& s : shares) {
    if (s.holder == index_) {
      stored_shares_[index_] = s;
      continue;
    }
    // c_{u,v} = Enc(<ek_{u,v}>, u || v || share)
    SymKey key = derive_sym_key(key_agree(gp, ek_.pri, peer_ek_pubs_.at(s.holder)));
    std::vector<uint8_t> body;
    wire::put_u32(body, index_);
    wire::put_u32(body, s.holder);
    wire::put_bigint(body, s.y, sb);
    auto nonce = make_nonce(bus_->round(), index_, nonce_counter_++);
    std::vector<uint8_t> blob = aead_encrypt(key, body, nonce);
    bus_->clock().charge_modexp(index_, bit_length(ek_.pri), bit_length(gp.N2));
    bus_->clock().charge_aead(index_, blob.size());
    bus_->send(index_, s.holder, MsgKind::EncShare, std::move(blob));
  }
}

void UserNode::begin_tree(double eta, double base_score) {
  eta_ = eta;
  if (margins_.empty()) margins_.assign(shard_.size(), base_score);
  gradients_.resize(shard_.size());
  for (size_t i = 0; i < shard_.size(); ++i) {
    gradients_[i] = logistic_gradients(margins_[i], data_->labels[shard_[i]]);
  }
  routing_.clear();
  std::vector<size_t>& root = routing_[0];
  root.resize(shard_.size());
  for (size_t i = 0; i < shard_.size(); ++i) root[i] = i;
  node_candidates_.clear();
}

std::vector<double> UserNode::local_stat(uint32_t node, uint32_t stat) const {
  if (stat == kStatBench) return bench_vector_;
  auto it = routing_.find(static_cast<int>(node));
  static const std::vector<size_t> kEmpty;
  const std::vector<size_t>& ids = it == routing_.end() ? kEmpty : it->second;
  if (stat == kStatH || stat == kStatW) {
    double sum = 0;
    for (size_t i : ids) sum += stat == kStatH ? gradients_[i].h : gradients_[i].w;
    return {sum};
  }
  auto cit = node_candidates_.find(node);
  if (cit == node_candidates_.end()) {
    throw ProtocolIncomplete("user: no candidates published for node");
  }
  const std::vector<SplitCandidate>& candidates = cit->second;
  std::vector<const SparseRow*> rows;
  std::vector<GradientPair> grads;
  rows.reserve(ids.size());
  grads.reserve(ids.size());
  for (size_t i : ids) {
    rows.push_back(&data_->rows[shard_[i]]);
    grads.push_back(gradients_[i]);
  }
  std::vector<double> wl(candidates.size()), hl(candidates.size());
  accumulate_left_sums(rows, grads, candidates, wl, hl);
  return stat == kStatHLeft ? hl : wl;
}

void UserNode::respond_agg_request(const Envelope& env) {
  wire::Reader r(env.payload);
  r.u32();  // invocation id
  uint32_t node = r.u32();
  uint32_t stat = r.u32();
  uint32_t count = r.u32();
  round_peers_.clear();
  for (uint32_t i = 0; i < count; ++i) round_peers_.push_back(r.u32());

  if (!keyring_ready_) {
    keyring_ = build_keyring(*params_, index_, sk_.pri, peer_sk_pubs_);
    bus_->clock().charge_modexp(index_, bit_length(sk_.pri),
                                bit_length(params_->N2) * keyring_.pairwise.size());
    keyring_ready_ = true;
  }

  std::vector<double> values = local_stat(node, stat);
  current_r_ = rng_own_->unit(params_->N);
  MaskedVector mv =
      mask_vector(values, current_r_, keyring_, round_peers_, server_sk_pub_, *params_, codec_);
  bus_->clock().charge_modexp(index_, 2 * bit_length(params_->N), bit_length(params_->N2));
  bus_->clock().charge_modmul(index_, bit_length(params_->N2), values.size());
  bus_->clock().charge_prf(index_, values.size() * round_peers_.size() + 1);

  size_t eb = params_->element_bytes();
  std::vector<uint8_t> payload;
  wire::put_u32(payload, index_);
  wire::put_u32(payload, static_cast<uint32_t>(mv.entries.size()));
  for (const Bigint& e : mv.entries) wire::put_bigint(payload, e, eb);
  bus_->send(index_, kServerId, MsgKind::MaskedVector, std::move(payload));
}

void UserNode::respond_active_list(const Envelope& env) {
  wire::Reader r(env.payload);
  uint32_t count = r.u32();
  std::vector<uint32_t> active;
  active.reserve(count);
  for (uint32_t i = 0; i < count; ++i) active.push_back(r.u32());

  SeedReveal sr = open_seed(*params_, index_, current_r_, round_peers_, active, stored_shares_);
  size_t eb = params_->element_bytes();
  std::vector<uint8_t> payload;
  wire::put_u32(payload, index_);
  wire::put_bigint(payload, sr.seed, eb);
  std::vector<uint8_t> shares = pack_share_list(sr.dropout_shares, params_->share_bytes());
  wire::put_bytes(payload, shares);
  bus_->send(index_, kServerId, MsgKind::SeedReveal, std::move(payload));
}

void UserNode::store_share(const Envelope& env) {
  const GroupParams& gp = *params_;
  auto pub_it = peer_ek_pubs_.find(env.from);
  if (pub_it == peer_ek_pubs_.end()) {
    flagged_senders_.insert(env.from);
    return;
  }
  SymKey key = derive_sym_key(key_agree(gp, ek_.pri, pub_it->second));
  bus_->clock().charge_aead(index_, env.payload.size());
  std::vector<uint8_t> body;
  try {
    body = aead_decrypt(key, env.payload);
  } catch (const AuthenticationFailure&) {
    flagged_senders_.insert(env.from);  // share rejected, sender flagged
    return;
  }
  wire::Reader r(body);
  uint32_t owner = r.u32();
  uint32_t holder = r.u32();
  Bigint y = r.bigint(gp.share_bytes());
  if (owner != env.from || holder != index_) {
    flagged_senders_.insert(env.from);
    return;
  }
  stored_shares_[owner] = KeyShare{owner, holder, holder, y};
}

void UserNode::apply_split_decision(const Envelope& env) {
  wire::Reader r(env.payload);
  int node = static_cast<int>(r.u32());
  uint32_t feature = r.u32();
  double threshold = r.f64();
  int left = static_cast<int>(r.u32());
  int right = static_cast<int>(r.u32());
  auto it = routing_.find(node);
  if (it == routing_.end()) return;
  std::vector<size_t> ids = std::move(it->second);
  routing_.erase(it);
  std::vector<size_t>& lrows = routing_[left];
  std::vector<size_t>& rrows = routing_[right];
  for (size_t i : ids) {
    double v = data_->rows[shard_[i]].value_or_zero(feature);
    (v < threshold ? lrows : rrows).push_back(i);
  }
}

void UserNode::ingest_tree(const Envelope& env) {
  wire::Reader r(env.payload);
  uint32_t tree_index = r.u32();
  uint32_t len = r.u32();
  std::vector<uint8_t> text = r.bytes(len);
  if (tree_index != synced_trees_) {
    throw ProtocolIncomplete("user: out-of-order tree publication");
  }
  CartTree tree = parse_tree(std::string(text.begin(), text.end()));
  for (size_t i = 0; i < shard_.size(); ++i) {
    margins_[i] += eta_ * tree_value(tree, data_->rows[shard_[i]]);
  }
  synced_trees_ = tree_index + 1;
}

void UserNode::handle(const Envelope& env) {
  switch (env.kind) {
    case MsgKind::Params: {
      GroupParams gp = GroupParams::deserialize(env.payload);
      install_params(gp);
      break;
    }
    case MsgKind::KeyDirectory: {
      wire::Reader r(env.payload);
      size_t eb = params_->element_bytes();
      uint32_t count = r.u32();
      peer_ek_pubs_.clear();
      peer_sk_pubs_.clear();
      for (uint32_t i = 0; i < count; ++i) {
        uint32_t idx = r.u32();
        Bigint ek = r.bigint(eb);
        Bigint sk = r.bigint(eb);
        if (idx == index_) continue;
        peer_ek_pubs_[idx] = ek;
        peer_sk_pubs_[idx] = sk;
      }
      server_sk_pub_ = r.bigint(eb);
      keyring_ready_ = false;
      break;
    }
    case MsgKind::EncShare:
      store_share(env);
      break;
    case MsgKind::Candidates: {
      wire::Reader r(env.payload);
      uint32_t node = r.u32();
      uint32_t count = r.u32();
      std::vector<SplitCandidate>& list = node_candidates_[node];
      list.clear();
      for (uint32_t i = 0; i < count; ++i) {
        SplitCandidate c;
        c.feature = r.u32();
        c.threshold = r.f64();
        list.push_back(c);
      }
      break;
    }
    case MsgKind::AggRequest:
      respond_agg_request(env);
      break;
    case MsgKind::ActiveList:
      respond_active_list(env);
      break;
    case MsgKind::ShareRequest: {
      wire::Reader r(env.payload);
      uint32_t count = r.u32();
      std::vector<KeyShare> found;
      for (uint32_t i = 0; i < count; ++i) {
        uint32_t owner = r.u32();
        auto it = stored_shares_.find(owner);
        if (it != stored_shares_.end()) found.push_back(it->second);
      }
      std::vector<uint8_t> payload;
      wire::put_u32(payload, index_);
      std::vector<uint8_t> shares = pack_share_list(found, params_->share_bytes());
      wire::put_bytes(payload, shares);
      bus_->send(index_, kServerId, MsgKind::ShareResponse, std::move(payload));
      break;
    }
    case MsgKind::SplitDecision:
      apply_split_decision(env);
      break;
    case MsgKind::TreePublish:
      ingest_tree(env);
      break;
    default:
      throw ProtocolIncomplete("user: unexpected message kind");
  }
}

// ---------------------------------------------------------------------------
// ServerNode

void ServerNode::handle(const Envelope& env) {
  switch (env.kind) {
    case MsgKind::Params: {
      params_ = GroupParams::deserialize(env.payload);
      break;
    }
    case MsgKind::PublicKeys: {
      wire::Reader r(env.payload);
      size_t eb = params_->element_bytes();
      uint32_t idx = r.u32();
      Bigint ek = r.bigint(eb);
      Bigint sk = r.bigint(eb);
      directory_[idx] = {ek, sk};
      break;
    }
    case MsgKind::MaskedVector: {
      if (!agg_) throw ProtocolIncomplete("server: no aggregation in progress");
      wire::Reader r(env.payload);
      size_t eb = params_->element_bytes();
      MaskedVector mv;
      mv.sender = r.u32();
      uint32_t m = r.u32();
      mv.entries.reserve(m);
      for (uint32_t i = 0; i < m; ++i) mv.entries.push_back(r.bigint(eb));
      agg_->add_vector(std::move(mv));
      break;
    }
    case MsgKind::SeedReveal: {
      if (!agg_) throw ProtocolIncomplete("server: no aggregation in progress");
      wire::Reader r(env.payload);
      SeedReveal sr;
      sr.sender = r.u32();
      sr.seed = r.bigint(params_->element_bytes());
      sr.dropout_shares = unpack_share_list(r, params_->share_bytes());
      agg_->add_reveal(std::move(sr));
      break;
    }
    case MsgKind::ShareResponse: {
      if (!agg_) throw ProtocolIncomplete("server: no aggregation in progress");
      wire::Reader r(env.payload);
      r.u32();  // sender
      for (KeyShare& s : unpack_share_list(r, params_->share_bytes())) {
        agg_->share_pool[s.owner].push_back(std::move(s));
      }
      break;
    }
    default:
      throw ProtocolIncomplete("server: unexpected message kind");
  }
}

// ---------------------------------------------------------------------------
// FedTrainer

FedTrainer::FedTrainer(const Dataset* data, const Partition& shards, const ProtocolConfig& cfg,
                       uint64_t seed)
    : data_(data), cfg_(cfg), master_(seed), server_(&bus_) {
  if (cfg_.threshold_t < 1 || cfg_.threshold_t > cfg_.n_users) {
    throw DomainError("protocol: need 1 <= t <= n_users");
  }
  Rng group_rng = master_.fork("group");
  params_ = generate_group(cfg_.sec_param, group_rng);
  codec_ = FixedPointConfig{cfg_.frac_bits, params_.N};
  unsigned guard = static_cast<unsigned>(bit_length(Bigint(data_->rows.size() + 1))) + 4;
  codec_.require_headroom(guard);

  bus_.register_entity(kServerId, [this](const Envelope& env) { server_.handle(env); });
  uint32_t total = cfg_.n_users + cfg_.standby_users;
  for (uint32_t u = 1; u <= total; ++u) {
    auto it = shards.find(u);
    std::vector<size_t> shard = it == shards.end() ? std::vector<size_t>{} : it->second;
    users_[u] = std::make_unique<UserNode>(u, data_, std::move(shard), &bus_, cfg_.frac_bits);
    uint32_t captured = u;
    bus_.register_entity(u, [this, captured](const Envelope& env) { users_[captured]->handle(env); });
  }
}

void FedTrainer::setup_round(unsigned tree_round) {
  // Rejoin everyone who is not permanently gone.
  uint32_t total = cfg_.n_users + cfg_.standby_users;
  for (uint32_t u = 1; u <= total; ++u) {
    bus_.set_dropped(u, permanently_dropped_.count(u) > 0);
  }
  std::vector<uint32_t> base;
  for (uint32_t u = 1; u <= cfg_.n_users; ++u) {
    if (!permanently_dropped_.count(u)) base.push_back(u);
  }

  Rng drop_rng = master_.fork("dropout:" + std::to_string(tree_round));
  pending_drops_ = cfg_.dropout.apply(tree_round, base, drop_rng);
  pending_phase_ = cfg_.drop_phase;

  registered_ = base;
  if (!pending_drops_.empty() && pending_phase_ == DropPhase::Sharing) {
    // Dropouts before/at mask key sharing are refused for this round and
    // replaced from the standby pool when possible.
    uint32_t next_standby = cfg_.n_users + 1;
    for (uint32_t u : pending_drops_) {
      registered_.erase(std::remove(registered_.begin(), registered_.end(), u),
                        registered_.end());
      bus_.set_dropped(u, true);
      if (cfg_.dropout.permanent) permanently_dropped_.insert(u);
      while (next_standby <= total &&
             (permanently_dropped_.count(next_standby) ||
              std::find(registered_.begin(), registered_.end(), next_standby) !=
                  registered_.end())) {
        ++next_standby;
      }
      if (next_standby <= total) registered_.push_back(next_standby++);
    }
    pending_drops_.clear();
  }
  std::sort(registered_.begin(), registered_.end());
}

void FedTrainer::run_setup() {
  std::vector<uint8_t> pub = params_.serialize_public();
  bus_.send(kCenterId, kServerId, MsgKind::Params, pub);
  for (uint32_t u : registered_) {
    bus_.send(kCenterId, u, MsgKind::Params, pub);
  }
  Rng server_rng = master_.fork("server:keys:" + std::to_string(bus_.round()));
  server_.sk_ = key_gen(params_, server_rng);
  server_.threshold_t = cfg_.threshold_t;
  bus_.clock().charge_modexp(kServerId, bit_length(params_.ord_g), bit_length(params_.N2));

  for (uint32_t u : registered_) {
    users_[u]->generate_keys(
        master_.fork("user:" + std::to_string(u) + ":keys:" + std::to_string(bus_.round())));
    users_[u]->send_public_keys();
  }

  size_t eb = params_.element_bytes();
  std::vector<uint8_t> directory;
  wire::put_u32(directory, static_cast<uint32_t>(registered_.size()));
  for (uint32_t u : registered_) {
    auto it = server_.directory_.find(u);
    if (it == server_.directory_.end()) throw ProtocolIncomplete("setup: missing public keys");
    wire::put_u32(directory, u);
    wire::put_bigint(directory, it->second.first, eb);
    wire::put_bigint(directory, it->second.second, eb);
  }
  wire::put_bigint(directory, server_.sk_.pub, eb);
  for (uint32_t u : registered_) {
    bus_.send(kServerId, u, MsgKind::KeyDirectory, directory);
  }
  keys_ready_ = true;
}

void FedTrainer::run_mask_key_sharing() {
  for (uint32_t u : registered_) {
    users_[u]->share_mask_key(
        cfg_.threshold_t,
        master_.fork("user:" + std::to_string(u) + ":share:" + std::to_string(bus_.round())));
  }
}

void FedTrainer::apply_scheduled_drops(unsigned, DropPhase phase) {
  if (pending_drops_.empty() || pending_phase_ != phase) return;
  for (uint32_t u : pending_drops_) {
    bus_.set_dropped(u, true);
    if (cfg_.dropout.permanent) permanently_dropped_.insert(u);
  }
  pending_drops_.clear();
}

std::vector<double> FedTrainer::run_secagg(uint32_t node, uint32_t stat, size_t expected_m) {
  apply_scheduled_drops(bus_.round(), DropPhase::Aggregation);
  ++invocation_;

  auto agg = std::make_unique<AggregationState>();
  agg->params = params_;
  agg->server_keys = server_.sk_;
  agg->threshold_t = cfg_.threshold_t;
  agg->registered = registered_;
  for (uint32_t u : registered_) {
    auto it = server_.directory_.find(u);
    if (it == server_.directory_.end()) throw ProtocolIncomplete("secagg: no key for user");
    agg->user_mask_pubs[u] = it->second.second;
  }
  server_.agg_ = std::move(agg);

  std::vector<uint8_t> request;
  wire::put_u32(request, invocation_);
  wire::put_u32(request, node);
  wire::put_u32(request, stat);
  wire::put_u32(request, static_cast<uint32_t>(registered_.size()));
  for (uint32_t u : registered_) wire::put_u32(request, u);
  for (uint32_t u : registered_) {
    bus_.send(kServerId, u, MsgKind::AggRequest, request);
  }

  AggregationState& st = *server_.agg_;
  std::vector<uint32_t> active = st.active_list();
  if (active.empty()) {
    throw RoundAbort("secagg: no masked vectors delivered");
  }

  // Reveal-phase dropouts vanish between vector and seed: they will miss the
  // active list below and end up demoted.
  apply_scheduled_drops(bus_.round(), DropPhase::Reveal);

  std::vector<uint8_t> active_msg;
  wire::put_u32(active_msg, static_cast<uint32_t>(active.size()));
  for (uint32_t u : active) wire::put_u32(active_msg, u);
  for (uint32_t u : active) {
    bus_.send(kServerId, u, MsgKind::ActiveList, active_msg);
  }

  std::vector<uint32_t> final_active;
  std::vector<uint32_t> demoted;
  for (uint32_t u : active) {
    if (st.reveals.count(u)) {
      final_active.push_back(u);
    } else {
      demoted.push_back(u);
    }
  }
  if (final_active.empty()) throw RoundAbort("secagg: no seed reveals delivered");
  if (!demoted.empty()) {
    // Users that went silent after uploading: recover them like dropouts.
    // Their shares were not in the reveals, so ask the survivors.
    std::vector<uint8_t> req;
    wire::put_u32(req, static_cast<uint32_t>(demoted.size()));
    for (uint32_t u : demoted) wire::put_u32(req, u);
    for (uint32_t u : final_active) {
      bus_.send(kServerId, u, MsgKind::ShareRequest, req);
    }
  }

  std::vector<uint32_t> dropped;
  for (uint32_t u : registered_) {
    if (!std::binary_search(final_active.begin(), final_active.end(), u)) dropped.push_back(u);
  }
  if (!dropped.empty() && final_active.size() < cfg_.threshold_t) {
    throw RoundAbort("secagg: not enough survivors to recover dropped keys");
  }

  // Server-side cost: R, its inversion/power, the per-entry products, and the
  // recovery work for dropped users.
  size_t n2_bits = bit_length(params_.N2);
  bus_.clock().charge_modexp(kServerId, bit_length(params_.N) * final_active.size(), n2_bits);
  bus_.clock().charge_modexp(kServerId, bit_length(params_.ord_g), n2_bits);
  bus_.clock().charge_modmul(kServerId, n2_bits, expected_m * final_active.size());
  if (!dropped.empty()) {
    bus_.clock().charge_modexp(kServerId, bit_length(params_.ord_g) * final_active.size(),
                               n2_bits);
    bus_.clock().charge_field_ops(kServerId, bit_length(params_.p),
                                  static_cast<uint64_t>(cfg_.threshold_t) * cfg_.threshold_t *
                                      dropped.size());
    bus_.clock().charge_prf(kServerId, dropped.size() * final_active.size() * expected_m);
  }

  std::vector<double> result;
  try {
    result = aggregate_unmask(st, codec_);
  } catch (const InsufficientShares& e) {
    throw RoundAbort(std::string("secagg: ") + e.what());
  }
  if (result.size() != expected_m) throw ProtocolIncomplete("secagg: unexpected vector length");

  // Case 2: recovered users leave U for the rest of the round.
  registered_ = final_active;
  server_.agg_.reset();
  return result;
}

void FedTrainer::publish_candidates(uint32_t node, std::span<const SplitCandidate> candidates) {
  std::vector<uint8_t> payload;
  wire::put_u32(payload, node);
  wire::put_u32(payload, static_cast<uint32_t>(candidates.size()));
  for (const SplitCandidate& c : candidates) {
    wire::put_u32(payload, c.feature);
    wire::put_f64(payload, c.threshold);
  }
  for (uint32_t u : registered_) {
    bus_.send(kServerId, u, MsgKind::Candidates, payload);
  }
}

void FedTrainer::publish_split(uint32_t node, const SplitCandidate& split, int left, int right) {
  std::vector<uint8_t> payload;
  wire::put_u32(payload, node);
  wire::put_u32(payload, split.feature);
  wire::put_f64(payload, split.threshold);
  wire::put_u32(payload, static_cast<uint32_t>(left));
  wire::put_u32(payload, static_cast<uint32_t>(right));
  for (uint32_t u : registered_) {
    bus_.send(kServerId, u, MsgKind::SplitDecision, payload);
  }
}

void FedTrainer::publish_tree(const CartTree& tree) {
  uint32_t index = static_cast<uint32_t>(server_.model_.trees.size());
  std::string dump = format_tree(tree, index);
  std::vector<uint8_t> payload;
  wire::put_u32(payload, index);
  wire::put_u32(payload, static_cast<uint32_t>(dump.size()));
  payload.insert(payload.end(), dump.begin(), dump.end());
  for (uint32_t u : registered_) {
    bus_.send(kServerId, u, MsgKind::TreePublish, payload);
  }
  server_.model_.trees.push_back(tree);
}

void FedTrainer::sync_user_trees() {
  for (uint32_t u : registered_) {
    UserNode& user = *users_[u];
    for (size_t k = user.synced_trees(); k < server_.model_.trees.size(); ++k) {
      std::string dump = format_tree(server_.model_.trees[k], k);
      std::vector<uint8_t> payload;
      wire::put_u32(payload, static_cast<uint32_t>(k));
      wire::put_u32(payload, static_cast<uint32_t>(dump.size()));
      payload.insert(payload.end(), dump.begin(), dump.end());
      bus_.send(kServerId, u, MsgKind::TreePublish, payload);
    }
  }
}

/// Split statistics sourced from secure aggregation rounds.
class FedStatProvider final : public SplitStatProvider {
 public:
  explicit FedStatProvider(FedTrainer* trainer) : trainer_(trainer) {}

  LeafStats node_totals(int node_id) override {
    uint32_t node = static_cast<uint32_t>(node_id);
    double h = run(node, kStatH, 1)[0];
    double w = run(node, kStatW, 1)[0];
    return LeafStats{w, h};
  }

  std::pair<std::vector<double>, std::vector<double>> left_sums(
      int node_id, std::span<const SplitCandidate> candidates) override {
    uint32_t node = static_cast<uint32_t>(node_id);
    trainer_->publish_candidates(node, candidates);
    std::vector<double> hl = run(node, kStatHLeft, candidates.size());
    std::vector<double> wl = run(node, kStatWLeft, candidates.size());
    return {std::move(wl), std::move(hl)};
  }

  void apply_split(int node_id, const SplitCandidate& split, int left_id, int right_id) override {
    trainer_->publish_split(static_cast<uint32_t>(node_id), split, left_id, right_id);
  }

  bool aborted() const { return aborted_; }

 private:
  std::vector<double> run(uint32_t node, uint32_t stat, size_t m) {
    try {
      return trainer_->run_secagg(node, stat, m);
    } catch (const RoundAbort&) {
      aborted_ = true;
      throw;
    }
  }

  FedTrainer* trainer_;
  bool aborted_ = false;
};

BoostModel FedTrainer::train(TrainLog* log, std::span<const SparseRow> eval_rows,
                             std::span<const int> eval_labels) {
  server_.model_ = BoostModel{};
  server_.model_.learning_rate = cfg_.train.eta;
  server_.model_.base_score = cfg_.train.base_score;

  std::vector<uint32_t> last_members;
  for (unsigned round = 1; round <= cfg_.train.rounds; ++round) {
    bus_.set_round(round);
    setup_round(round);
    if (registered_.empty()) {
      ++aborted_rounds_;
      continue;
    }
    bool members_changed = registered_ != last_members;
    if (cfg_.reshare_per_tree || !keys_ready_ || members_changed || burned_keys_) {
      run_setup();
      run_mask_key_sharing();
      burned_keys_ = false;
      last_members = registered_;
    }
    sync_user_trees();
    for (uint32_t u : registered_) {
      users_[u]->begin_tree(cfg_.train.eta, cfg_.train.base_score);
    }

    FedStatProvider provider(this);
    Rng grow_rng = master_.fork("tree:" + std::to_string(round - 1));
    size_t users_before = registered_.size();
    CartTree tree = grow_tree(cfg_.train.growth, data_->feature_domains, grow_rng, provider);
    if (registered_.size() < users_before) burned_keys_ = true;
    if (provider.aborted()) ++aborted_rounds_;
    quantize_weights(tree);
    publish_tree(tree);
    bus_.finish_round();

    if (log != nullptr) {
      log->accuracy.push_back(accuracy(server_.model_, eval_rows, eval_labels));
      log->loss.push_back(mean_loss(server_.model_, eval_rows, eval_labels));
    }
  }
  return server_.model_;
}

std::vector<double> FedTrainer::run_secagg_once(
    const std::map<uint32_t, std::vector<double>>& values) {
  if (values.empty()) throw DomainError("secagg: no input vectors");
  bus_.set_round(bus_.round() + 1);
  setup_round(bus_.round());
  if (registered_.empty()) throw RoundAbort("secagg: no registered users");
  run_setup();
  run_mask_key_sharing();
  size_t m = values.begin()->second.size();
  for (uint32_t u : registered_) {
    users_[u]->set_bench_vector(values.count(u) ? values.at(u) : std::vector<double>(m, 0.0));
  }
  std::vector<double> result = run_secagg(0, kStatBench, m);
  bus_.finish_round();
  return result;
}

RoundOutcome FedTrainer::run_split_finding(Rng& grow_rng) {
  bus_.set_round(bus_.round() + 1);
  setup_round(bus_.round());
  if (registered_.empty()) throw RoundAbort("split finding: no registered users");
  run_setup();
  run_mask_key_sharing();
  sync_user_trees();
  for (uint32_t u : registered_) {
    users_[u]->begin_tree(cfg_.train.eta, cfg_.train.base_score);
  }

  RoundOutcome outcome;
  size_t users_before = registered_.size();
  double h = run_secagg(0, kStatH, 1)[0];
  double w = run_secagg(0, kStatW, 1)[0];
  outcome.totals = LeafStats{w, h};

  const GrowthConfig& growth = cfg_.train.growth;
  CandidateEnumeration enumeration =
      enumerate_candidates(data_->feature_domains, growth.bins);
  uint32_t n_features = static_cast<uint32_t>(data_->feature_domains.size());
  uint32_t k = std::clamp<uint32_t>(
      static_cast<uint32_t>(std::llround(growth.feature_subsample * n_features)),
      n_features > 0 ? 1 : 0, n_features);
  std::vector<uint32_t> sampled = grow_rng.sample_indices(n_features, k);
  std::vector<SplitCandidate> candidates = flatten_candidates(sampled, enumeration);
  if (!candidates.empty()) {
    publish_candidates(0, candidates);
    std::vector<double> hl = run_secagg(0, kStatHLeft, candidates.size());
    std::vector<double> wl = run_secagg(0, kStatWLeft, candidates.size());
    if (auto choice = choose_split(outcome.totals, candidates, wl, hl, growth)) {
      outcome.chosen = candidates[choice->index];
      outcome.score = choice->score;
    }
    outcome.candidates = std::move(candidates);
    outcome.w_left = std::move(wl);
    outcome.h_left = std::move(hl);
  }
  if (registered_.size() < users_before) burned_keys_ = true;
  bus_.finish_round();
  for (uint32_t u = 1; u <= cfg_.n_users + cfg_.standby_users; ++u) {
    if (bus_.is_dropped(u) && !permanently_dropped_.count(u)) {
      outcome.dropped_this_round.push_back(u);
    }
  }
  return outcome;
}

}  // namespace fedboost
