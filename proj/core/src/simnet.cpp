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
#include "fedboost/simnet.hpp"

#include <cmath>

#include "fedboost/errors.hpp"

namespace fedboost {

const char* msg_kind_name(MsgKind kind) {
  switch (kind) {
    case MsgKind::Params: return "params";
    case MsgKind::PublicKeys: return "public_keys";
    case MsgKind::KeyDirectory: return "key_directory";
    case MsgKind::EncShare: return "enc_share";
    case MsgKind::Candidates: return "candidates";
    case MsgKind::AggRequest: return "agg_request";
    case MsgKind::MaskedVector: return "masked_vector";
    case MsgKind::ActiveList: return "active_list";
    case MsgKind::SeedReveal: return "seed_reveal";
    case MsgKind::ShareRequest: return "share_request";
    case MsgKind::ShareResponse: return "share_response";
    case MsgKind::SplitDecision: return "split_decision";
    case MsgKind::TreePublish: return "tree_publish";
  }
  return "unknown";
}

namespace {

// One unit = one 64-bit limb multiplication; reported as ms at an assumed
// 5e8 units/s so numbers land in a familiar range.
constexpr double kUnitsPerMs = 5e5;

double modmul_units(size_t mod_bits) {
  double limbs = static_cast<double>((mod_bits + 63) / 64);
  return limbs * limbs;
}

}  // namespace

void VirtualClock::charge_modexp(uint32_t entity, size_t exp_bits, size_t mod_bits) {
  units_[entity] += 1.5 * static_cast<double>(exp_bits) * modmul_units(mod_bits);
}

void VirtualClock::charge_modmul(uint32_t entity, size_t mod_bits, uint64_t count) {
  units_[entity] += static_cast<double>(count) * modmul_units(mod_bits);
}

void VirtualClock::charge_field_ops(uint32_t entity, size_t mod_bits, uint64_t count) {
  charge_modmul(entity, mod_bits, count);
}

void VirtualClock::charge_prf(uint32_t entity, uint64_t count) {
  units_[entity] += 64.0 * static_cast<double>(count);  // two SHA-256 compressions
}

void VirtualClock::charge_aead(uint32_t entity, size_t bytes) {
  units_[entity] += 4.0 * static_cast<double>(bytes + 32);
}

double VirtualClock::cpu_ms(uint32_t entity) const {
  auto it = units_.find(entity);
  return it == units_.end() ? 0.0 : it->second / kUnitsPerMs;
}

std::vector<uint32_t> VirtualClock::entities() const {
  std::vector<uint32_t> out;
  out.reserve(units_.size());
  for (const auto& [id, units] : units_) out.push_back(id);
  return out;
}

void VirtualClock::reset() { units_.clear(); }

uint64_t RoundMetrics::entity_bytes_sent(uint32_t entity) const {
  uint64_t sum = 0;
  for (const auto& [key, counters] : traffic) {
    if (std::get<1>(key) == entity) sum += counters.bytes_sent;
  }
  return sum;
}

uint64_t RoundMetrics::entity_bytes_recv(uint32_t entity) const {
  uint64_t sum = 0;
  for (const auto& [key, counters] : traffic) {
    if (std::get<1>(key) == entity) sum += counters.bytes_recv;
  }
  return sum;
}

void Bus::register_entity(uint32_t id, Handler handler) {
  handlers_[id] = std::move(handler);
  dropped_.erase(id);
}

bool Bus::is_registered(uint32_t id) const { return handlers_.count(id) > 0; }

void Bus::set_dropped(uint32_t id, bool dropped) {
  if (dropped) {
    dropped_.insert(id);
  } else {
    dropped_.erase(id);
  }
}

bool Bus::is_dropped(uint32_t id) const { return dropped_.count(id) > 0; }

bool Bus::send(uint32_t from, uint32_t to, MsgKind kind, std::vector<uint8_t> payload) {
  if (!is_registered(to)) throw DomainError("bus: unknown recipient");
  Envelope env{from, to, kind, std::move(payload), round_};
  if (observer_) observer_(env);
  uint64_t len = env.payload.size();
  KindCounters& sender = metrics_.traffic[{round_, from, kind}];
  sender.bytes_sent += len;
  sender.msgs_sent += 1;
  metrics_.total_sent += len;
  if (is_dropped(to)) {
    metrics_.total_dropped += len;
    return false;  // drop-notification to the caller
  }
  KindCounters& receiver = metrics_.traffic[{round_, to, kind}];
  receiver.bytes_recv += len;
  receiver.msgs_recv += 1;
  metrics_.total_received += len;
  handlers_.at(to)(env);
  return true;
}

void Bus::finish_round() {
  for (uint32_t id : clock_.entities()) {
    double now = clock_.cpu_ms(id);
    double delta = now - last_cpu_[id];
    if (delta != 0.0) metrics_.cpu_ms[{round_, id}] = delta;
    last_cpu_[id] = now;
  }
}

RoundMetrics Bus::snapshot_metrics() const { return metrics_; }

void Bus::set_observer(std::function<void(const Envelope&)> observer) {
  observer_ = std::move(observer);
}

std::vector<uint32_t> DropoutSchedule::apply(unsigned round, std::span<const uint32_t> users,
                                             Rng& rng) const {
  if (rate <= 0.0 || period == 0 || round == 0 || round % period != 0) return {};
  uint32_t count = static_cast<uint32_t>(std::llround(rate * static_cast<double>(users.size())));
  count = std::min<uint32_t>(count, static_cast<uint32_t>(users.size()));
  if (count == 0) return {};
  std::vector<uint32_t> picks = rng.sample_indices(static_cast<uint32_t>(users.size()), count);
  std::vector<uint32_t> out;
  out.reserve(count);
  for (uint32_t i : picks) out.push_back(users[i]);
  return out;
}

}  // namespace fedboost
