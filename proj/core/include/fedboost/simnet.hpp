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
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fedboost/bignum.hpp"

namespace fedboost {

enum class MsgKind : uint8_t {
  Params,
  PublicKeys,
  KeyDirectory,
  EncShare,
  Candidates,
  AggRequest,
  MaskedVector,
  ActiveList,
  SeedReveal,
  ShareRequest,
  ShareResponse,
  SplitDecision,
  TreePublish,
};

const char* msg_kind_name(MsgKind kind);

struct Envelope {
  uint32_t from = 0;
  uint32_t to = 0;
  MsgKind kind = MsgKind::Params;
  std::vector<uint8_t> payload;
  uint32_t round = 0;
};

/// Virtual per-entity CPU accounting. Costs are operation counts (one unit =
/// one 64-bit limb multiplication), so identical runs report identical times.
class VirtualClock {
 public:
  void charge_modexp(uint32_t entity, size_t exp_bits, size_t mod_bits);
  void charge_modmul(uint32_t entity, size_t mod_bits, uint64_t count = 1);
  void charge_field_ops(uint32_t entity, size_t mod_bits, uint64_t count);
  void charge_prf(uint32_t entity, uint64_t count = 1);
  void charge_aead(uint32_t entity, size_t bytes);

  double cpu_ms(uint32_t entity) const;
  std::vector<uint32_t> entities() const;
  void reset();

 private:
  std::map<uint32_t, double> units_;
};

struct KindCounters {
  uint64_t bytes_sent = 0;
  uint64_t bytes_recv = 0;
  uint64_t msgs_sent = 0;
  uint64_t msgs_recv = 0;
};

/// Cumulative and per-round traffic/timing snapshot.
struct RoundMetrics {
  // (round, entity, kind) -> counters
  std::map<std::tuple<uint32_t, uint32_t, MsgKind>, KindCounters> traffic;
  // (round, entity) -> virtual cpu ms
  std::map<std::pair<uint32_t, uint32_t>, double> cpu_ms;
  uint64_t total_sent = 0;
  uint64_t total_received = 0;
  uint64_t total_dropped = 0;  // payload bytes discarded at dropped recipients

  uint64_t entity_bytes_sent(uint32_t entity) const;
  uint64_t entity_bytes_recv(uint32_t entity) const;
};

/// Synchronous in-memory message bus with byte-exact accounting. Entities are
/// registered with a handler; a send to a dropped recipient is discarded and
/// reported to the sender via the return value.
class Bus {
 public:
  using Handler = std::function<void(const Envelope&)>;

  void register_entity(uint32_t id, Handler handler);
  bool is_registered(uint32_t id) const;
  void set_dropped(uint32_t id, bool dropped);
  bool is_dropped(uint32_t id) const;

  void set_round(uint32_t round) { round_ = round; }
  uint32_t round() const { return round_; }

  /// Delivers synchronously. Returns false (and charges the sender only) when
  /// the recipient is dropped — the observable dropout signal.
  bool send(uint32_t from, uint32_t to, MsgKind kind, std::vector<uint8_t> payload);

  /// Folds the virtual-clock deltas accumulated since the previous call into
  /// the current round's cpu_ms rows.
  void finish_round();

  VirtualClock& clock() { return clock_; }
  const RoundMetrics& metrics() const { return metrics_; }
  RoundMetrics snapshot_metrics() const;

  /// Test hook: observes every envelope before delivery.
  void set_observer(std::function<void(const Envelope&)> observer);

 private:
  std::map<uint32_t, Handler> handlers_;
  std::set<uint32_t> dropped_;
  uint32_t round_ = 0;
  VirtualClock clock_;
  RoundMetrics metrics_;
  std::map<uint32_t, double> last_cpu_;
  std::function<void(const Envelope&)> observer_;
};

/// Every `period` rounds, `rate`·n registered users disconnect (chosen
/// uniformly without replacement from a dedicated stream).
struct DropoutSchedule {
  unsigned period = 10;
  double rate = 0.0;
  bool permanent = false;

  std::vector<uint32_t> apply(unsigned round, std::span<const uint32_t> users, Rng& rng) const;
};

}  // namespace fedboost
