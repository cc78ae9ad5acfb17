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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "fedboost/errors.hpp"
#include "fedboost/simnet.hpp"

using namespace fedboost;

TEST_CASE("delivery accounts bytes on both sides") {
  Bus bus;
  int delivered = 0;
  bus.register_entity(1, [&](const Envelope&) {});
  bus.register_entity(2, [&](const Envelope& env) {
    ++delivered;
    CHECK(env.from == 1);
    CHECK(env.payload.size() == 260);
  });
  for (int i = 0; i < 100; ++i) {
    CHECK(bus.send(1, 2, MsgKind::MaskedVector, std::vector<uint8_t>(260)));
  }
  CHECK(delivered == 100);
  const RoundMetrics& m = bus.metrics();
  CHECK(m.total_sent == 26000);
  CHECK(m.total_received == 26000);
  CHECK(m.entity_bytes_sent(1) == 26000);
  CHECK(m.entity_bytes_recv(2) == 26000);
  CHECK(m.entity_bytes_recv(1) == 0);
}

TEST_CASE("sends to dropped peers are discarded and signalled") {
  Bus bus;
  int delivered = 0;
  bus.register_entity(1, [&](const Envelope&) {});
  bus.register_entity(2, [&](const Envelope&) { ++delivered; });
  bus.set_dropped(2, true);
  CHECK_FALSE(bus.send(1, 2, MsgKind::SeedReveal, std::vector<uint8_t>(40)));
  CHECK(delivered == 0);
  const RoundMetrics& m = bus.metrics();
  CHECK(m.total_sent == 40);
  CHECK(m.total_received == 0);
  CHECK(m.total_dropped == 40);
  // Conservation: sent = received + dropped.
  CHECK(m.total_sent == m.total_received + m.total_dropped);

  bus.set_dropped(2, false);
  CHECK(bus.send(1, 2, MsgKind::SeedReveal, std::vector<uint8_t>(40)));
  CHECK(delivered == 1);
  CHECK_THROWS_AS(bus.send(1, 99, MsgKind::Params, {}), DomainError);
}

TEST_CASE("per-kind counters track message counts") {
  Bus bus;
  bus.register_entity(1, [](const Envelope&) {});
  bus.register_entity(2, [](const Envelope&) {});
  bus.set_round(3);
  bus.send(1, 2, MsgKind::ActiveList, std::vector<uint8_t>(8));
  bus.send(1, 2, MsgKind::ActiveList, std::vector<uint8_t>(8));
  bus.send(2, 1, MsgKind::SeedReveal, std::vector<uint8_t>(20));
  const RoundMetrics& m = bus.metrics();
  const KindCounters& sent = m.traffic.at({3, 1, MsgKind::ActiveList});
  CHECK(sent.msgs_sent == 2);
  CHECK(sent.bytes_sent == 16);
  const KindCounters& recv = m.traffic.at({3, 1, MsgKind::SeedReveal});
  CHECK(recv.msgs_recv == 1);
  CHECK(recv.bytes_recv == 20);
}

TEST_CASE("empty run reports all-zero metrics") {
  Bus bus;
  RoundMetrics m = bus.snapshot_metrics();
  CHECK(m.traffic.empty());
  CHECK(m.total_sent == 0);
  CHECK(m.total_received == 0);
  CHECK(m.total_dropped == 0);
  CHECK(m.cpu_ms.empty());
}

TEST_CASE("virtual clock charges deterministic per-entity costs") {
  Bus bus;
  bus.register_entity(1, [](const Envelope&) {});
  bus.clock().charge_modexp(1, 512, 1024);
  bus.clock().charge_prf(1, 100);
  double ms = bus.clock().cpu_ms(1);
  CHECK(ms > 0);
  Bus other;
  other.clock().charge_modexp(1, 512, 1024);
  other.clock().charge_prf(1, 100);
  CHECK(other.clock().cpu_ms(1) == ms);

  bus.set_round(1);
  bus.finish_round();
  CHECK(bus.metrics().cpu_ms.at({1, 1}) == doctest::Approx(ms));
  // The next round only records the delta.
  bus.set_round(2);
  bus.clock().charge_prf(1, 100);
  bus.finish_round();
  CHECK(bus.metrics().cpu_ms.at({2, 1}) ==
        doctest::Approx(bus.clock().cpu_ms(1) - ms));
}

TEST_CASE("dropout schedule fires on period multiples only") {
  DropoutSchedule sched;
  sched.period = 10;
  sched.rate = 0.3;
  std::vector<uint32_t> users{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  Rng rng(1);
  CHECK(sched.apply(5, users, rng).empty());
  CHECK(sched.apply(10, users, rng).size() == 3);
  CHECK(sched.apply(20, users, rng).size() == 3);
  CHECK(sched.apply(0, users, rng).empty());

  DropoutSchedule none;
  none.rate = 0.0;
  Rng r2(2);
  for (unsigned round = 1; round <= 30; ++round) CHECK(none.apply(round, users, r2).empty());

  Rng a(3), b(3);
  DropoutSchedule s2{10, 0.2, false};
  CHECK(s2.apply(10, users, a) == s2.apply(10, users, b));

  // Picks are users without replacement.
  Rng c(4);
  std::vector<uint32_t> picked = sched.apply(10, users, c);
  std::set<uint32_t> unique(picked.begin(), picked.end());
  CHECK(unique.size() == picked.size());
  for (uint32_t u : picked) CHECK(std::find(users.begin(), users.end(), u) != users.end());
}
