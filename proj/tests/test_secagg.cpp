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

#include <numeric>

#include "fedboost/errors.hpp"
#include "fedboost/secagg.hpp"
#include "fedboost/transport.hpp"
#include "test_support.hpp"

using namespace fedboost;
using fedboost::testing::SecaggWorld;

namespace {

GroupParams toy16() {
  Rng rng(900);
  return generate_group(16, rng);
}

std::map<uint32_t, std::vector<Bigint>> integer_inputs(const SecaggWorld& w, Rng& rng,
                                                       size_t m, unsigned bound) {
  std::map<uint32_t, std::vector<Bigint>> inputs;
  for (uint32_t u : w.users) {
    std::vector<Bigint>& v = inputs[u];
    for (size_t j = 0; j < m; ++j) v.push_back(rng.index(bound));
  }
  return inputs;
}

Bigint expected_sum(const std::map<uint32_t, std::vector<Bigint>>& inputs,
                    const std::vector<uint32_t>& active, size_t j, const Bigint& N) {
  Bigint sum = 0;
  for (uint32_t u : active) sum += inputs.at(u)[j];
  return sum % N;
}

}  // namespace

TEST_CASE("single user aggregates exactly (empty pairwise sum)") {
  GroupParams gp = toy16();
  Rng rng(1);
  SecaggWorld w = SecaggWorld::create(gp, 1, 1, rng);
  auto inputs = integer_inputs(w, rng, 3, 1000);
  std::vector<Bigint> out = w.aggregate(inputs, {1}, rng);
  for (size_t j = 0; j < 3; ++j) CHECK(out[j] == inputs[1][j]);
}

TEST_CASE("two users: 3 + 4 = 7 end to end") {
  GroupParams gp = toy16();
  Rng rng(2);
  SecaggWorld w = SecaggWorld::create(gp, 2, 2, rng);
  std::map<uint32_t, std::vector<Bigint>> inputs{{1, {Bigint(3)}}, {2, {Bigint(4)}}};
  std::vector<Bigint> out = w.aggregate(inputs, {1, 2}, rng);
  CHECK(out[0] == 7);
}

TEST_CASE("length-3 vectors round-trip entrywise for five users") {
  GroupParams gp = toy16();
  Rng rng(3);
  SecaggWorld w = SecaggWorld::create(gp, 5, 3, rng);
  auto inputs = integer_inputs(w, rng, 3, 500);
  std::vector<Bigint> out = w.aggregate(inputs, w.users, rng);
  for (size_t j = 0; j < 3; ++j) CHECK(out[j] == expected_sum(inputs, w.users, j, gp.N));
}

TEST_CASE("pairwise masks cancel over the full user set") {
  GroupParams gp = toy16();
  Rng rng(4);
  SecaggWorld w = SecaggWorld::create(gp, 6, 3, rng);
  for (uint64_t j = 0; j < 8; ++j) {
    Bigint total = 0;
    for (uint32_t u : w.users) {
      total += pairwise_mask_sum(w.keyrings[u], w.users, j, gp.N);
    }
    CHECK(total % gp.N == 0);
  }
}

TEST_CASE("real-vector masking respects the codec tolerance") {
  GroupParams gp = toy16();
  FixedPointConfig cfg{4, gp.N};
  Rng rng(5);
  SecaggWorld w = SecaggWorld::create(gp, 4, 2, rng);
  std::vector<std::vector<double>> xs;
  AggregationState st = w.make_state();
  std::map<uint32_t, Bigint> rs;
  double expected[2] = {0, 0};
  for (uint32_t u : w.users) {
    std::vector<double> x{u * 1.25, -0.5 * u};
    expected[0] += x[0];
    expected[1] += x[1];
    rs[u] = rng.unit(gp.N);
    st.add_vector(mask_vector(x, rs[u], w.keyrings[u], w.users, w.server.pub, gp, cfg));
  }
  for (uint32_t u : w.users) {
    st.add_reveal(open_seed(gp, u, rs[u], w.users, w.users, w.stored[u]));
  }
  std::vector<double> out = aggregate_unmask(st, cfg);
  CHECK(std::abs(out[0] - expected[0]) <= 4 * cfg.tolerance());
  CHECK(std::abs(out[1] - expected[1]) <= 4 * cfg.tolerance());
}

TEST_CASE("dropout after key sharing: remaining users' sum is recovered") {
  GroupParams gp = toy16();
  Rng rng(6);
  SecaggWorld w = SecaggWorld::create(gp, 3, 2, rng);
  auto inputs = integer_inputs(w, rng, 2, 100);
  // User 3 shared its key but never sends a vector.
  std::vector<uint32_t> active{1, 2};
  std::vector<Bigint> out = w.aggregate(inputs, active, rng);
  for (size_t j = 0; j < 2; ++j) CHECK(out[j] == expected_sum(inputs, active, j, gp.N));
}

TEST_CASE("dropout recovery is threshold-gated and subset-independent") {
  GroupParams gp = toy16();
  Rng rng(7);
  Bigint secret = rng.below(gp.ord_g - 1) + 1;
  std::vector<KeyShare> shares = share(secret, 3, 5, gp.p, rng, 4);

  CHECK(recover_dropped_key(std::span(shares.data(), 3), 3, gp.p) == secret);
  CHECK(recover_dropped_key(std::span(shares.data(), 4), 3, gp.p) == secret);
  CHECK_THROWS_AS(recover_dropped_key(std::span(shares.data(), 2), 3, gp.p),
                  InsufficientShares);
}

TEST_CASE("aggregation result does not depend on the recovery subset") {
  GroupParams gp = toy16();
  Rng rng(8);
  SecaggWorld w = SecaggWorld::create(gp, 5, 2, rng);
  auto inputs = integer_inputs(w, rng, 2, 100);
  std::vector<uint32_t> active{1, 2, 4, 5};  // user 3 drops

  // Run twice with reveals carrying different share subsets: restrict the
  // pool to exactly t shares from different holders.
  std::vector<Bigint> results[2];
  int variant = 0;
  for (std::vector<uint32_t> holders : {std::vector<uint32_t>{1, 2}, std::vector<uint32_t>{4, 5}}) {
    AggregationState st = w.make_state();
    std::map<uint32_t, Bigint> rs;
    for (uint32_t u : active) {
      rs[u] = rng.unit(gp.N);
      st.add_vector(mask_encoded(inputs[u], rs[u], w.keyrings[u], w.users, w.server.pub, gp));
    }
    for (uint32_t u : active) {
      SeedReveal sr = open_seed(gp, u, rs[u], w.users, active, w.stored[u]);
      if (std::find(holders.begin(), holders.end(), u) == holders.end()) {
        sr.dropout_shares.clear();  // this holder contributes no share
      }
      st.add_reveal(sr);
    }
    results[variant++] = aggregate_unmask_raw(st);
  }
  CHECK(results[0] == results[1]);
  for (size_t j = 0; j < 2; ++j) {
    CHECK(results[0][j] == expected_sum(inputs, active, j, gp.N));
  }
}

TEST_CASE("open_seed attaches shares only for the dropped set") {
  GroupParams gp = toy16();
  Rng rng(9);
  SecaggWorld w = SecaggWorld::create(gp, 4, 2, rng);
  Bigint r = rng.unit(gp.N);

  SeedReveal none = open_seed(gp, 1, r, w.users, w.users, w.stored[1]);
  CHECK(none.dropout_shares.empty());
  CHECK(none.seed == mod_exp(gp.g, r, gp.N2));

  std::vector<uint32_t> active{1, 2, 4};
  SeedReveal one = open_seed(gp, 1, r, w.users, active, w.stored[1]);
  REQUIRE(one.dropout_shares.size() == 1);
  CHECK(one.dropout_shares[0].owner == 3);

  CHECK_THROWS_AS(open_seed(gp, 3, r, w.users, active, w.stored[3]), NotActive);
}

TEST_CASE("vector-only users are demoted and recovered") {
  GroupParams gp = toy16();
  Rng rng(10);
  SecaggWorld w = SecaggWorld::create(gp, 4, 2, rng);
  auto inputs = integer_inputs(w, rng, 2, 100);

  AggregationState st = w.make_state();
  std::map<uint32_t, Bigint> rs;
  for (uint32_t u : w.users) {
    rs[u] = rng.unit(gp.N);
    st.add_vector(mask_encoded(inputs[u], rs[u], w.keyrings[u], w.users, w.server.pub, gp));
  }
  // User 2 sent its vector but goes silent before revealing; survivors are
  // asked for its shares out of band.
  std::vector<uint32_t> revealers{1, 3, 4};
  for (uint32_t u : revealers) {
    st.add_reveal(open_seed(gp, u, rs[u], w.users, w.users, w.stored[u]));
  }
  st.share_pool[2].push_back(w.stored[1][2]);
  st.share_pool[2].push_back(w.stored[3][2]);

  std::vector<Bigint> out = aggregate_unmask_raw(st);
  for (size_t j = 0; j < 2; ++j) CHECK(out[j] == expected_sum(inputs, revealers, j, gp.N));
}

TEST_CASE("missing recovery shares abort the aggregation") {
  GroupParams gp = toy16();
  Rng rng(11);
  SecaggWorld w = SecaggWorld::create(gp, 3, 3, rng);  // t = n: any dropout is fatal
  auto inputs = integer_inputs(w, rng, 1, 50);
  CHECK_THROWS_AS(w.aggregate(inputs, {1, 2}, rng), InsufficientShares);
}

TEST_CASE("a skipped user leaves the aggregate poisoned") {
  GroupParams gp = toy16();
  Rng rng(12);
  SecaggWorld w = SecaggWorld::create(gp, 5, 3, rng);
  int deviations = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    auto inputs = integer_inputs(w, rng, 1, 1000);
    // The server unmasks a product that silently omits user 5, pretending
    // the active set was only {1..4}.
    std::vector<uint32_t> subset{1, 2, 3, 4};
    AggregationState st = w.make_state();
    st.registered = subset;
    std::map<uint32_t, Bigint> rs;
    for (uint32_t u : subset) {
      rs[u] = rng.unit(gp.N);
      // Masks were computed against the full registered set (all 5 peers).
      st.add_vector(mask_encoded(inputs[u], rs[u], w.keyrings[u], w.users, w.server.pub, gp));
    }
    for (uint32_t u : subset) {
      st.add_reveal(open_seed(gp, u, rs[u], subset, subset, w.stored[u]));
    }
    std::vector<Bigint> out = aggregate_unmask_raw(st);
    if (out[0] != expected_sum(inputs, subset, 0, gp.N)) ++deviations;
  }
  CHECK(deviations >= trials - 1);
}

TEST_CASE("mask-key refresh across 100 randomized rounds stays exact") {
  GroupParams gp = toy16();
  Rng rng(13);
  SecaggWorld w = SecaggWorld::create(gp, 5, 3, rng);
  for (int round = 0; round < 100; ++round) {
    // Roughly 30% of users rotate their mask keys each round.
    for (uint32_t u : w.users) {
      if (rng.index(10) < 3) w.refresh_user(u, rng);
    }
    auto inputs = integer_inputs(w, rng, 2, 1000);
    std::vector<Bigint> out = w.aggregate(inputs, w.users, rng);
    for (size_t j = 0; j < 2; ++j) CHECK(out[j] == expected_sum(inputs, w.users, j, gp.N));
  }
}

TEST_CASE("input validation") {
  GroupParams gp = toy16();
  Rng rng(14);
  SecaggWorld w = SecaggWorld::create(gp, 2, 2, rng);
  AggregationState st = w.make_state();
  CHECK_THROWS_AS(aggregate_unmask_raw(st), ProtocolIncomplete);

  MaskKeyring missing;
  missing.my_index = 1;
  std::vector<Bigint> x{Bigint(1)};
  CHECK_THROWS_AS(mask_encoded(x, 3, missing, w.users, w.server.pub, gp), DomainError);

  MaskedVector stranger;
  stranger.sender = 99;
  stranger.entries = {Bigint(1)};
  CHECK_THROWS_AS(st.add_vector(stranger), DomainError);
}
