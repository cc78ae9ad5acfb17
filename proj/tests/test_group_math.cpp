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

#include "fedboost/errors.hpp"
#include "fedboost/group.hpp"

using namespace fedboost;

namespace {

// Independent primality oracle: trial division.
bool trial_division_prime(const Bigint& n) {
  if (n < 2) return false;
  for (Bigint d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("generate_group produces safe primes and a valid generator") {
  Rng rng(1);
  GroupParams gp = generate_group(16, rng);
  // Trial-division oracle on each prime and its Sophie Germain half.
  CHECK(trial_division_prime(gp.q1));
  CHECK(trial_division_prime(gp.q2));
  CHECK(trial_division_prime((gp.q1 - 1) / 2));
  CHECK(trial_division_prime((gp.q2 - 1) / 2));
  CHECK(trial_division_prime(gp.p));
  CHECK(gp.q1 != gp.q2);
  CHECK(gp.N == gp.q1 * gp.q2);
  CHECK(bit_length(gp.N) == 16);
  CHECK(gp.ord_g == (gp.q1 - 1) * (gp.q2 - 1) / 2);
  CHECK(gp.p > gp.ord_g);
  CHECK(mod_exp(gp.g, gp.ord_g, gp.N2) == 1);
  CHECK(mod_exp(gp.g, gp.ord_g / ((gp.q1 - 1) / 2), gp.N2) != 1);
  CHECK(mod_exp(gp.g, gp.ord_g / ((gp.q2 - 1) / 2), gp.N2) != 1);
  CHECK_NOTHROW(gp.validate());
}

TEST_CASE("generate_group passes 40-round Miller-Rabin on all primes") {
  Rng rng(7);
  GroupParams gp = generate_group(24, rng);
  std::vector<Bigint> primes{gp.q1, gp.q2, (gp.q1 - 1) / 2, (gp.q2 - 1) / 2, gp.p};
  for (const Bigint& v : primes) {
    CHECK(is_probable_prime(v, 40));
  }
}

TEST_CASE("group fixture from injected safe primes 11 and 23") {
  Rng rng(3);
  GroupParams gp = group_from_primes(11, 23, rng);
  CHECK(gp.N == 253);
  CHECK(gp.ord_g == 110);  // (10*22)/2
  CHECK_NOTHROW(gp.validate());
  CHECK_THROWS_AS(group_from_primes(11, 13, rng), DomainError);  // 13 is not safe
}

TEST_CASE("generation is deterministic under a fixed seed") {
  Rng a(42), b(42);
  GroupParams ga = generate_group(20, a);
  GroupParams gb = generate_group(20, b);
  CHECK(ga == gb);
  CHECK(ga.serialize() == gb.serialize());
  Rng c(43);
  GroupParams gc = generate_group(20, c);
  CHECK(ga.N != gc.N);
}

TEST_CASE("sec_param below 16 is rejected") {
  Rng rng(1);
  CHECK_THROWS_AS(generate_group(8, rng), DomainError);
}

TEST_CASE("mod_exp basics") {
  CHECK(mod_exp(2, 10, 1000) == 24);
  CHECK(mod_exp(12345, 0, 97) == 1);
  CHECK_THROWS_AS(mod_exp(2, 3, 1), DomainError);
  Rng rng(5);
  GroupParams gp = generate_group(16, rng);
  CHECK(mod_exp(gp.g, gp.ord_g, gp.N2) == 1);
}

TEST_CASE("mod_exp is a homomorphism in the exponent") {
  Rng rng(9);
  GroupParams gp = generate_group(16, rng);
  for (int i = 0; i < 50; ++i) {
    Bigint a = rng.below(gp.ord_g);
    Bigint b = rng.below(gp.ord_g);
    Bigint lhs = mod_exp(gp.g, a, gp.N2) * mod_exp(gp.g, b, gp.N2) % gp.N2;
    CHECK(lhs == mod_exp(gp.g, a + b, gp.N2));
  }
}

TEST_CASE("mod_exp with negative exponent uses the inverse") {
  Rng rng(11);
  GroupParams gp = generate_group(16, rng);
  Bigint x = rng.unit(gp.N2);
  CHECK(mod_exp(x, -3, gp.N2) * mod_exp(x, 3, gp.N2) % gp.N2 == 1);
}

TEST_CASE("rand_unit returns units and is seed-deterministic") {
  Rng rng(13);
  GroupParams gp = group_from_primes(11, 23, rng);  // N = 1081? no: 253
  for (int i = 0; i < 200; ++i) {
    Bigint v = rand_unit(gp.N, rng);
    Bigint g;
    mpz_gcd(g.get_mpz_t(), v.get_mpz_t(), gp.N.get_mpz_t());
    CHECK(g == 1);
    CHECK(v >= 1);
    CHECK(v < gp.N);
  }
  Rng only(1);
  CHECK(rand_unit(2, only) == 1);  // Z*_2 = {1}

  Rng s1(77), s2(77);
  for (int i = 0; i < 20; ++i) CHECK(s1.unit(1081) == s2.unit(1081));
}

TEST_CASE("serialization round-trips and rejects corruption") {
  Rng rng(21);
  GroupParams gp = generate_group(18, rng);
  std::vector<uint8_t> bytes = gp.serialize();
  GroupParams back = GroupParams::deserialize(bytes);
  CHECK(back == gp);

  std::vector<uint8_t> truncated(bytes.begin(), bytes.begin() + bytes.size() / 2);
  CHECK_THROWS_AS(GroupParams::deserialize(truncated), ParseError);
  std::vector<uint8_t> bad = bytes;
  bad[0] ^= 0xff;
  CHECK_THROWS_AS(GroupParams::deserialize(bad), ParseError);
}

TEST_CASE("public serialization hides the strong primes") {
  Rng rng(22);
  GroupParams gp = generate_group(18, rng);
  GroupParams pub = GroupParams::deserialize(gp.serialize_public());
  CHECK(pub.q1 == 0);
  CHECK(pub.q2 == 0);
  CHECK(pub.N == gp.N);
  CHECK(pub.g == gp.g);
  CHECK(pub.p == gp.p);
}

TEST_CASE("element and share widths follow the bit lengths") {
  Rng rng(23);
  GroupParams gp = generate_group(16, rng);
  CHECK(gp.element_bytes() == (bit_length(gp.N2) + 7) / 8);
  CHECK(gp.share_bytes() == (bit_length(gp.p) + 7) / 8);
}
