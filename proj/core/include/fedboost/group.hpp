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
#include <vector>

#include "fedboost/bignum.hpp"

namespace fedboost {

/// Public cryptographic parameters: the cyclic group G = <g> inside Z*_{N^2}
/// built from two safe primes, plus the secret-sharing field F_p.
///
/// q1 and q2 are held by the key-generation-center role only; everything else
/// is published to users and server.
struct GroupParams {
  unsigned sec_param = 0;  // bit length of N
  Bigint q1, q2;           // safe primes, N = q1*q2
  Bigint N, N2;
  Bigint g;       // generator with order ord_g in Z*_{N^2}
  Bigint ord_g;   // (q1-1)(q2-1)/2
  Bigint p;       // Shamir field prime, p > ord_g

  /// Byte width of one group element on the wire: ceil(bits(N^2)/8).
  size_t element_bytes() const;
  /// Byte width of one share value on the wire: ceil(bits(p)/8).
  size_t share_bytes() const;

  /// Checks every structural invariant (safe primality at >= 40 Miller-Rabin
  /// rounds, generator order, p > ord_g). Throws DomainError on violation.
  void validate() const;

  std::vector<uint8_t> serialize() const;
  /// q1/q2 omitted — the form published to users and server.
  std::vector<uint8_t> serialize_public() const;
  static GroupParams deserialize(const std::vector<uint8_t>& bytes);

  bool operator==(const GroupParams&) const = default;
};

/// Samples safe primes by incremental sieving from a random start until N has
/// exactly `sec_param` bits, then derives g and p. Deterministic under a
/// seeded rng. sec_param >= 16; throws GenerationFailure past the attempt
/// budget.
GroupParams generate_group(unsigned sec_param, Rng& rng);

/// Builds params from two injected safe primes (test fixtures / known-answer
/// vectors). Derives g deterministically from the given rng.
GroupParams group_from_primes(const Bigint& q1, const Bigint& q2, Rng& rng);

/// Uniform element of Z*_modulus.
Bigint rand_unit(const Bigint& modulus, Rng& rng);

}  // namespace fedboost
