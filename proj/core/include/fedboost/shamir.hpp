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
#include <span>
#include <vector>

#include "fedboost/bignum.hpp"

namespace fedboost {

/// One Shamir share of `owner`'s secret, stored by `holder`. The evaluation
/// point x is the holder's user index, so shares stay addressable across
/// rounds.
struct KeyShare {
  uint32_t owner = 0;
  uint32_t holder = 0;
  uint32_t x = 0;  // evaluation point in F_p, == holder index
  Bigint y;        // share value in [0, p)
};

/// t-of-n sharing of `secret` over F_p at evaluation points 1..n.
/// Requires 1 <= t <= n < p and 0 <= secret < p.
std::vector<KeyShare> share(const Bigint& secret, uint32_t t, uint32_t n, const Bigint& p,
                            Rng& rng, uint32_t owner = 0);

/// Sharing at explicit evaluation points (the live-user index set).
std::vector<KeyShare> share_at(const Bigint& secret, uint32_t t, std::span<const uint32_t> xs,
                               const Bigint& p, Rng& rng, uint32_t owner = 0);

/// Evaluates a fixed polynomial (coeffs[0] = secret) at 1..n. Known-answer
/// test hook.
std::vector<KeyShare> share_with_coefficients(const std::vector<Bigint>& coeffs, uint32_t n,
                                              const Bigint& p, uint32_t owner = 0);

/// Lagrange interpolation at x = 0 over the given shares. Needs >= t shares
/// with distinct x and a consistent owner; throws InsufficientShares /
/// DomainError otherwise.
Bigint reconstruct(std::span<const KeyShare> shares, uint32_t t, const Bigint& p);

}  // namespace fedboost
