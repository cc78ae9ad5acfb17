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
#include "fedboost/shamir.hpp"

#include <numeric>
#include <set>

#include "fedboost/errors.hpp"

namespace fedboost {

namespace {

Bigint eval_poly(const std::vector<Bigint>& coeffs, uint32_t x, const Bigint& p) {
  Bigint acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = (acc * x + *it) % p;
  }
  return acc;
}

}  // namespace

std::vector<KeyShare> share(const Bigint& secret, uint32_t t, uint32_t n, const Bigint& p,
                            Rng& rng, uint32_t owner) {
  std::vector<uint32_t> xs(n);
  std::iota(xs.begin(), xs.end(), 1u);
  return share_at(secret, t, xs, p, rng, owner);
}

std::vector<KeyShare> share_at(const Bigint& secret, uint32_t t, std::span<const uint32_t> xs,
                               const Bigint& p, Rng& rng, uint32_t owner) {
  uint32_t n = static_cast<uint32_t>(xs.size());
  if (t < 1 || t > n) throw DomainError("share: need 1 <= t <= n");
  if (p <= n) throw DomainError("share: field too small for share count");
  if (secret < 0 || secret >= p) throw DomainError("share: secret outside F_p");
  std::vector<Bigint> coeffs(t);
  coeffs[0] = secret;
  for (uint32_t i = 1; i < t; ++i) coeffs[i] = rng.below(p);
  std::vector<KeyShare> out;
  out.reserve(n);
  for (uint32_t x : xs) {
    if (x == 0) throw DomainError("share: evaluation point 0 would leak the secret");
    out.push_back(KeyShare{owner, x, x, eval_poly(coeffs, x, p)});
  }
  return out;
}

std::vector<KeyShare> share_with_coefficients(const std::vector<Bigint>& coeffs, uint32_t n,
                                              const Bigint& p, uint32_t owner) {
  if (coeffs.empty()) throw DomainError("share: empty polynomial");
  std::vector<KeyShare> out;
  out.reserve(n);
  for (uint32_t x = 1; x <= n; ++x) {
    out.push_back(KeyShare{owner, x, x, eval_poly(coeffs, x, p)});
  }
  return out;
}

Bigint reconstruct(std::span<const KeyShare> shares, uint32_t t, const Bigint& p) {
  if (t < 1) throw DomainError("reconstruct: threshold must be >= 1");
  if (shares.size() < t) throw InsufficientShares("reconstruct: fewer shares than threshold");
  std::set<uint32_t> seen;
  for (const KeyShare& s : shares) {
    if (!seen.insert(s.x).second) throw DomainError("reconstruct: duplicate evaluation point");
    if (s.owner != shares.front().owner) throw DomainError("reconstruct: mixed owners");
  }
  Bigint acc = 0;
  for (const KeyShare& si : shares) {
    Bigint num = 1, den = 1;
    for (const KeyShare& sj : shares) {
      if (sj.x == si.x) continue;
      num = num * sj.x % p;
      Bigint diff = (Bigint(sj.x) - Bigint(si.x)) % p;
      if (diff < 0) diff += p;
      den = den * diff % p;
    }
    acc = (acc + si.y * num % p * mod_inverse(den, p)) % p;
  }
  return acc;
}

}  // namespace fedboost
