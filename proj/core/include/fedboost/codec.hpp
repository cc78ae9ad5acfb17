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

#include "fedboost/bignum.hpp"

namespace fedboost {

/// Fixed-point embedding of real gradient sums into Z_N, with values above
/// N/2 read back as negatives.
struct FixedPointConfig {
  unsigned frac_bits = 20;
  Bigint modulus;

  /// Half-ulp roundtrip error bound: 2^-(frac_bits+1).
  double tolerance() const;

  /// Verifies 2^(frac_bits+guard_bits) < N/2 for the declared aggregate
  /// headroom; throws DomainError when the plaintext space is too small.
  void require_headroom(unsigned guard_bits) const;
};

/// round(x * 2^frac_bits) mod N. Throws RangeError when |x|*2^frac_bits
/// reaches N/2.
Bigint encode(double x, const FixedPointConfig& cfg);
double decode(const Bigint& v, const FixedPointConfig& cfg);

}  // namespace fedboost
