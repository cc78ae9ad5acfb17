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
#include "fedboost/codec.hpp"

#include <cmath>

#include "fedboost/errors.hpp"

namespace fedboost {

double FixedPointConfig::tolerance() const { return std::ldexp(1.0, -static_cast<int>(frac_bits) - 1); }

void FixedPointConfig::require_headroom(unsigned guard_bits) const {
  Bigint bound = Bigint(1) << (frac_bits + guard_bits);
  if (2 * bound >= modulus) {
    throw DomainError("fixed-point: modulus too small for frac_bits + guard headroom");
  }
}

Bigint encode(double x, const FixedPointConfig& cfg) {
  if (!std::isfinite(x)) throw RangeError("encode: non-finite value");
  double scaled = std::round(std::ldexp(x, static_cast<int>(cfg.frac_bits)));
  Bigint v(scaled);
  Bigint mag = v < 0 ? Bigint(-v) : v;
  if (2 * mag >= cfg.modulus) throw RangeError("encode: value exceeds plaintext headroom");
  if (v < 0) v += cfg.modulus;
  return v;
}

double decode(const Bigint& v, const FixedPointConfig& cfg) {
  if (v < 0 || v >= cfg.modulus) throw DomainError("decode: value outside Z_N");
  Bigint centered = v;
  if (2 * centered > cfg.modulus) centered -= cfg.modulus;
  return std::ldexp(centered.get_d(), -static_cast<int>(cfg.frac_bits));
}

}  // namespace fedboost
