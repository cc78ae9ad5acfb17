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

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

namespace fedboost {

using Bigint = mpz_class;

/// base^exponent mod modulus. modulus must be > 1.
Bigint mod_exp(const Bigint& base, const Bigint& exponent, const Bigint& modulus);

/// Multiplicative inverse mod modulus; throws DomainError if none exists.
Bigint mod_inverse(const Bigint& value, const Bigint& modulus);

bool is_probable_prime(const Bigint& n, int rounds = 40);
Bigint next_prime(const Bigint& n);

size_t bit_length(const Bigint& n);

/// Minimal big-endian encoding (canonical: no leading zero bytes; 0 -> empty).
std::vector<uint8_t> to_bytes(const Bigint& n);
/// Big-endian encoding left-padded to `width` bytes; throws if it doesn't fit.
std::vector<uint8_t> to_bytes_padded(const Bigint& n, size_t width);
Bigint from_bytes(const uint8_t* data, size_t len);

/// Deterministic random stream. Forks derive independent child streams from
/// (seed, label) only, not from the parent's consumption state, so the stream
/// layout of a run is stable under code motion.
class Rng {
 public:
  explicit Rng(uint64_t seed);
  explicit Rng(const std::array<uint8_t, 32>& seed);
  Rng(const Rng&) = delete;
  Rng& operator=(const Rng&) = delete;
  Rng(Rng&&) = default;
  Rng& operator=(Rng&&) = default;

  Rng fork(std::string_view label) const;

  /// Uniform in [0, 2^bits).
  Bigint bits(unsigned bit_count);
  /// Uniform in [0, bound), bound >= 1.
  Bigint below(const Bigint& bound);
  /// Uniform element of Z*_modulus, modulus >= 2.
  Bigint unit(const Bigint& modulus);

  uint64_t u64();
  /// Uniform in [0, bound), bound >= 1.
  uint32_t index(uint32_t bound);
  /// First k entries of a seeded Fisher-Yates shuffle of 0..n-1, sorted.
  std::vector<uint32_t> sample_indices(uint32_t n, uint32_t k);

 private:
  std::array<uint8_t, 32> seed_bytes_{};
  std::unique_ptr<gmp_randclass> state_;  // gmp_randclass itself is unmovable
};

}  // namespace fedboost
