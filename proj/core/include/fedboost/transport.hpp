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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fedboost/bignum.hpp"

namespace fedboost {

/// 128-bit AES-GCM key derived from a key-agreement group element.
struct SymKey {
  std::array<uint8_t, 16> bytes{};
  bool operator==(const SymKey&) const = default;
};

/// SHA-256 of the canonical (minimal big-endian) encoding of the shared
/// element, truncated to 16 bytes. Both key-agreement directions yield the
/// same element, hence the same key.
SymKey derive_sym_key(const Bigint& shared_element);

/// AES-128-GCM. Output layout: nonce(12) || body(len(plaintext)) || tag(16).
std::vector<uint8_t> aead_encrypt(const SymKey& key, std::span<const uint8_t> plaintext,
                                  const std::array<uint8_t, 12>& nonce);
/// Inverse of aead_encrypt; throws AuthenticationFailure on any tampering or
/// wrong key.
std::vector<uint8_t> aead_decrypt(const SymKey& key, std::span<const uint8_t> blob);

/// round(4) || sender(4) || counter(4), big-endian. Unique as long as each
/// sender keeps its counter monotone.
std::array<uint8_t, 12> make_nonce(uint32_t round, uint32_t sender, uint32_t counter);

/// The masking PRF: HMAC-SHA256 keyed by the canonical encoding of `key`,
/// applied to (index || block counter) until bits(modulus)+128 output bits
/// are available, reduced mod modulus.
Bigint prf(const Bigint& key, uint64_t index, const Bigint& modulus);

}  // namespace fedboost
