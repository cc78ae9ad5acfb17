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
#include "fedboost/bignum.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cstring>
#include <numeric>

#include "fedboost/errors.hpp"

namespace fedboost {

Bigint mod_exp(const Bigint& base, const Bigint& exponent, const Bigint& modulus) {
  if (modulus <= 1) throw DomainError("mod_exp: modulus must be > 1");
  Bigint out;
  if (exponent < 0) {
    Bigint inv = mod_inverse(base, modulus);
    Bigint e = -exponent;
    mpz_powm(out.get_mpz_t(), inv.get_mpz_t(), e.get_mpz_t(), modulus.get_mpz_t());
  } else {
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
  }
  return out;
}

Bigint mod_inverse(const Bigint& value, const Bigint& modulus) {
  Bigint out;
  if (mpz_invert(out.get_mpz_t(), value.get_mpz_t(), modulus.get_mpz_t()) == 0) {
    throw DomainError("mod_inverse: value not invertible");
  }
  return out;
}

bool is_probable_prime(const Bigint& n, int rounds) {
  return mpz_probab_prime_p(n.get_mpz_t(), rounds) != 0;
}

Bigint next_prime(const Bigint& n) {
  Bigint out;
  mpz_nextprime(out.get_mpz_t(), n.get_mpz_t());
  return out;
}

size_t bit_length(const Bigint& n) {
  if (n == 0) return 0;
  return mpz_sizeinbase(n.get_mpz_t(), 2);
}

std::vector<uint8_t> to_bytes(const Bigint& n) {
  if (n < 0) throw DomainError("to_bytes: negative value");
  if (n == 0) return {};
  size_t count = 0;
  std::vector<uint8_t> buf((bit_length(n) + 7) / 8);
  mpz_export(buf.data(), &count, 1, 1, 1, 0, n.get_mpz_t());
  buf.resize(count);
  return buf;
}

std::vector<uint8_t> to_bytes_padded(const Bigint& n, size_t width) {
  std::vector<uint8_t> raw = to_bytes(n);
  if (raw.size() > width) throw DomainError("to_bytes_padded: value wider than field");
  std::vector<uint8_t> out(width, 0);
  std::copy(raw.begin(), raw.end(), out.begin() + (width - raw.size()));
  return out;
}

Bigint from_bytes(const uint8_t* data, size_t len) {
  Bigint out;
  if (len > 0) mpz_import(out.get_mpz_t(), len, 1, 1, 1, 0, data);
  return out;
}

namespace {

std::array<uint8_t, 32> sha256_of(const uint8_t* data, size_t len) {
  std::array<uint8_t, 32> digest{};
  SHA256(data, len, digest.data());
  return digest;
}

}  // namespace

Rng::Rng(uint64_t seed) {
  uint8_t be[8];
  for (int i = 0; i < 8; ++i) be[i] = static_cast<uint8_t>(seed >> (56 - 8 * i));
  seed_bytes_ = sha256_of(be, sizeof be);
  state_ = std::make_unique<gmp_randclass>(gmp_randinit_mt);
  state_->seed(from_bytes(seed_bytes_.data(), seed_bytes_.size()));
}

Rng::Rng(const std::array<uint8_t, 32>& seed) : seed_bytes_(seed) {
  state_ = std::make_unique<gmp_randclass>(gmp_randinit_mt);
  state_->seed(from_bytes(seed_bytes_.data(), seed_bytes_.size()));
}

Rng Rng::fork(std::string_view label) const {
  std::vector<uint8_t> buf(seed_bytes_.begin(), seed_bytes_.end());
  buf.insert(buf.end(), label.begin(), label.end());
  return Rng(sha256_of(buf.data(), buf.size()));
}

Bigint Rng::bits(unsigned bit_count) { return state_->get_z_bits(bit_count); }

Bigint Rng::below(const Bigint& bound) {
  if (bound < 1) throw DomainError("Rng::below: bound must be >= 1");
  return state_->get_z_range(bound);
}

Bigint Rng::unit(const Bigint& modulus) {
  if (modulus < 2) throw DomainError("Rng::unit: modulus must be >= 2");
  while (true) {
    Bigint v = below(modulus - 1) + 1;
    Bigint g;
    mpz_gcd(g.get_mpz_t(), v.get_mpz_t(), modulus.get_mpz_t());
    if (g == 1) return v;
  }
}

uint64_t Rng::u64() {
  Bigint v = bits(64);
  uint64_t out = 0;
  for (size_t i = 0; i < 64; i += 32) {
    Bigint part = (v >> i) & Bigint(0xffffffffUL);
    out |= static_cast<uint64_t>(part.get_ui()) << i;
  }
  return out;
}

uint32_t Rng::index(uint32_t bound) {
  if (bound == 0) throw DomainError("Rng::index: bound must be >= 1");
  return static_cast<uint32_t>(below(Bigint(bound)).get_ui());
}

std::vector<uint32_t> Rng::sample_indices(uint32_t n, uint32_t k) {
  if (k > n) throw DomainError("Rng::sample_indices: k > n");
  std::vector<uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0u);
  for (uint32_t i = 0; i < k; ++i) {
    uint32_t j = i + index(n - i);
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace fedboost
