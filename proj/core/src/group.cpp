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
#include "fedboost/group.hpp"

#include <cstring>

#include "fedboost/errors.hpp"

namespace fedboost {

namespace {

constexpr char kMagic[] = "fbgp1\n";
constexpr int kPrimeRounds = 40;

// Safe prime of exactly `bits` bits: q = 2q'+1 with q' prime. Incremental
// sieving over q' candidates from a random start.
Bigint safe_prime(unsigned bits, Rng& rng, uint64_t budget) {
  if (bits < 4) throw DomainError("safe_prime: need >= 4 bits");
  // q' has bits-1 bits with the top bit set so q lands in [2^(bits-1), 2^bits).
  Bigint cand = rng.bits(bits - 1);
  mpz_setbit(cand.get_mpz_t(), bits - 2);
  mpz_setbit(cand.get_mpz_t(), 0);
  Bigint top = Bigint(1) << (bits - 1);
  for (uint64_t i = 0; i < budget; ++i, cand += 2) {
    if (cand >= top) {  // wrap within the q' window
      cand = Bigint(1) << (bits - 2);
      mpz_setbit(cand.get_mpz_t(), 0);
    }
    if (!is_probable_prime(cand, kPrimeRounds)) continue;
    Bigint q = 2 * cand + 1;
    if (is_probable_prime(q, kPrimeRounds)) return q;
  }
  throw GenerationFailure("safe_prime: attempt budget exhausted");
}

// Generator of the cyclic group Z*_{q^2} (order q(q-1)) by rejection on the
// prime factors {q, 2, (q-1)/2} of the group order.
Bigint component_generator(const Bigint& q, Rng& rng) {
  Bigint qsq = q * q;
  Bigint order = q * (q - 1);
  const Bigint factors[] = {q, Bigint(2), (q - 1) / 2};
  for (int i = 0; i < 4096; ++i) {
    Bigint x = rng.unit(qsq);
    bool full_order = true;
    for (const Bigint& f : factors) {
      if (mod_exp(x, order / f, qsq) == 1) {
        full_order = false;
        break;
      }
    }
    if (full_order) return x;
  }
  throw GenerationFailure("component_generator: no primitive root found");
}

// Element of order exactly (q1-1)(q2-1)/2 in Z*_{N^2}: kill the q-part of
// each component's order, then CRT-combine. Exponentiating a single random
// unit by N does not work here — when q2 = 2*q1 + 1 (the natural test
// fixtures), q1 divides both N and the needed order and would be cancelled.
Bigint find_generator(const Bigint& q1, const Bigint& q2, const Bigint& N2, Rng& rng) {
  Bigint q1sq = q1 * q1;
  Bigint q2sq = q2 * q2;
  Bigint y1 = mod_exp(component_generator(q1, rng), q1, q1sq);  // order 2*q1'
  Bigint y2 = mod_exp(component_generator(q2, rng), q2, q2sq);  // order 2*q2'
  Bigint k = (y2 - y1) % q2sq * mod_inverse(q1sq % q2sq, q2sq) % q2sq;
  if (k < 0) k += q2sq;
  return (y1 + q1sq * k) % N2;
}

GroupParams finish_params(const Bigint& q1, const Bigint& q2, Rng& rng) {
  GroupParams gp;
  gp.q1 = q1;
  gp.q2 = q2;
  gp.N = q1 * q2;
  gp.N2 = gp.N * gp.N;
  gp.ord_g = (q1 - 1) * (q2 - 1) / 2;
  gp.sec_param = static_cast<unsigned>(bit_length(gp.N));
  gp.g = find_generator(q1, q2, gp.N2, rng);
  gp.p = next_prime(2 * gp.ord_g);
  gp.validate();
  return gp;
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t get_u32(const std::vector<uint8_t>& in, size_t& pos) {
  if (pos + 4 > in.size()) throw ParseError("group params: truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in[pos++];
  return v;
}

void put_field(std::vector<uint8_t>& out, const Bigint& v) {
  std::vector<uint8_t> raw = to_bytes(v);
  put_u32(out, static_cast<uint32_t>(raw.size()));
  out.insert(out.end(), raw.begin(), raw.end());
}

Bigint get_field(const std::vector<uint8_t>& in, size_t& pos) {
  uint32_t len = get_u32(in, pos);
  if (pos + len > in.size()) throw ParseError("group params: truncated field");
  Bigint v = from_bytes(in.data() + pos, len);
  pos += len;
  return v;
}

}  // namespace

size_t GroupParams::element_bytes() const { return (bit_length(N2) + 7) / 8; }

size_t GroupParams::share_bytes() const { return (bit_length(p) + 7) / 8; }

void GroupParams::validate() const {
  bool has_primes = q1 != 0 && q2 != 0;
  if (has_primes) {
    const Bigint q1p = (q1 - 1) / 2;
    const Bigint q2p = (q2 - 1) / 2;
    if (q1 == q2) throw DomainError("group: q1 == q2");
    if (q1 != 2 * q1p + 1 || q2 != 2 * q2p + 1) throw DomainError("group: primes not odd");
    for (const Bigint* v : {&q1, &q2, &q1p, &q2p}) {
      if (!is_probable_prime(*v, kPrimeRounds)) throw DomainError("group: compositeness detected");
    }
    if (N != q1 * q2) throw DomainError("group: modulus mismatch");
    if (ord_g != (q1 - 1) * (q2 - 1) / 2) throw DomainError("group: bad order");
    if (mod_exp(g, ord_g / q1p, N2) == 1 || mod_exp(g, ord_g / q2p, N2) == 1) {
      throw DomainError("group: g has small order");
    }
  }
  if (!is_probable_prime(p, kPrimeRounds)) throw DomainError("group: p composite");
  if (N2 != N * N) throw DomainError("group: N2 != N^2");
  if (mod_exp(g, ord_g, N2) != 1) throw DomainError("group: g^ord != 1");
  if (p <= ord_g) throw DomainError("group: p must exceed ord_g");
}

std::vector<uint8_t> GroupParams::serialize() const {
  std::vector<uint8_t> out(kMagic, kMagic + sizeof(kMagic) - 1);
  put_u32(out, sec_param);
  for (const Bigint* v : {&q1, &q2, &N, &N2, &g, &ord_g, &p}) put_field(out, *v);
  return out;
}

std::vector<uint8_t> GroupParams::serialize_public() const {
  GroupParams pub = *this;
  pub.q1 = 0;
  pub.q2 = 0;
  return pub.serialize();
}

GroupParams GroupParams::deserialize(const std::vector<uint8_t>& bytes) {
  size_t magic_len = sizeof(kMagic) - 1;
  if (bytes.size() < magic_len || std::memcmp(bytes.data(), kMagic, magic_len) != 0) {
    throw ParseError("group params: bad magic");
  }
  size_t pos = magic_len;
  GroupParams gp;
  gp.sec_param = get_u32(bytes, pos);
  gp.q1 = get_field(bytes, pos);
  gp.q2 = get_field(bytes, pos);
  gp.N = get_field(bytes, pos);
  gp.N2 = get_field(bytes, pos);
  gp.g = get_field(bytes, pos);
  gp.ord_g = get_field(bytes, pos);
  gp.p = get_field(bytes, pos);
  gp.validate();
  return gp;
}

GroupParams generate_group(unsigned sec_param, Rng& rng) {
  if (sec_param < 16) throw DomainError("generate_group: sec_param must be >= 16");
  unsigned hi = (sec_param + 1) / 2;
  unsigned lo = sec_param - hi + 1;
  uint64_t budget = 64ull * sec_param * sec_param + 4096;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Bigint q1 = safe_prime(hi, rng, budget);
    Bigint q2 = safe_prime(lo, rng, budget);
    if (q1 == q2) continue;
    Bigint N = q1 * q2;
    if (bit_length(N) != sec_param) continue;
    return finish_params(q1, q2, rng);
  }
  throw GenerationFailure("generate_group: could not hit requested modulus width");
}

GroupParams group_from_primes(const Bigint& q1, const Bigint& q2, Rng& rng) {
  for (const Bigint& q : {q1, q2}) {
    if (!is_probable_prime(q, kPrimeRounds) || !is_probable_prime((q - 1) / 2, kPrimeRounds)) {
      throw DomainError("group_from_primes: inputs must be safe primes");
    }
  }
  if (q1 == q2) throw DomainError("group_from_primes: q1 == q2");
  return finish_params(q1, q2, rng);
}

Bigint rand_unit(const Bigint& modulus, Rng& rng) { return rng.unit(modulus); }

}  // namespace fedboost
