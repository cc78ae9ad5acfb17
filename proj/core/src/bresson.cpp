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
#include "fedboost/bresson.hpp"

#include "fedboost/errors.hpp"

namespace fedboost {

KeyPair key_gen(const GroupParams& gp, Rng& rng) {
  KeyPair kp;
  kp.pri = rng.below(gp.ord_g - 1) + 1;  // [1, ord_g)
  kp.pub = mod_exp(gp.g, kp.pri, gp.N2);
  return kp;
}

Ciphertext encrypt(const GroupParams& gp, const Bigint& pub, const Bigint& m, Rng& rng) {
  return encrypt_with_r(gp, pub, m, rng.unit(gp.N));
}

Ciphertext encrypt_with_r(const GroupParams& gp, const Bigint& pub, const Bigint& m,
                          const Bigint& r) {
  if (m < 0 || m >= gp.N) throw DomainError("encrypt: plaintext outside [0, N)");
  Ciphertext ct;
  ct.c1 = mod_exp(gp.g, r, gp.N2);
  ct.c2 = (1 + m * gp.N) * mod_exp(pub, r, gp.N2) % gp.N2;
  return ct;
}

Bigint decrypt(const GroupParams& gp, const Bigint& pri, const Ciphertext& ct) {
  Bigint blind = mod_exp(ct.c1, pri, gp.N2);
  Bigint v = ct.c2 * mod_inverse(blind, gp.N2) % gp.N2;
  Bigint w = v - 1;
  if (w % gp.N != 0) throw MalformedCiphertext("decrypt: value is not 1 mod N");
  return w / gp.N;
}

Ciphertext add_ciphertexts(const GroupParams& gp, const Ciphertext& a, const Ciphertext& b) {
  return Ciphertext{a.c1 * b.c1 % gp.N2, a.c2 * b.c2 % gp.N2};
}

Bigint key_agree(const GroupParams& gp, const Bigint& my_pri, const Bigint& their_pub) {
  return mod_exp(their_pub, my_pri, gp.N2);
}

}  // namespace fedboost
