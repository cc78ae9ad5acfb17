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
#include "fedboost/group.hpp"

namespace fedboost {

struct KeyPair {
  Bigint pri;  // uniform in [1, ord_g)
  Bigint pub;  // g^pri mod N^2
};

/// (c1, c2) = (g^r, (1+mN)·pub^r) mod N^2. Additively homomorphic in m.
struct Ciphertext {
  Bigint c1, c2;
};

KeyPair key_gen(const GroupParams& gp, Rng& rng);

/// Encrypts m in [0, N) under pub with a fresh unit r of Z_N.
Ciphertext encrypt(const GroupParams& gp, const Bigint& pub, const Bigint& m, Rng& rng);
/// Same with caller-supplied randomness (known-answer tests).
Ciphertext encrypt_with_r(const GroupParams& gp, const Bigint& pub, const Bigint& m,
                          const Bigint& r);

/// m = (c2 / c1^pri - 1)/N. Throws MalformedCiphertext when the unmasked
/// value is not 1 mod N — the signal that the server skipped aggregation.
Bigint decrypt(const GroupParams& gp, const Bigint& pri, const Ciphertext& ct);

/// Componentwise product mod N^2; decrypts to the sum of plaintexts mod N.
Ciphertext add_ciphertexts(const GroupParams& gp, const Ciphertext& a, const Ciphertext& b);

/// their_pub^my_pri mod N^2; symmetric in the two key pairs.
Bigint key_agree(const GroupParams& gp, const Bigint& my_pri, const Bigint& their_pub);

}  // namespace fedboost
