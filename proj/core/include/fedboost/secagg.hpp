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
#include <map>
#include <span>
#include <vector>

#include "fedboost/bresson.hpp"
#include "fedboost/codec.hpp"
#include "fedboost/shamir.hpp"

namespace fedboost {

// Hybrid masking aggregation. Each user blinds its vector twice: a pairwise
// mask sum that cancels across the full user set, and a server-key power that
// only cancels once the server multiplies *all* active contributions by
// R^-sk. The server therefore cannot decrypt any strict subset, and dropped
// users are repaired through the shares of their private mask key.

/// Pairwise mask keys of one user: peer index -> Key.Agr(sk_pri_me, sk_pub_peer).
struct MaskKeyring {
  uint32_t my_index = 0;
  std::map<uint32_t, Bigint> pairwise;
};

MaskKeyring build_keyring(const GroupParams& gp, uint32_t my_index, const Bigint& my_sk_pri,
                          const std::map<uint32_t, Bigint>& peer_sk_pubs);

/// One user's masked gradient vector; entry j is
///   (1 + (x_j + Y_j)N) * server_pub^(r_u * phi(g^r_u)) mod N^2
/// with Y_j the signed pairwise mask sum for entry j.
struct MaskedVector {
  uint32_t sender = 0;
  std::vector<Bigint> entries;
};

/// Signed pairwise mask sum for one entry, mod N: + prf for higher-indexed
/// peers, - prf for lower-indexed ones.
Bigint pairwise_mask_sum(const MaskKeyring& keys, std::span<const uint32_t> peers, uint64_t entry,
                         const Bigint& N);

/// Masks already-encoded plaintexts (elements of Z_N). `peers` lists the
/// registered users this round (may include my_index; it is skipped).
MaskedVector mask_encoded(std::span<const Bigint> plain, const Bigint& r_u,
                          const MaskKeyring& keys, std::span<const uint32_t> peers,
                          const Bigint& server_pub, const GroupParams& gp);

/// Fixed-point encodes a real vector and masks it.
MaskedVector mask_vector(std::span<const double> x, const Bigint& r_u, const MaskKeyring& keys,
                         std::span<const uint32_t> peers, const Bigint& server_pub,
                         const GroupParams& gp, const FixedPointConfig& cfg);

/// Second-phase message of an active user: the seed g^r_u plus its stored
/// shares for every currently-dropped owner.
struct SeedReveal {
  uint32_t sender = 0;
  Bigint seed;
  std::vector<KeyShare> dropout_shares;
};

/// Throws NotActive when the caller is not on the active list.
SeedReveal open_seed(const GroupParams& gp, uint32_t my_index, const Bigint& r_u,
                     std::span<const uint32_t> registered, std::span<const uint32_t> active,
                     const std::map<uint32_t, KeyShare>& stored_shares);

/// SS.Recon of a dropped user's private mask key.
Bigint recover_dropped_key(std::span<const KeyShare> shares, uint32_t t, const Bigint& p);

/// Server-side state for one aggregation round.
struct AggregationState {
  GroupParams params;
  KeyPair server_keys;
  uint32_t threshold_t = 1;
  std::vector<uint32_t> registered;            // U for this invocation
  std::map<uint32_t, Bigint> user_mask_pubs;   // index -> sk_pub
  std::map<uint32_t, MaskedVector> vectors;
  std::map<uint32_t, SeedReveal> reveals;
  // Recovery shares pooled across reveals and any follow-up requests.
  std::map<uint32_t, std::vector<KeyShare>> share_pool;

  void add_vector(MaskedVector mv);
  void add_reveal(SeedReveal sr);
  /// Sorted senders of received vectors — the published active list U'.
  std::vector<uint32_t> active_list() const;
};

/// Unmasks the aggregate. Active set = senders of both a vector and a reveal
/// (vector-only users are demoted to dropped and recovered). Dropped users
/// need >= t pooled shares each, else InsufficientShares; a residue that is
/// not 1 mod N raises MalformedCiphertext (forced-aggregation violation).
/// Returns the entrywise sum over the final active set, in Z_N.
std::vector<Bigint> aggregate_unmask_raw(const AggregationState& st);

/// aggregate_unmask_raw + fixed-point decode.
std::vector<double> aggregate_unmask(const AggregationState& st, const FixedPointConfig& cfg);

}  // namespace fedboost
