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
#include "fedboost/secagg.hpp"

#include <algorithm>

#include "fedboost/errors.hpp"
#include "fedboost/transport.hpp"

namespace fedboost {

MaskKeyring build_keyring(const GroupParams& gp, uint32_t my_index, const Bigint& my_sk_pri,
                          const std::map<uint32_t, Bigint>& peer_sk_pubs) {
  MaskKeyring ring;
  ring.my_index = my_index;
  for (const auto& [peer, pub] : peer_sk_pubs) {
    if (peer == my_index) continue;
    ring.pairwise[peer] = key_agree(gp, my_sk_pri, pub);
  }
  return ring;
}

Bigint pairwise_mask_sum(const MaskKeyring& keys, std::span<const uint32_t> peers, uint64_t entry,
                         const Bigint& N) {
  Bigint sum = 0;
  for (uint32_t peer : peers) {
    if (peer == keys.my_index) continue;
    auto it = keys.pairwise.find(peer);
    if (it == keys.pairwise.end()) throw DomainError("mask: missing pairwise key for peer");
    Bigint term = prf(it->second, entry, N);
    if (keys.my_index < peer) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  sum %= N;
  if (sum < 0) sum += N;
  return sum;
}

MaskedVector mask_encoded(std::span<const Bigint> plain, const Bigint& r_u,
                          const MaskKeyring& keys, std::span<const uint32_t> peers,
                          const Bigint& server_pub, const GroupParams& gp) {
  if (plain.empty()) throw DomainError("mask: empty vector");
  Bigint seed = mod_exp(gp.g, r_u, gp.N2);
  Bigint blinder = mod_exp(server_pub, r_u * prf(seed, 0, gp.N), gp.N2);
  MaskedVector mv;
  mv.sender = keys.my_index;
  mv.entries.reserve(plain.size());
  for (size_t j = 0; j < plain.size(); ++j) {
    if (plain[j] < 0 || plain[j] >= gp.N) throw DomainError("mask: plaintext outside Z_N");
    Bigint masked = (plain[j] + pairwise_mask_sum(keys, peers, j, gp.N)) % gp.N;
    mv.entries.push_back((1 + masked * gp.N) * blinder % gp.N2);
  }
  return mv;
}

MaskedVector mask_vector(std::span<const double> x, const Bigint& r_u, const MaskKeyring& keys,
                         std::span<const uint32_t> peers, const Bigint& server_pub,
                         const GroupParams& gp, const FixedPointConfig& cfg) {
  std::vector<Bigint> plain;
  plain.reserve(x.size());
  for (double v : x) plain.push_back(encode(v, cfg));
  return mask_encoded(plain, r_u, keys, peers, server_pub, gp);
}

SeedReveal open_seed(const GroupParams& gp, uint32_t my_index, const Bigint& r_u,
                     std::span<const uint32_t> registered, std::span<const uint32_t> active,
                     const std::map<uint32_t, KeyShare>& stored_shares) {
  if (std::find(active.begin(), active.end(), my_index) == active.end()) {
    throw NotActive("open_seed: caller not in the active list");
  }
  SeedReveal sr;
  sr.sender = my_index;
  sr.seed = mod_exp(gp.g, r_u, gp.N2);
  for (uint32_t u : registered) {
    if (std::find(active.begin(), active.end(), u) != active.end()) continue;
    auto it = stored_shares.find(u);
    if (it != stored_shares.end()) sr.dropout_shares.push_back(it->second);
  }
  return sr;
}

Bigint recover_dropped_key(std::span<const KeyShare> shares, uint32_t t, const Bigint& p) {
  return reconstruct(shares, t, p);
}

void AggregationState::add_vector(MaskedVector mv) {
  if (std::find(registered.begin(), registered.end(), mv.sender) == registered.end()) {
    throw DomainError("secagg: vector from unregistered sender");
  }
  if (!vectors.empty() && mv.entries.size() != vectors.begin()->second.entries.size()) {
    throw ProtocolIncomplete("secagg: vector length mismatch");
  }
  vectors[mv.sender] = std::move(mv);
}

void AggregationState::add_reveal(SeedReveal sr) {
  for (const KeyShare& s : sr.dropout_shares) share_pool[s.owner].push_back(s);
  reveals[sr.sender] = std::move(sr);
}

std::vector<uint32_t> AggregationState::active_list() const {
  std::vector<uint32_t> out;
  out.reserve(vectors.size());
  for (const auto& [sender, mv] : vectors) out.push_back(sender);
  return out;
}

std::vector<Bigint> aggregate_unmask_raw(const AggregationState& st) {
  if (st.vectors.empty()) throw ProtocolIncomplete("secagg: no vectors received");

  // A user that sent its vector but never revealed its seed is demoted to
  // dropped: without the seed its blinder cannot enter R.
  std::vector<uint32_t> active;
  for (const auto& [sender, mv] : st.vectors) {
    if (st.reveals.count(sender)) active.push_back(sender);
  }
  if (active.empty()) throw ProtocolIncomplete("secagg: no reveals received");
  std::vector<uint32_t> dropped;
  for (uint32_t u : st.registered) {
    if (!std::binary_search(active.begin(), active.end(), u)) dropped.push_back(u);
  }

  const GroupParams& gp = st.params;
  size_t m = st.vectors.at(active.front()).entries.size();

  // R = prod over active seeds of seed^phi(seed); one inversion serves all
  // entries.
  Bigint r_acc = 1;
  for (uint32_t u : active) {
    const Bigint& seed = st.reveals.at(u).seed;
    r_acc = r_acc * mod_exp(seed, prf(seed, 0, gp.N), gp.N2) % gp.N2;
  }
  Bigint unblind = mod_exp(mod_inverse(r_acc, gp.N2), st.server_keys.pri, gp.N2);

  // Residual-mask correction for dropped users: recover each private mask
  // key, rebuild its pairwise keys with the active set, and accumulate the
  // signed prf sums per entry.
  std::vector<Bigint> correction(m, Bigint(0));
  for (uint32_t u0 : dropped) {
    auto pool_it = st.share_pool.find(u0);
    size_t have = pool_it == st.share_pool.end() ? 0 : pool_it->second.size();
    if (have < st.threshold_t) {
      throw InsufficientShares("secagg: cannot recover dropped user's mask key");
    }
    Bigint pri = recover_dropped_key(pool_it->second, st.threshold_t, gp.p);
    for (uint32_t v : active) {
      auto pub_it = st.user_mask_pubs.find(v);
      if (pub_it == st.user_mask_pubs.end()) {
        throw ProtocolIncomplete("secagg: missing mask public key for active user");
      }
      Bigint k = key_agree(gp, pri, pub_it->second);
      for (size_t j = 0; j < m; ++j) {
        Bigint term = prf(k, j, gp.N);
        if (u0 < v) {
          correction[j] += term;
        } else {
          correction[j] -= term;
        }
      }
    }
  }

  std::vector<Bigint> result(m);
  for (size_t j = 0; j < m; ++j) {
    Bigint prod = 1;
    for (uint32_t u : active) {
      const MaskedVector& mv = st.vectors.at(u);
      if (mv.entries.size() != m) throw ProtocolIncomplete("secagg: vector length mismatch");
      prod = prod * mv.entries[j] % gp.N2;
    }
    Bigint x = prod * unblind % gp.N2 - 1;
    if (x % gp.N != 0) {
      throw MalformedCiphertext("secagg: unmasked value not 1 mod N (incomplete aggregation)");
    }
    Bigint y = (x / gp.N + correction[j]) % gp.N;
    if (y < 0) y += gp.N;
    result[j] = y;
  }
  return result;
}

std::vector<double> aggregate_unmask(const AggregationState& st, const FixedPointConfig& cfg) {
  std::vector<Bigint> raw = aggregate_unmask_raw(st);
  std::vector<double> out;
  out.reserve(raw.size());
  for (const Bigint& v : raw) out.push_back(decode(v, cfg));
  return out;
}

}  // namespace fedboost
