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
#include <benchmark/benchmark.h>

#include <map>

#include "fedboost/bresson.hpp"
#include "fedboost/secagg.hpp"
#include "fedboost/shamir.hpp"
#include "fedboost/transport.hpp"

namespace {

using namespace fedboost;

GroupParams& params(unsigned bits) {
  static std::map<unsigned, GroupParams> cache;
  auto it = cache.find(bits);
  if (it == cache.end()) {
    Rng rng(4242);
    it = cache.emplace(bits, generate_group(bits, rng)).first;
  }
  return it->second;
}

void BM_ModExp(benchmark::State& state) {
  GroupParams& gp = params(static_cast<unsigned>(state.range(0)));
  Rng rng(1);
  Bigint base = rng.unit(gp.N2);
  Bigint exp = rng.below(gp.ord_g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mod_exp(base, exp, gp.N2));
  }
}
BENCHMARK(BM_ModExp)->Arg(64)->Arg(128)->Arg(512);

void BM_EncryptDecrypt(benchmark::State& state) {
  GroupParams& gp = params(static_cast<unsigned>(state.range(0)));
  Rng rng(2);
  KeyPair kp = key_gen(gp, rng);
  for (auto _ : state) {
    Ciphertext ct = encrypt(gp, kp.pub, 42, rng);
    benchmark::DoNotOptimize(decrypt(gp, kp.pri, ct));
  }
}
BENCHMARK(BM_EncryptDecrypt)->Arg(64)->Arg(128);

void BM_MaskVector(benchmark::State& state) {
  GroupParams& gp = params(64);
  unsigned n = 10;
  Rng rng(3);
  KeyPair server = key_gen(gp, rng);
  std::map<uint32_t, Bigint> pubs;
  std::map<uint32_t, KeyPair> keys;
  std::vector<uint32_t> users;
  for (uint32_t u = 1; u <= n; ++u) {
    keys[u] = key_gen(gp, rng);
    pubs[u] = keys[u].pub;
    users.push_back(u);
  }
  MaskKeyring ring = build_keyring(gp, 1, keys[1].pri, pubs);
  std::vector<Bigint> plain(static_cast<size_t>(state.range(0)), Bigint(7));
  for (auto _ : state) {
    Bigint r = rng.unit(gp.N);
    benchmark::DoNotOptimize(mask_encoded(plain, r, ring, users, server.pub, gp));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MaskVector)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oN);

void BM_ShamirReconstruct(benchmark::State& state) {
  GroupParams& gp = params(64);
  Rng rng(4);
  uint32_t n = static_cast<uint32_t>(state.range(0));
  uint32_t t = std::max<uint32_t>(1, 3 * n / 5);
  Bigint secret = rng.below(gp.ord_g - 1) + 1;
  std::vector<KeyShare> shares = share(secret, t, n, gp.p, rng);
  shares.resize(t);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reconstruct(shares, t, gp.p));
  }
  state.SetComplexityN(t);
}
BENCHMARK(BM_ShamirReconstruct)->Arg(10)->Arg(50)->Arg(100)->Complexity(benchmark::oNSquared);

void BM_Prf(benchmark::State& state) {
  GroupParams& gp = params(64);
  Bigint key = 1234567890123456789_mpz;
  uint64_t j = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prf(key, j++, gp.N));
  }
}
BENCHMARK(BM_Prf);

}  // namespace

BENCHMARK_MAIN();
