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
#include "fedboost/transport.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <cstring>
#include <memory>

#include "fedboost/errors.hpp"

namespace fedboost {

namespace {

constexpr size_t kNonceLen = 12;
constexpr size_t kTagLen = 16;

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

void put_be32(uint8_t* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<uint8_t>(v >> (24 - 8 * i));
}

void put_be64(uint8_t* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(v >> (56 - 8 * i));
}

}  // namespace

SymKey derive_sym_key(const Bigint& shared_element) {
  std::vector<uint8_t> enc = to_bytes(shared_element);
  uint8_t digest[SHA256_DIGEST_LENGTH];
  SHA256(enc.data(), enc.size(), digest);
  SymKey key;
  std::memcpy(key.bytes.data(), digest, key.bytes.size());
  return key;
}

std::vector<uint8_t> aead_encrypt(const SymKey& key, std::span<const uint8_t> plaintext,
                                  const std::array<uint8_t, 12>& nonce) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::runtime_error("aead: ctx alloc failed");
  std::vector<uint8_t> out(kNonceLen + plaintext.size() + kTagLen);
  std::memcpy(out.data(), nonce.data(), kNonceLen);
  int len = 0;
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.bytes.data(),
                         nonce.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data() + kNonceLen, &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    throw std::runtime_error("aead: encrypt failed");
  }
  int fin = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceLen + len, &fin) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen,
                          out.data() + kNonceLen + plaintext.size()) != 1) {
    throw std::runtime_error("aead: tag failed");
  }
  return out;
}

std::vector<uint8_t> aead_decrypt(const SymKey& key, std::span<const uint8_t> blob) {
  if (blob.size() < kNonceLen + kTagLen) {
    throw AuthenticationFailure("aead: ciphertext too short");
  }
  size_t body_len = blob.size() - kNonceLen - kTagLen;
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::runtime_error("aead: ctx alloc failed");
  std::vector<uint8_t> out(body_len);
  int len = 0;
  uint8_t tag[kTagLen];
  std::memcpy(tag, blob.data() + kNonceLen + body_len, kTagLen);
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.bytes.data(),
                         blob.data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, blob.data() + kNonceLen,
                        static_cast<int>(body_len)) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen, tag) != 1) {
    throw std::runtime_error("aead: decrypt failed");
  }
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1) {
    throw AuthenticationFailure("aead: tag mismatch");
  }
  return out;
}

std::array<uint8_t, 12> make_nonce(uint32_t round, uint32_t sender, uint32_t counter) {
  std::array<uint8_t, 12> nonce{};
  put_be32(nonce.data(), round);
  put_be32(nonce.data() + 4, sender);
  put_be32(nonce.data() + 8, counter);
  return nonce;
}

Bigint prf(const Bigint& key, uint64_t index, const Bigint& modulus) {
  if (modulus < 2) throw DomainError("prf: modulus must be >= 2");
  std::vector<uint8_t> key_bytes = to_bytes(key);
  // 128 extra bits keep the mod-reduction bias negligible.
  size_t need_bits = bit_length(modulus) + 128;
  size_t blocks = (need_bits + 255) / 256;
  std::vector<uint8_t> stream;
  stream.reserve(blocks * SHA256_DIGEST_LENGTH);
  uint8_t msg[12];
  put_be64(msg, index);
  for (size_t b = 0; b < blocks; ++b) {
    put_be32(msg + 8, static_cast<uint32_t>(b));
    uint8_t digest[SHA256_DIGEST_LENGTH];
    unsigned digest_len = 0;
    if (HMAC(EVP_sha256(), key_bytes.data(), static_cast<int>(key_bytes.size()), msg, sizeof msg,
             digest, &digest_len) == nullptr) {
      throw std::runtime_error("prf: hmac failed");
    }
    stream.insert(stream.end(), digest, digest + digest_len);
  }
  return from_bytes(stream.data(), stream.size()) % modulus;
}

}  // namespace fedboost
