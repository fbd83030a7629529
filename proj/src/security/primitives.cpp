#include "wot/crypto/primitives.hpp"

#include <memory>

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

namespace wot::crypto {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
struct PkeyDeleter {
  void operator()(EVP_PKEY* key) const { EVP_PKEY_free(key); }
};

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

void check(int rc, const char* what) {
  if (rc != 1) throw CryptoError(what);
}

CipherCtx make_ccm_context(bool encrypt, ByteView key, ByteView nonce) {
  if (key.size() != ccm::kKeyLength) throw CryptoError("AES-CCM key must be 16 bytes");
  if (nonce.size() != ccm::kNonceLength) throw CryptoError("AES-CCM nonce must be 13 bytes");
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw CryptoError("EVP_CIPHER_CTX_new failed");
  auto init = encrypt ? EVP_EncryptInit_ex : EVP_DecryptInit_ex;
  check(init(ctx.get(), EVP_aes_128_ccm(), nullptr, nullptr, nullptr), "ccm init");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_IVLEN, static_cast<int>(nonce.size()), nullptr), "ccm ivlen");
  return ctx;
}

} // namespace

std::array<std::uint8_t, 32> sha256(ByteView data) {
  std::array<std::uint8_t, 32> out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

std::array<std::uint8_t, 32> hmac_sha256(ByteView key, ByteView data) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  static const std::uint8_t empty = 0;
  if (!HMAC(EVP_sha256(), key.empty() ? &empty : key.data(), static_cast<int>(key.size()), data.data(), data.size(),
            out.data(), &len)) {
    throw CryptoError("HMAC failed");
  }
  return out;
}

Bytes aes_ccm_encrypt(ByteView key, ByteView nonce, ByteView aad, ByteView plaintext) {
  auto ctx = make_ccm_context(true, key, nonce);
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, ccm::kTagLength, nullptr), "ccm taglen");
  check(EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()), "ccm key");
  int len = 0;
  check(EVP_EncryptUpdate(ctx.get(), nullptr, &len, nullptr, static_cast<int>(plaintext.size())), "ccm length");
  if (!aad.empty()) check(EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())), "ccm aad");
  Bytes out(plaintext.size() + ccm::kTagLength);
  static const std::uint8_t empty = 0;
  check(EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.empty() ? &empty : plaintext.data(),
                          static_cast<int>(plaintext.size())),
        "ccm encrypt");
  int final_len = 0;
  check(EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &final_len), "ccm final");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, ccm::kTagLength, out.data() + plaintext.size()),
        "ccm get tag");
  return out;
}

std::optional<Bytes> aes_ccm_decrypt(ByteView key, ByteView nonce, ByteView aad, ByteView ciphertext) {
  if (ciphertext.size() < ccm::kTagLength) return std::nullopt;
  const std::size_t body = ciphertext.size() - ccm::kTagLength;
  auto ctx = make_ccm_context(false, key, nonce);
  Bytes tag(ciphertext.begin() + static_cast<std::ptrdiff_t>(body), ciphertext.end());
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, ccm::kTagLength, tag.data()), "ccm set tag");
  check(EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()), "ccm key");
  int len = 0;
  check(EVP_DecryptUpdate(ctx.get(), nullptr, &len, nullptr, static_cast<int>(body)), "ccm length");
  if (!aad.empty()) check(EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())), "ccm aad");
  Bytes out(body);
  static std::uint8_t scratch = 0;
  int rc = EVP_DecryptUpdate(ctx.get(), body ? out.data() : &scratch, &len, ciphertext.data(), static_cast<int>(body));
  if (rc != 1) return std::nullopt;
  return out;
}

Ed25519KeyPair ed25519_from_seed(ByteView seed32) {
  if (seed32.size() != 32) throw CryptoError("Ed25519 seed must be 32 bytes");
  Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed32.data(), seed32.size()));
  if (!key) throw CryptoError("Ed25519 key import failed");
  Ed25519KeyPair pair;
  std::copy(seed32.begin(), seed32.end(), pair.seed.begin());
  std::size_t len = pair.public_key.size();
  check(EVP_PKEY_get_raw_public_key(key.get(), pair.public_key.data(), &len), "Ed25519 public key");
  return pair;
}

Bytes ed25519_sign(const Ed25519KeyPair& pair, ByteView message) {
  Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, pair.seed.data(), pair.seed.size()));
  if (!key) throw CryptoError("Ed25519 key import failed");
  MdCtx ctx(EVP_MD_CTX_new());
  check(EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()), "Ed25519 sign init");
  Bytes sig(kEd25519SignatureLength);
  std::size_t len = sig.size();
  check(EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()), "Ed25519 sign");
  return sig;
}

bool ed25519_verify(ByteView public_key, ByteView message, ByteView signature) {
  if (public_key.size() != 32 || signature.size() != kEd25519SignatureLength) return false;
  Pkey key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(), public_key.size()));
  if (!key) return false;
  MdCtx ctx(EVP_MD_CTX_new());
  if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) return false;
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(), message.size()) == 1;
}

} // namespace wot::crypto
