#pragma once

// Thin wrappers over OpenSSL for the handful of primitives the stack needs.
// None of these touch operation counters; the security layer does that.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace wot::crypto {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

class CryptoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::array<std::uint8_t, 32> sha256(ByteView data);
std::array<std::uint8_t, 32> hmac_sha256(ByteView key, ByteView data);

/// AES-CCM with 128-bit key, 64-bit tag, 13-byte nonce (COSE algorithm 10).
namespace ccm {
inline constexpr std::size_t kKeyLength = 16;
inline constexpr std::size_t kNonceLength = 13;
inline constexpr std::size_t kTagLength = 8;
inline constexpr int kCoseAlgorithm = 10;
} // namespace ccm

/// Returns ciphertext || tag.
Bytes aes_ccm_encrypt(ByteView key, ByteView nonce, ByteView aad, ByteView plaintext);
/// Returns nullopt when the tag does not verify.
std::optional<Bytes> aes_ccm_decrypt(ByteView key, ByteView nonce, ByteView aad, ByteView ciphertext);

inline constexpr std::size_t kEd25519SignatureLength = 64;

struct Ed25519KeyPair {
  std::array<std::uint8_t, 32> seed{};
  std::array<std::uint8_t, 32> public_key{};
};

Ed25519KeyPair ed25519_from_seed(ByteView seed32);
Bytes ed25519_sign(const Ed25519KeyPair& key, ByteView message);
bool ed25519_verify(ByteView public_key, ByteView message, ByteView signature);

} // namespace wot::crypto
