#pragma once

#include <cstdint>

namespace wot::security {

/// Per-node tally of cryptographic operations.
struct CryptoCounters {
  std::uint64_t aead_ops = 0;
  std::uint64_t sign_ops = 0;
  std::uint64_t verify_ops = 0;
  std::uint64_t hmac_ops = 0;

  CryptoCounters& operator+=(const CryptoCounters& other) {
    aead_ops += other.aead_ops;
    sign_ops += other.sign_ops;
    verify_ops += other.verify_ops;
    hmac_ops += other.hmac_ops;
    return *this;
  }
  friend bool operator==(const CryptoCounters&, const CryptoCounters&) = default;
};

} // namespace wot::security
