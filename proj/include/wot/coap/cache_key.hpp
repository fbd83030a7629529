#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>

#include "wot/coap/message.hpp"

namespace wot::coap {

/// SHA-256 digest over a request's code, cache-relevant options and
/// payload. Token, message id and type never contribute.
struct CacheKey {
  std::array<std::uint8_t, 32> digest{};

  std::string hex() const { return to_hex(digest); }
  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

class CacheKeyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Throws CacheKeyError for responses.
CacheKey compute_cache_key(const Message& request);

} // namespace wot::coap

template <>
struct std::hash<wot::coap::CacheKey> {
  std::size_t operator()(const wot::coap::CacheKey& key) const noexcept {
    std::size_t h;
    std::memcpy(&h, key.digest.data(), sizeof h);
    return h;
  }
};
