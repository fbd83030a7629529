#include "wot/coap/cache_key.hpp"

#include "wot/crypto/primitives.hpp"

namespace wot::coap {

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

} // namespace

CacheKey compute_cache_key(const Message& request) {
  if (!request.is_request()) throw CacheKeyError("cache key requested for a response (" + code_name(request.code()) + ")");
  // Length-prefixed fields keep the serialization injective.
  Bytes canonical;
  canonical.reserve(64 + request.payload().size());
  canonical.push_back(static_cast<std::uint8_t>(request.code()));
  for (const auto& opt : request.options()) {
    if (!is_cache_relevant(opt.number)) continue;
    auto number = static_cast<std::uint16_t>(opt.number);
    canonical.push_back(static_cast<std::uint8_t>(number >> 8));
    canonical.push_back(static_cast<std::uint8_t>(number & 0xFF));
    put_u32(canonical, static_cast<std::uint32_t>(opt.value.size()));
    canonical.insert(canonical.end(), opt.value.begin(), opt.value.end());
  }
  canonical.push_back(0xFF);
  put_u32(canonical, static_cast<std::uint32_t>(request.payload().size()));
  canonical.insert(canonical.end(), request.payload().begin(), request.payload().end());

  CacheKey key;
  key.digest = crypto::sha256(canonical);
  return key;
}

} // namespace wot::coap
