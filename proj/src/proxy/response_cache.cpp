#include "wot/proxy/response_cache.hpp"

#include <stdexcept>

namespace wot::proxy {

ResponseCache::ResponseCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("cache capacity must be positive");
}

std::size_t ResponseCache::insert(const coap::CacheKey& key, coap::Message response, SimTime now) {
  if (auto it = map_.find(key); it != map_.end()) {
    it->second->response = std::move(response);
    it->second->inserted_at = now;
    order_.splice(order_.begin(), order_, it->second);
    return 0;
  }
  std::size_t evicted = 0;
  if (map_.size() == capacity_) {
    map_.erase(order_.back().key);
    order_.pop_back();
    evicted = 1;
  }
  order_.push_front({key, std::move(response), now});
  map_.emplace(key, order_.begin());
  return evicted;
}

const ResponseCache::Entry* ResponseCache::lookup(const coap::CacheKey& key) {
  auto it = map_.find(key);
  if (it == map_.end()) return nullptr;
  order_.splice(order_.begin(), order_, it->second);
  return &*it->second;
}

const ResponseCache::Entry* ResponseCache::peek(const coap::CacheKey& key) const {
  auto it = map_.find(key);
  return it == map_.end() ? nullptr : &*it->second;
}

std::vector<coap::CacheKey> ResponseCache::keys() const {
  std::vector<coap::CacheKey> out;
  out.reserve(order_.size());
  for (const auto& e : order_) out.push_back(e.key);
  return out;
}

} // namespace wot::proxy
