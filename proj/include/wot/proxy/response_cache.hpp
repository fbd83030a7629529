#pragma once

#include <list>
#include <unordered_map>

#include "wot/coap/cache_key.hpp"
#include "wot/time.hpp"

namespace wot::proxy {

/// Fixed-capacity LRU map from cache key to response.
class ResponseCache {
 public:
  struct Entry {
    coap::CacheKey key;
    coap::Message response;
    SimTime inserted_at = 0;
  };

  explicit ResponseCache(std::size_t capacity);

  /// Stores or overwrites; returns how many entries were evicted (0 or 1).
  std::size_t insert(const coap::CacheKey& key, coap::Message response, SimTime now);
  /// Marks the entry most recently used.
  const Entry* lookup(const coap::CacheKey& key);
  /// Lookup without touching recency.
  const Entry* peek(const coap::CacheKey& key) const;

  std::size_t size() const { return map_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Keys from most to least recently used.
  std::vector<coap::CacheKey> keys() const;

 private:
  std::size_t capacity_;
  std::list<Entry> order_;  // front = most recent
  std::unordered_map<coap::CacheKey, std::list<Entry>::iterator> map_;
};

} // namespace wot::proxy
