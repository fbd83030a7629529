#pragma once

#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "wot/coap/cache_key.hpp"
#include "wot/proxy/actions.hpp"
#include "wot/proxy/response_cache.hpp"

namespace wot::proxy {

struct ProxyConfig {
  SimTime request_timeout = seconds(2);
  int max_request_retries = 3;
  std::size_t cache_capacity = 40;
};

/// A client request recorded in a pending entry.
struct Downstream {
  NodeAddress client;
  Bytes token;
  std::uint16_t message_id = 0;

  friend bool operator==(const Downstream&, const Downstream&) = default;
};

struct PendingEntry {
  coap::CacheKey cache_key;
  /// False for unsafe methods, which never share an entry.
  bool shared = true;
  std::vector<Downstream> downstream;
  Bytes upstream_token;
  /// One request per next-hop; retransmissions resend these unchanged.
  std::vector<SendTo> upstream;
  int retries_left = 0;
  SimTime timeout_at = 0;
  SimTime opened_at = 0;
};

enum class CloseReason { answered, timed_out };
enum class DropReason { duplicate, unmatched };

/// Hooks for tracing; default implementations do nothing.
class ProxyObserver {
 public:
  virtual ~ProxyObserver() = default;
  virtual void on_pending_opened(const PendingEntry&) {}
  virtual void on_request_aggregated(const PendingEntry&, const Downstream&) {}
  virtual void on_pending_closed(const PendingEntry&, CloseReason) {}
  virtual void on_response_dropped(const coap::Message&, const NodeAddress&, DropReason) {}
  virtual void on_cache_hit(const coap::CacheKey&, const Downstream&) {}
};

struct ProxyStats {
  std::uint64_t requests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t aggregated = 0;
  std::uint64_t duplicate_requests = 0;
  std::uint64_t forwarded = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t fib_misses = 0;
  std::uint64_t bad_requests = 0;
  std::uint64_t responses_forwarded = 0;
  std::uint64_t deduplicated = 0;
  std::uint64_t unmatched = 0;
  std::uint64_t evictions = 0;
};

/// Hop-wise CoAP forward proxy. Equal safe requests share one pending entry
/// and one upstream exchange; the first response fans out to every recorded
/// requester and later copies are discarded. Driven entirely by the caller:
/// every input returns the actions to perform.
class ForwardProxy {
 public:
  ForwardProxy(NodeAddress self, Fib fib, ProxyConfig config = {});

  Actions handle_client_request(const coap::Message& request, const NodeAddress& from, SimTime now);
  Actions handle_upstream_response(const coap::Message& response, const NodeAddress& from, SimTime now);
  /// Timer callback. Stale timers (entry gone or re-armed) yield nothing.
  Actions on_request_timeout(const Bytes& upstream_token, SimTime now);

  void set_observer(ProxyObserver* observer) { observer_ = observer; }

  const NodeAddress& address() const { return self_; }
  const Fib& fib() const { return fib_; }
  const ProxyConfig& config() const { return config_; }
  const ProxyStats& stats() const { return stats_; }
  ResponseCache& cache() { return cache_; }
  const ResponseCache& cache() const { return cache_; }
  std::size_t live_entries() const { return by_token_.size(); }
  const PendingEntry* find_pending(const Bytes& upstream_token) const;
  /// Live entry currently holding a safe request with this key.
  const PendingEntry* find_shared(const coap::CacheKey& key) const;

 private:
  struct TransactionKey {
    coap::CacheKey key;
    NodeAddress client;
    Bytes token;
    auto operator<=>(const TransactionKey&) const = default;
  };

  Bytes next_token();
  std::uint16_t next_message_id() { return message_id_++; }
  void remember_consumed(const Bytes& token);
  Actions reply(const Downstream& to, coap::Message response) const;

  NodeAddress self_;
  Fib fib_;
  ProxyConfig config_;
  ResponseCache cache_;
  std::map<Bytes, PendingEntry> by_token_;
  std::unordered_map<coap::CacheKey, Bytes> shared_;
  std::map<TransactionKey, Bytes> unshared_;
  std::set<Bytes> consumed_;
  std::deque<Bytes> consumed_order_;
  std::uint64_t token_counter_ = 0;
  std::uint16_t message_id_ = 1;
  ProxyStats stats_;
  ProxyObserver* observer_ = nullptr;
};

/// Minimal big-endian encoding of a counter, at least one byte.
Bytes encode_token(std::uint64_t counter);

} // namespace wot::proxy
