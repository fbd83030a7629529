#include "wot/proxy/forward_proxy.hpp"

#include <algorithm>

#include "wot/coap/uri.hpp"

namespace wot::proxy {

namespace {

constexpr std::size_t kConsumedMemory = 1024;

coap::Message error_response(coap::Code code) {
  coap::Message m(code, coap::Type::ack, 0);
  return m;
}

} // namespace

Bytes encode_token(std::uint64_t counter) {
  Bytes out;
  for (int shift = 56; shift >= 0; shift -= 8) {
    auto b = static_cast<std::uint8_t>(counter >> shift);
    if (!out.empty() || b != 0) out.push_back(b);
  }
  if (out.empty()) out.push_back(0);
  return out;
}

ForwardProxy::ForwardProxy(NodeAddress self, Fib fib, ProxyConfig config)
    : self_(std::move(self)), fib_(std::move(fib)), config_(config), cache_(config.cache_capacity) {
  if (config_.request_timeout <= 0 || config_.max_request_retries < 0) {
    throw std::invalid_argument("proxy timeout must be positive and retries non-negative");
  }
}

Bytes ForwardProxy::next_token() { return encode_token(token_counter_++); }

const PendingEntry* ForwardProxy::find_pending(const Bytes& upstream_token) const {
  auto it = by_token_.find(upstream_token);
  return it == by_token_.end() ? nullptr : &it->second;
}

const PendingEntry* ForwardProxy::find_shared(const coap::CacheKey& key) const {
  auto it = shared_.find(key);
  return it == shared_.end() ? nullptr : find_pending(it->second);
}

void ForwardProxy::remember_consumed(const Bytes& token) {
  if (consumed_.insert(token).second) consumed_order_.push_back(token);
  while (consumed_order_.size() > kConsumedMemory) {
    consumed_.erase(consumed_order_.front());
    consumed_order_.pop_front();
  }
}

Actions ForwardProxy::reply(const Downstream& to, coap::Message response) const {
  response.set_token(to.token);
  response.set_message_id(to.message_id);
  response.set_type(coap::Type::ack);
  Actions out;
  out.push_back(SendTo{to.client, std::move(response)});
  return out;
}

Actions ForwardProxy::handle_client_request(const coap::Message& request, const NodeAddress& from, SimTime now) {
  if (!request.is_request()) throw std::invalid_argument("handle_client_request needs a request");
  ++stats_.requests;
  const Downstream requester{from, request.token(), request.message_id()};

  coap::ProxyUriParts parts;
  try {
    parts = coap::split_proxy_uri(request);
  } catch (const coap::UriError&) {
    ++stats_.bad_requests;
    return reply(requester, error_response(coap::Code::bad_request));
  }

  const auto key = coap::compute_cache_key(request);
  const bool safe = coap::is_safe(request.code());

  if (safe) {
    if (const auto* hit = cache_.lookup(key)) {
      ++stats_.cache_hits;
      if (observer_) observer_->on_cache_hit(key, requester);
      return reply(requester, hit->response);
    }
  }

  PendingEntry* live = nullptr;
  if (safe) {
    if (auto it = shared_.find(key); it != shared_.end()) live = &by_token_.at(it->second);
  } else if (auto it = unshared_.find({key, from, request.token()}); it != unshared_.end()) {
    live = &by_token_.at(it->second);
  }
  if (live) {
    auto same = std::find_if(live->downstream.begin(), live->downstream.end(), [&](const Downstream& d) {
      return d.client == from && d.token == request.token();
    });
    if (same != live->downstream.end()) {
      // the requester retransmitted; keep waiting on the exchange in flight
      ++stats_.duplicate_requests;
      same->message_id = request.message_id();
      return {};
    }
    live->downstream.push_back(requester);
    ++stats_.aggregated;
    if (observer_) observer_->on_request_aggregated(*live, requester);
    return {};
  }

  const auto* row = fib_.match(parts);
  if (!row) {
    ++stats_.fib_misses;
    return reply(requester, error_response(coap::Code::bad_gateway));
  }

  PendingEntry entry;
  entry.cache_key = key;
  entry.shared = safe;
  entry.downstream.push_back(requester);
  entry.upstream_token = next_token();
  entry.retries_left = config_.max_request_retries;
  entry.timeout_at = now + config_.request_timeout;
  entry.opened_at = now;

  Actions out;
  const std::size_t fan = safe ? row->next_hops.size() : 1;
  const auto message_id = next_message_id();
  for (std::size_t i = 0; i < fan; ++i) {
    const auto& hop = row->next_hops[i];
    if (hop.address == self_) {
      out.push_back(DeliverLocal{request, from});
      continue;
    }
    auto upstream = coap::compose_request(parts, hop.send_host, request);
    upstream.set_token(entry.upstream_token);
    upstream.set_message_id(message_id);
    upstream.set_type(coap::Type::con);
    entry.upstream.push_back(SendTo{hop.address, upstream});
    out.push_back(SendTo{hop.address, std::move(upstream)});
    ++stats_.forwarded;
  }
  if (entry.upstream.empty()) return out;  // answered locally, nothing to track
  out.push_back(StartTimer{entry.upstream_token, entry.timeout_at});

  const Bytes token = entry.upstream_token;
  if (safe) {
    shared_[key] = token;
  } else {
    unshared_[{key, from, request.token()}] = token;
  }
  auto& stored = by_token_.emplace(token, std::move(entry)).first->second;
  if (observer_) observer_->on_pending_opened(stored);
  return out;
}

Actions ForwardProxy::handle_upstream_response(const coap::Message& response, const NodeAddress& from,
                                               SimTime now) {
  if (response.is_request()) throw std::invalid_argument("handle_upstream_response needs a response");
  auto it = by_token_.find(response.token());
  if (it == by_token_.end()) {
    const bool duplicate = consumed_.count(response.token()) > 0;
    ++(duplicate ? stats_.deduplicated : stats_.unmatched);
    if (observer_) observer_->on_response_dropped(response, from, duplicate ? DropReason::duplicate : DropReason::unmatched);
    return {};
  }
  PendingEntry entry = std::move(it->second);
  by_token_.erase(it);
  if (entry.shared) {
    shared_.erase(entry.cache_key);
    if (coap::is_success(response.code())) stats_.evictions += cache_.insert(entry.cache_key, response, now);
  } else {
    std::erase_if(unshared_, [&](const auto& kv) { return kv.second == entry.upstream_token; });
  }
  remember_consumed(entry.upstream_token);

  Actions out;
  for (const auto& d : entry.downstream) {
    auto a = reply(d, response);
    out.insert(out.end(), a.begin(), a.end());
    ++stats_.responses_forwarded;
  }
  if (observer_) observer_->on_pending_closed(entry, CloseReason::answered);
  return out;
}

Actions ForwardProxy::on_request_timeout(const Bytes& upstream_token, SimTime now) {
  auto it = by_token_.find(upstream_token);
  if (it == by_token_.end() || it->second.timeout_at != now) return {};
  auto& entry = it->second;
  Actions out;
  if (entry.retries_left > 0) {
    --entry.retries_left;
    entry.timeout_at = now + config_.request_timeout;
    for (const auto& send : entry.upstream) {
      out.push_back(send);
      ++stats_.retransmissions;
    }
    out.push_back(StartTimer{entry.upstream_token, entry.timeout_at});
    return out;
  }

  PendingEntry closed = std::move(entry);
  by_token_.erase(it);
  if (closed.shared) {
    shared_.erase(closed.cache_key);
  } else {
    std::erase_if(unshared_, [&](const auto& kv) { return kv.second == closed.upstream_token; });
  }
  remember_consumed(closed.upstream_token);
  ++stats_.timeouts;
  for (const auto& d : closed.downstream) {
    auto a = reply(d, error_response(coap::Code::gateway_timeout));
    out.insert(out.end(), a.begin(), a.end());
  }
  if (observer_) observer_->on_pending_closed(closed, CloseReason::timed_out);
  return out;
}

} // namespace wot::proxy
