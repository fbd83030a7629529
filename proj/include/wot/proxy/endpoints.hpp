#pragma once

#include <map>
#include <optional>
#include <string>

#include "wot/proxy/actions.hpp"

namespace wot::proxy {

struct ClientConfig {
  SimTime request_timeout = seconds(2);
  int max_request_retries = 3;
};

/// Request/response bookkeeping on a client: assigns tokens, retransmits
/// the stored request bytes on timeout and gives up once retries run out.
class ClientEndpoint {
 public:
  struct Completion {
    std::uint64_t id = 0;
    coap::Message response;
    SimTime issued_at = 0;
    int attempts = 0;
  };
  struct Failure {
    std::uint64_t id = 0;
    SimTime issued_at = 0;
  };
  struct TimeoutResult {
    Actions actions;
    std::optional<Failure> failure;
  };

  ClientEndpoint(NodeAddress self, NodeAddress first_hop, ClientConfig config = {});

  /// Allocates a fresh token; `id` is the caller's handle for the exchange.
  Bytes next_token();
  std::uint16_t next_message_id() { return message_id_++; }

  /// Sends `request` (whose token came from next_token) and arms a timer.
  Actions start(std::uint64_t id, coap::Message request, SimTime now);
  /// A response for an open exchange completes it; anything else is nullopt.
  std::optional<Completion> on_response(const coap::Message& response);
  TimeoutResult on_timeout(const Bytes& token, SimTime now);

  std::size_t open_exchanges() const { return open_.size(); }
  const NodeAddress& address() const { return self_; }
  const NodeAddress& first_hop() const { return first_hop_; }

 private:
  struct Exchange {
    std::uint64_t id;
    coap::Message request;
    SimTime issued_at;
    SimTime timeout_at;
    int retries_left;
    int attempts;
  };

  NodeAddress self_;
  NodeAddress first_hop_;
  ClientConfig config_;
  std::map<Bytes, Exchange> open_;
  std::uint64_t token_counter_ = 0;
  std::uint16_t message_id_ = 1;
};

/// Resources of an origin server, keyed by "/path?query".
using ResourceMap = std::map<std::string, Bytes>;

/// Resource key of a request: path plus '?'-joined query.
std::string resource_key(const coap::ProxyUriParts& parts);

/// 2.05 with the stored representation for an exact path+query match,
/// 4.04 otherwise; echoes token and message id.
coap::Message serve_origin(const coap::Message& request, const ResourceMap& resources);

} // namespace wot::proxy
