#include "wot/proxy/endpoints.hpp"

#include "wot/coap/uri.hpp"
#include "wot/proxy/forward_proxy.hpp"

namespace wot::proxy {

ClientEndpoint::ClientEndpoint(NodeAddress self, NodeAddress first_hop, ClientConfig config)
    : self_(std::move(self)), first_hop_(std::move(first_hop)), config_(config) {}

Bytes ClientEndpoint::next_token() { return encode_token(token_counter_++); }

Actions ClientEndpoint::start(std::uint64_t id, coap::Message request, SimTime now) {
  const Bytes token = request.token();
  if (open_.count(token)) throw std::invalid_argument("token already in use by an open exchange");
  Exchange ex{id, request, now, now + config_.request_timeout, config_.max_request_retries, 1};
  Actions out;
  out.push_back(SendTo{first_hop_, std::move(request)});
  out.push_back(StartTimer{token, ex.timeout_at});
  open_.emplace(token, std::move(ex));
  return out;
}

std::optional<ClientEndpoint::Completion> ClientEndpoint::on_response(const coap::Message& response) {
  auto it = open_.find(response.token());
  if (it == open_.end()) return std::nullopt;
  Completion done{it->second.id, response, it->second.issued_at, it->second.attempts};
  open_.erase(it);
  return done;
}

ClientEndpoint::TimeoutResult ClientEndpoint::on_timeout(const Bytes& token, SimTime now) {
  TimeoutResult result;
  auto it = open_.find(token);
  if (it == open_.end() || it->second.timeout_at != now) return result;
  auto& ex = it->second;
  if (ex.retries_left > 0) {
    --ex.retries_left;
    ++ex.attempts;
    ex.timeout_at = now + config_.request_timeout;
    result.actions.push_back(SendTo{first_hop_, ex.request});
    result.actions.push_back(StartTimer{token, ex.timeout_at});
    return result;
  }
  result.failure = Failure{ex.id, ex.issued_at};
  open_.erase(it);
  return result;
}

std::string resource_key(const coap::ProxyUriParts& parts) {
  std::string key = parts.path_string();
  for (std::size_t i = 0; i < parts.query.size(); ++i) key += (i == 0 ? "?" : "&") + parts.query[i];
  return key;
}

coap::Message serve_origin(const coap::Message& request, const ResourceMap& resources) {
  coap::Message response(coap::Code::not_found, coap::Type::ack, request.message_id(), request.token());
  coap::ProxyUriParts parts;
  try {
    parts = coap::split_proxy_uri(request);
  } catch (const coap::UriError&) {
    response.set_code(coap::Code::bad_request);
    return response;
  }
  if (auto it = resources.find(resource_key(parts)); it != resources.end()) {
    response.set_code(coap::Code::content);
    response.set_payload(it->second);
  }
  return response;
}

} // namespace wot::proxy
