#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wot/coap/message.hpp"

namespace wot::coap {

class UriError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request target, whichever option encoding it arrived in. Scheme and
/// host are absent when the request carried only Uri-Path/Uri-Query. The
/// host is an opaque name; it need not resolve to a network address.
struct ProxyUriParts {
  std::optional<std::string> scheme;
  std::optional<std::string> host;
  std::vector<std::string> path;
  std::vector<std::string> query;

  bool empty() const { return !scheme && !host && path.empty() && query.empty(); }
  /// "/a/b" form of the path; "/" for an empty path.
  std::string path_string() const;

  friend bool operator==(const ProxyUriParts&, const ProxyUriParts&) = default;
};

/// Parses "scheme://host/seg/seg?q&q". Throws UriError without "://".
ProxyUriParts parse_proxy_uri(std::string_view uri);
/// Inverse of parse_proxy_uri. Requires scheme and host.
std::string format_proxy_uri(const ProxyUriParts& parts);

/// Reads the target of a request from either Proxy-Uri or the Uri-Path /
/// Uri-Query options. Throws UriError when both encodings are present.
ProxyUriParts split_proxy_uri(const Message& message);

/// Copies `base` and replaces its target options with `parts`. With
/// `send_host` and a known host the full Proxy-Uri is emitted; otherwise
/// scheme and host are dropped and only Uri-Path/Uri-Query remain.
Message compose_request(const ProxyUriParts& parts, bool send_host, const Message& base);

} // namespace wot::coap
