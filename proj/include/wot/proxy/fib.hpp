#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wot/coap/uri.hpp"

namespace wot::proxy {

using NodeAddress = std::string;

struct NextHop {
  NodeAddress address;
  /// The hop expects a full Proxy-Uri, host included.
  bool send_host = true;

  friend bool operator==(const NextHop&, const NextHop&) = default;
};

class FibError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// URI pattern of a FIB row: optional "scheme://host", a path literal and an
/// optional trailing '*'. "coap://00-01/temperature*" matches any path on
/// host 00-01 starting with "/temperature"; "/firmware/*" matches any host.
/// Without '*' the path must match exactly; the query never takes part.
struct UriPattern {
  std::optional<std::string> scheme;
  std::optional<std::string> host;
  std::string path_literal;
  bool wildcard = false;

  static UriPattern parse(const std::string& text);
  bool matches(const coap::ProxyUriParts& parts) const;
};

struct FibEntry {
  std::string pattern_text;
  UriPattern pattern;
  std::vector<NextHop> next_hops;
};

/// Application-level FIB with several next-hops per row.
class Fib {
 public:
  /// Throws FibError on a duplicate pattern or an empty next-hop list.
  void add(const std::string& pattern, std::vector<NextHop> next_hops);

  /// Next-hops of the most specific matching row (longest path literal; a
  /// row naming a host wins a tie). Empty on a miss.
  std::vector<NextHop> lookup(const coap::ProxyUriParts& parts) const;
  const FibEntry* match(const coap::ProxyUriParts& parts) const;

  const std::vector<FibEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<FibEntry> entries_;
};

} // namespace wot::proxy
