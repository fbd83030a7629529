#include "wot/proxy/fib.hpp"

#include <algorithm>

namespace wot::proxy {

UriPattern UriPattern::parse(const std::string& text) {
  UriPattern p;
  std::string_view rest = text;
  if (auto sep = rest.find("://"); sep != std::string_view::npos) {
    if (sep == 0) throw FibError("pattern with empty scheme: " + text);
    p.scheme = std::string(rest.substr(0, sep));
    rest = rest.substr(sep + 3);
    auto slash = rest.find('/');
    auto host = rest.substr(0, slash);
    if (host.find('*') != std::string_view::npos) throw FibError("wildcard in host is not supported: " + text);
    if (host.empty()) throw FibError("pattern with empty host: " + text);
    p.host = std::string(host);
    rest = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash);
  }
  if (!rest.empty() && rest.back() == '*') {
    p.wildcard = true;
    rest.remove_suffix(1);
  }
  if (rest.find('*') != std::string_view::npos) throw FibError("'*' allowed only at the end: " + text);
  p.path_literal = rest.empty() ? (p.wildcard ? "" : "/") : std::string(rest);
  if (!p.path_literal.empty() && p.path_literal.front() != '/') {
    throw FibError("pattern path must start with '/': " + text);
  }
  return p;
}

bool UriPattern::matches(const coap::ProxyUriParts& parts) const {
  if (host && parts.host != host) return false;
  if (scheme && parts.scheme && parts.scheme != scheme) return false;
  const auto path = parts.path_string();
  if (wildcard) return path.compare(0, path_literal.size(), path_literal) == 0;
  return path == path_literal;
}

void Fib::add(const std::string& pattern, std::vector<NextHop> next_hops) {
  if (next_hops.empty()) throw FibError("FIB row without next-hop: " + pattern);
  auto parsed = UriPattern::parse(pattern);
  for (const auto& e : entries_) {
    if (e.pattern.scheme == parsed.scheme && e.pattern.host == parsed.host &&
        e.pattern.path_literal == parsed.path_literal && e.pattern.wildcard == parsed.wildcard) {
      throw FibError("duplicate FIB pattern: " + pattern);
    }
  }
  entries_.push_back({pattern, std::move(parsed), std::move(next_hops)});
}

const FibEntry* Fib::match(const coap::ProxyUriParts& parts) const {
  const FibEntry* best = nullptr;
  auto rank = [](const FibEntry& e) {
    // exact rows beat wildcard rows of the same literal
    return std::tuple(e.pattern.path_literal.size(), !e.pattern.wildcard, e.pattern.host.has_value());
  };
  for (const auto& e : entries_) {
    if (!e.pattern.matches(parts)) continue;
    if (!best || rank(e) > rank(*best)) best = &e;
  }
  return best;
}

std::vector<NextHop> Fib::lookup(const coap::ProxyUriParts& parts) const {
  const auto* e = match(parts);
  return e ? e->next_hops : std::vector<NextHop>{};
}

} // namespace wot::proxy
