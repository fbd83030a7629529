#include "wot/coap/uri.hpp"

namespace wot::coap {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(sep);
    out += items[i];
  }
  return out;
}

void remove_target_options(Message& m) {
  m.remove_options(OptionNumber::proxy_uri);
  m.remove_options(OptionNumber::uri_host);
  m.remove_options(OptionNumber::uri_path);
  m.remove_options(OptionNumber::uri_query);
}

} // namespace

std::string ProxyUriParts::path_string() const { return "/" + join(path, '/'); }

ProxyUriParts parse_proxy_uri(std::string_view uri) {
  auto sep = uri.find("://");
  if (sep == std::string_view::npos || sep == 0) throw UriError("Proxy-Uri without scheme: " + std::string(uri));
  ProxyUriParts parts;
  parts.scheme = std::string(uri.substr(0, sep));
  auto rest = uri.substr(sep + 3);
  auto query_pos = rest.find('?');
  std::string_view query;
  if (query_pos != std::string_view::npos) {
    query = rest.substr(query_pos + 1);
    rest = rest.substr(0, query_pos);
  }
  auto path_pos = rest.find('/');
  parts.host = std::string(rest.substr(0, path_pos));
  if (parts.host->empty()) throw UriError("Proxy-Uri without host: " + std::string(uri));
  if (path_pos != std::string_view::npos) {
    auto path = rest.substr(path_pos + 1);
    if (!path.empty()) parts.path = split(path, '/');
  }
  parts.query = split(query, '&');
  return parts;
}

std::string format_proxy_uri(const ProxyUriParts& parts) {
  if (!parts.scheme || !parts.host) throw UriError("Proxy-Uri needs scheme and host");
  std::string out = *parts.scheme + "://" + *parts.host;
  if (!parts.path.empty()) out += parts.path_string();
  if (!parts.query.empty()) out += "?" + join(parts.query, '&');
  return out;
}

ProxyUriParts split_proxy_uri(const Message& message) {
  auto proxy_uri = message.find_option(OptionNumber::proxy_uri);
  auto paths = message.find_options(OptionNumber::uri_path);
  auto queries = message.find_options(OptionNumber::uri_query);
  if (proxy_uri) {
    if (!paths.empty() || !queries.empty()) {
      throw UriError("request carries both Proxy-Uri and Uri-Path/Uri-Query");
    }
    return parse_proxy_uri(to_string(*proxy_uri));
  }
  ProxyUriParts parts;
  if (auto host = message.find_option(OptionNumber::uri_host)) parts.host = to_string(*host);
  for (const auto& p : paths) parts.path.push_back(to_string(p));
  for (const auto& q : queries) parts.query.push_back(to_string(q));
  return parts;
}

Message compose_request(const ProxyUriParts& parts, bool send_host, const Message& base) {
  Message m = base;
  remove_target_options(m);
  if (send_host && parts.host) {
    ProxyUriParts full = parts;
    if (!full.scheme) full.scheme = "coap";
    m.add_option(OptionNumber::proxy_uri, format_proxy_uri(full));
    return m;
  }
  for (const auto& p : parts.path) m.add_option(OptionNumber::uri_path, p);
  for (const auto& q : parts.query) m.add_option(OptionNumber::uri_query, q);
  return m;
}

} // namespace wot::coap
