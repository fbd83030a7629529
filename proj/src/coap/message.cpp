#include "wot/coap/message.hpp"

#include <algorithm>
#include <cstdio>

namespace wot {

Bytes to_bytes(std::string_view text) { return Bytes(text.begin(), text.end()); }

std::string to_string(std::span<const std::uint8_t> bytes) {
  return std::string(bytes.begin(), bytes.end());
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0F]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit in '" + std::string(hex) + "'");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

} // namespace wot

namespace wot::coap {

bool is_known_option(std::uint16_t number) {
  switch (static_cast<OptionNumber>(number)) {
    case OptionNumber::uri_host:
    case OptionNumber::oscore:
    case OptionNumber::uri_path:
    case OptionNumber::content_format:
    case OptionNumber::uri_query:
    case OptionNumber::proxy_uri:
    case OptionNumber::request_hash:
      return true;
  }
  return false;
}

bool is_repeatable(OptionNumber number) {
  return number == OptionNumber::uri_path || number == OptionNumber::uri_query;
}

bool is_critical(std::uint16_t number) { return (number & 0x01) != 0; }

bool is_cache_relevant(OptionNumber number) {
  // NoCacheKey options have bits 0x1E == 0x1C.
  return (static_cast<std::uint16_t>(number) & 0x1E) != 0x1C;
}

bool is_request(Code code) {
  auto raw = static_cast<std::uint8_t>(code);
  return (raw >> 5) == 0 && raw != 0;
}

bool is_success(Code code) { return (static_cast<std::uint8_t>(code) >> 5) == 2; }

bool is_safe(Code code) { return code == Code::get || code == Code::fetch; }

std::string code_name(Code code) {
  switch (code) {
    case Code::empty: return "EMPTY";
    case Code::get: return "GET";
    case Code::post: return "POST";
    case Code::put: return "PUT";
    case Code::del: return "DELETE";
    case Code::fetch: return "FETCH";
    case Code::patch: return "PATCH";
    default: break;
  }
  auto raw = static_cast<std::uint8_t>(code);
  char buf[8];
  std::snprintf(buf, sizeof buf, "%u.%02u", raw >> 5, raw & 0x1F);
  return buf;
}

Message::Message(Code code, Type type, std::uint16_t message_id, Bytes token)
    : code_(code), type_(type), message_id_(message_id) {
  set_token(std::move(token));
}

void Message::set_token(Bytes token) {
  if (token.size() > kMaxTokenLength) throw MessageError("token longer than 8 bytes");
  token_ = std::move(token);
}

void Message::add_option(OptionNumber number, Bytes value) {
  if (!is_repeatable(number) && has_option(number)) {
    throw MessageError("option " + std::to_string(static_cast<unsigned>(number)) + " is not repeatable");
  }
  auto pos = std::upper_bound(options_.begin(), options_.end(), number,
                              [](OptionNumber n, const OptionEntry& e) { return n < e.number; });
  options_.insert(pos, OptionEntry{number, std::move(value)});
}

void Message::add_option(OptionNumber number, std::string_view value) {
  add_option(number, to_bytes(value));
}

void Message::set_options(std::vector<OptionEntry> options) {
  std::stable_sort(options.begin(), options.end(),
                   [](const OptionEntry& a, const OptionEntry& b) { return a.number < b.number; });
  for (std::size_t i = 1; i < options.size(); ++i) {
    if (options[i].number == options[i - 1].number && !is_repeatable(options[i].number)) {
      throw MessageError("option " + std::to_string(static_cast<unsigned>(options[i].number)) +
                         " is not repeatable");
    }
  }
  options_ = std::move(options);
}

std::size_t Message::remove_options(OptionNumber number) {
  return std::erase_if(options_, [number](const OptionEntry& e) { return e.number == number; });
}

bool Message::has_option(OptionNumber number) const {
  return std::any_of(options_.begin(), options_.end(),
                     [number](const OptionEntry& e) { return e.number == number; });
}

std::optional<Bytes> Message::find_option(OptionNumber number) const {
  for (const auto& e : options_) {
    if (e.number == number) return e.value;
  }
  return std::nullopt;
}

std::vector<Bytes> Message::find_options(OptionNumber number) const {
  std::vector<Bytes> out;
  for (const auto& e : options_) {
    if (e.number == number) out.push_back(e.value);
  }
  return out;
}

} // namespace wot::coap
