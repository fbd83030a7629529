#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wot {

using Bytes = std::vector<std::uint8_t>;

Bytes to_bytes(std::string_view text);
std::string to_string(std::span<const std::uint8_t> bytes);
std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);

} // namespace wot

namespace wot::coap {

/// Request and response codes in class.detail form, (class << 5) | detail.
enum class Code : std::uint8_t {
  empty = 0x00,
  get = 0x01,
  post = 0x02,
  put = 0x03,
  del = 0x04,
  fetch = 0x05,
  patch = 0x06,
  created = 0x41,          // 2.01
  changed = 0x44,          // 2.04
  content = 0x45,          // 2.05
  bad_request = 0x80,      // 4.00
  unauthorized = 0x81,     // 4.01
  not_found = 0x84,        // 4.04
  internal_error = 0xA0,   // 5.00
  bad_gateway = 0xA2,      // 5.02
  gateway_timeout = 0xA4,  // 5.04
};

enum class Type : std::uint8_t { con = 0, non = 1, ack = 2, rst = 3 };

/// Supported option registry. Odd numbers are critical.
enum class OptionNumber : std::uint16_t {
  uri_host = 3,
  oscore = 9,
  uri_path = 11,
  content_format = 12,
  uri_query = 15,
  proxy_uri = 35,
  request_hash = 65000,  // private-use, elective, not repeatable
};

bool is_known_option(std::uint16_t number);
bool is_repeatable(OptionNumber number);
bool is_critical(std::uint16_t number);

/// Options that describe the target resource, so they become part of the
/// cache key. Everything in the registry except NoCacheKey-flagged numbers.
bool is_cache_relevant(OptionNumber number);

bool is_request(Code code);
bool is_success(Code code);
/// GET and FETCH: side-effect free and cacheable.
bool is_safe(Code code);
std::string code_name(Code code);

struct OptionEntry {
  OptionNumber number;
  Bytes value;

  friend bool operator==(const OptionEntry&, const OptionEntry&) = default;
};

class MessageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A CoAP message. Options are kept sorted by number; insertion preserves
/// the relative order of repeated options.
class Message {
 public:
  static constexpr std::size_t kMaxTokenLength = 8;

  Message() = default;
  Message(Code code, Type type, std::uint16_t message_id, Bytes token = {});

  Code code() const { return code_; }
  Type type() const { return type_; }
  std::uint16_t message_id() const { return message_id_; }
  const Bytes& token() const { return token_; }
  const std::vector<OptionEntry>& options() const { return options_; }
  const Bytes& payload() const { return payload_; }

  void set_code(Code code) { code_ = code; }
  void set_type(Type type) { type_ = type; }
  void set_message_id(std::uint16_t id) { message_id_ = id; }
  /// Throws MessageError when longer than eight bytes.
  void set_token(Bytes token);
  void set_payload(Bytes payload) { payload_ = std::move(payload); }

  /// Inserts after any existing option with the same number. Throws
  /// MessageError when a non-repeatable option is added twice.
  void add_option(OptionNumber number, Bytes value);
  void add_option(OptionNumber number, std::string_view value);
  /// Replaces all options; stable-sorts by number and enforces the
  /// repeatability rules.
  void set_options(std::vector<OptionEntry> options);
  std::size_t remove_options(OptionNumber number);
  bool has_option(OptionNumber number) const;
  std::optional<Bytes> find_option(OptionNumber number) const;
  std::vector<Bytes> find_options(OptionNumber number) const;

  bool is_request() const { return coap::is_request(code_); }

  friend bool operator==(const Message&, const Message&) = default;

 private:
  Code code_ = Code::empty;
  Type type_ = Type::con;
  std::uint16_t message_id_ = 0;
  Bytes token_;
  std::vector<OptionEntry> options_;
  Bytes payload_;
};

} // namespace wot::coap
