#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "wot/coap/message.hpp"

namespace wot::coap {

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DecodeFault {
  truncated,
  bad_version,
  bad_token_length,
  bad_option_delta,
  bad_option_length,
  unknown_critical_option,
  repeated_option,
  empty_payload,
};

class DecodeError : public std::runtime_error {
 public:
  DecodeError(DecodeFault fault, std::size_t offset, const std::string& what);

  DecodeFault fault() const { return fault_; }
  /// Byte offset into the frame where decoding stopped.
  std::size_t offset() const { return offset_; }

 private:
  DecodeFault fault_;
  std::size_t offset_;
};

/// RFC 7252 framing: 4-byte header, token, delta-encoded options, 0xFF
/// marker followed by the payload when the payload is non-empty.
Bytes encode_message(const Message& message);
Message decode_message(std::span<const std::uint8_t> frame);

/// The option block on its own, delta-encoded from zero. Shared with the
/// security layer, which encrypts an inner option list.
void encode_options(const std::vector<OptionEntry>& options, Bytes& out);

/// Parses options starting at `offset` until the end of `data` or a 0xFF
/// marker; returns the offset just past the options (at the marker, if any).
/// Unknown elective options are skipped, unknown critical ones throw.
std::size_t decode_options(std::span<const std::uint8_t> data, std::size_t offset,
                           std::vector<OptionEntry>& out);

} // namespace wot::coap
