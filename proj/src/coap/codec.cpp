#include "wot/coap/codec.hpp"

namespace wot::coap {

namespace {

constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kPayloadMarker = 0xFF;
constexpr std::uint32_t kMaxExtended = 65535 + 269;

// Splits a delta or length into its nibble and extension bytes.
std::uint8_t nibble_for(std::uint32_t value, Bytes& ext) {
  if (value < 13) return static_cast<std::uint8_t>(value);
  if (value < 269) {
    ext.push_back(static_cast<std::uint8_t>(value - 13));
    return 13;
  }
  if (value > kMaxExtended) throw EncodeError("option delta or length " + std::to_string(value) + " not encodable");
  auto v = value - 269;
  ext.push_back(static_cast<std::uint8_t>(v >> 8));
  ext.push_back(static_cast<std::uint8_t>(v & 0xFF));
  return 14;
}

std::uint32_t read_extended(std::uint8_t nib, std::span<const std::uint8_t> data, std::size_t& pos,
                            std::size_t option_start, bool is_delta) {
  auto fault = is_delta ? DecodeFault::bad_option_delta : DecodeFault::bad_option_length;
  const char* what = is_delta ? "option delta" : "option length";
  if (nib < 13) return nib;
  if (nib == 13) {
    if (pos + 1 > data.size()) throw DecodeError(DecodeFault::truncated, pos, std::string("truncated ") + what);
    return 13u + data[pos++];
  }
  if (nib == 14) {
    if (pos + 2 > data.size()) throw DecodeError(DecodeFault::truncated, pos, std::string("truncated ") + what);
    std::uint32_t v = (static_cast<std::uint32_t>(data[pos]) << 8) | data[pos + 1];
    pos += 2;
    return 269u + v;
  }
  throw DecodeError(fault, option_start, std::string("reserved nibble 15 in ") + what);
}

} // namespace

DecodeError::DecodeError(DecodeFault fault, std::size_t offset, const std::string& what)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), fault_(fault), offset_(offset) {}

void encode_options(const std::vector<OptionEntry>& options, Bytes& out) {
  std::uint32_t previous = 0;
  for (const auto& opt : options) {
    auto number = static_cast<std::uint32_t>(opt.number);
    if (number < previous) throw EncodeError("options are not sorted by number");
    Bytes ext;
    auto delta_nib = nibble_for(number - previous, ext);
    auto length_nib = nibble_for(static_cast<std::uint32_t>(opt.value.size()), ext);
    out.push_back(static_cast<std::uint8_t>((delta_nib << 4) | length_nib));
    out.insert(out.end(), ext.begin(), ext.end());
    out.insert(out.end(), opt.value.begin(), opt.value.end());
    previous = number;
  }
}

Bytes encode_message(const Message& message) {
  const auto& token = message.token();
  if (token.size() > Message::kMaxTokenLength) throw EncodeError("token longer than 8 bytes");
  Bytes out;
  out.reserve(4 + token.size() + message.payload().size() + 16);
  out.push_back(static_cast<std::uint8_t>((kVersion << 6) | (static_cast<std::uint8_t>(message.type()) << 4) |
                                          token.size()));
  out.push_back(static_cast<std::uint8_t>(message.code()));
  out.push_back(static_cast<std::uint8_t>(message.message_id() >> 8));
  out.push_back(static_cast<std::uint8_t>(message.message_id() & 0xFF));
  out.insert(out.end(), token.begin(), token.end());
  encode_options(message.options(), out);
  if (!message.payload().empty()) {
    out.push_back(kPayloadMarker);
    out.insert(out.end(), message.payload().begin(), message.payload().end());
  }
  return out;
}

std::size_t decode_options(std::span<const std::uint8_t> data, std::size_t offset,
                           std::vector<OptionEntry>& out) {
  std::size_t pos = offset;
  std::uint32_t number = 0;
  while (pos < data.size() && data[pos] != kPayloadMarker) {
    const std::size_t start = pos;
    const std::uint8_t head = data[pos++];
    auto delta = read_extended(head >> 4, data, pos, start, true);
    auto length = read_extended(head & 0x0F, data, pos, start, false);
    number += delta;
    if (number > 0xFFFF) throw DecodeError(DecodeFault::bad_option_delta, start, "option number overflow");
    if (pos + length > data.size()) throw DecodeError(DecodeFault::truncated, pos, "truncated option value");
    if (!is_known_option(static_cast<std::uint16_t>(number))) {
      if (is_critical(static_cast<std::uint16_t>(number))) {
        throw DecodeError(DecodeFault::unknown_critical_option, start,
                          "unknown critical option " + std::to_string(number));
      }
      pos += length;
      continue;
    }
    auto opt = static_cast<OptionNumber>(number);
    if (!is_repeatable(opt) && !out.empty() && out.back().number == opt) {
      if (is_critical(static_cast<std::uint16_t>(number))) {
        throw DecodeError(DecodeFault::repeated_option, start,
                          "repeated critical option " + std::to_string(number));
      }
      pos += length;
      continue;
    }
    out.push_back(OptionEntry{opt, Bytes(data.begin() + pos, data.begin() + pos + length)});
    pos += length;
  }
  return pos;
}

Message decode_message(std::span<const std::uint8_t> frame) {
  if (frame.size() < 4) throw DecodeError(DecodeFault::truncated, frame.size(), "frame shorter than header");
  const std::uint8_t version = frame[0] >> 6;
  if (version != kVersion) throw DecodeError(DecodeFault::bad_version, 0, "unsupported version");
  const std::size_t tkl = frame[0] & 0x0F;
  if (tkl > Message::kMaxTokenLength) throw DecodeError(DecodeFault::bad_token_length, 0, "reserved token length");
  if (frame.size() < 4 + tkl) throw DecodeError(DecodeFault::truncated, frame.size(), "truncated token");

  Message m(static_cast<Code>(frame[1]), static_cast<Type>((frame[0] >> 4) & 0x03),
            static_cast<std::uint16_t>((frame[2] << 8) | frame[3]),
            Bytes(frame.begin() + 4, frame.begin() + 4 + static_cast<std::ptrdiff_t>(tkl)));

  std::vector<OptionEntry> options;
  std::size_t pos = decode_options(frame, 4 + tkl, options);
  m.set_options(std::move(options));
  if (pos < frame.size()) {
    // At the payload marker.
    if (pos + 1 == frame.size()) throw DecodeError(DecodeFault::empty_payload, pos, "payload marker without payload");
    m.set_payload(Bytes(frame.begin() + static_cast<std::ptrdiff_t>(pos) + 1, frame.end()));
  }
  return m;
}

} // namespace wot::coap
