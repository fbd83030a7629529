#include "wot/ndn/packet.hpp"

#include <algorithm>

namespace wot::ndn {

namespace {

enum Tlv : std::uint8_t {
  kInterest = 0x05,
  kData = 0x06,
  kName = 0x07,
  kComponent = 0x08,
  kNonce = 0x0A,
  kContent = 0x15,
  kSignatureInfo = 0x16,
  kSignatureValue = 0x17,
  kSignatureType = 0x1B,
};

constexpr std::uint8_t kSignatureHmacSha256 = 4;

void put_length(Bytes& out, std::size_t n) {
  if (n < 253) {
    out.push_back(static_cast<std::uint8_t>(n));
  } else if (n <= 0xFFFF) {
    out.push_back(253);
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
  } else {
    throw TlvError("TLV value too long");
  }
}

void put_tlv(Bytes& out, std::uint8_t type, const Bytes& value) {
  out.push_back(type);
  put_length(out, value.size());
  out.insert(out.end(), value.begin(), value.end());
}

Bytes name_value(const Name& name) {
  Bytes v;
  for (const auto& c : name.components) put_tlv(v, kComponent, Bytes(c.begin(), c.end()));
  return v;
}

Bytes signature_info() {
  Bytes v;
  put_tlv(v, kSignatureType, Bytes{kSignatureHmacSha256});
  return v;
}

Bytes signed_portion(const Data& d) {
  Bytes v;
  put_tlv(v, kName, name_value(d.name));
  Bytes content = d.aead_nonce;
  content.insert(content.end(), d.content.begin(), d.content.end());
  put_tlv(v, kContent, content);
  put_tlv(v, kSignatureInfo, signature_info());
  return v;
}

class Reader {
 public:
  Reader(const Bytes& data, std::size_t begin, std::size_t end) : data_(data), pos_(begin), end_(end) {}

  bool done() const { return pos_ >= end_; }

  std::pair<std::uint8_t, std::pair<std::size_t, std::size_t>> next() {
    if (pos_ + 2 > end_) throw TlvError("truncated TLV header");
    const auto type = data_[pos_++];
    std::size_t len = data_[pos_++];
    if (len == 253) {
      if (pos_ + 2 > end_) throw TlvError("truncated TLV length");
      len = (std::size_t{data_[pos_]} << 8) | data_[pos_ + 1];
      pos_ += 2;
    } else if (len > 253) {
      throw TlvError("unsupported TLV length form");
    }
    if (pos_ + len > end_) throw TlvError("truncated TLV value");
    auto range = std::pair(pos_, pos_ + len);
    pos_ += len;
    return {type, range};
  }

  std::pair<std::size_t, std::size_t> expect(std::uint8_t type) {
    auto [t, range] = next();
    if (t != type) throw TlvError("unexpected TLV type " + std::to_string(t));
    return range;
  }

 private:
  const Bytes& data_;
  std::size_t pos_;
  std::size_t end_;
};

Name read_name(const Bytes& wire, std::pair<std::size_t, std::size_t> range) {
  Name name;
  Reader r(wire, range.first, range.second);
  while (!r.done()) {
    auto c = r.expect(kComponent);
    name.components.emplace_back(wire.begin() + static_cast<std::ptrdiff_t>(c.first),
                                 wire.begin() + static_cast<std::ptrdiff_t>(c.second));
  }
  return name;
}

Bytes slice(const Bytes& wire, std::pair<std::size_t, std::size_t> range) {
  return Bytes(wire.begin() + static_cast<std::ptrdiff_t>(range.first),
               wire.begin() + static_cast<std::ptrdiff_t>(range.second));
}

} // namespace

Name Name::parse(std::string_view text) {
  Name name;
  auto q = text.find('?');
  auto path = text.substr(0, q);
  std::size_t start = 0;
  while (start < path.size()) {
    if (path[start] == '/') {
      ++start;
      continue;
    }
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    name.components.emplace_back(path.substr(start, end - start));
    start = end;
  }
  if (q != std::string_view::npos) {
    auto query = text.substr(q + 1);
    std::size_t s = 0;
    while (s <= query.size() && !query.empty()) {
      auto e = query.find('&', s);
      if (e == std::string_view::npos) e = query.size();
      name.components.emplace_back(query.substr(s, e - s));
      s = e + 1;
    }
  }
  return name;
}

std::string Name::to_uri() const {
  if (components.empty()) return "/";
  std::string out;
  for (const auto& c : components) out += "/" + c;
  return out;
}

bool Name::is_prefix_of(const Name& other) const {
  return components.size() <= other.components.size() &&
         std::equal(components.begin(), components.end(), other.components.begin());
}

Bytes encode_packet(const Packet& packet) {
  Bytes body;
  std::uint8_t outer;
  if (const auto* i = std::get_if<Interest>(&packet)) {
    outer = kInterest;
    put_tlv(body, kName, name_value(i->name));
    put_tlv(body, kNonce,
            Bytes{static_cast<std::uint8_t>(i->nonce >> 24), static_cast<std::uint8_t>(i->nonce >> 16),
                  static_cast<std::uint8_t>(i->nonce >> 8), static_cast<std::uint8_t>(i->nonce)});
  } else {
    const auto& d = std::get<Data>(packet);
    outer = kData;
    body = signed_portion(d);
    put_tlv(body, kSignatureValue, d.signature);
  }
  Bytes out;
  put_tlv(out, outer, body);
  return out;
}

Packet decode_packet(const Bytes& wire) {
  Reader top(wire, 0, wire.size());
  auto [type, range] = top.next();
  if (!top.done()) throw TlvError("trailing bytes after packet");
  Reader r(wire, range.first, range.second);
  if (type == kInterest) {
    Interest i;
    i.name = read_name(wire, r.expect(kName));
    auto n = r.expect(kNonce);
    if (n.second - n.first != 4) throw TlvError("nonce must be 4 bytes");
    for (auto p = n.first; p < n.second; ++p) i.nonce = (i.nonce << 8) | wire[p];
    if (!r.done()) throw TlvError("trailing Interest elements");
    return i;
  }
  if (type == kData) {
    Data d;
    d.name = read_name(wire, r.expect(kName));
    auto content = slice(wire, r.expect(kContent));
    if (content.size() < crypto::ccm::kNonceLength) throw TlvError("content shorter than AEAD nonce");
    d.aead_nonce.assign(content.begin(), content.begin() + crypto::ccm::kNonceLength);
    d.content.assign(content.begin() + crypto::ccm::kNonceLength, content.end());
    r.expect(kSignatureInfo);
    d.signature = slice(wire, r.expect(kSignatureValue));
    if (!r.done()) throw TlvError("trailing Data elements");
    return d;
  }
  throw TlvError("unknown packet type " + std::to_string(type));
}

Data seal_data(const Name& name, const Bytes& plaintext, const Bytes& aead_nonce, const DataKeys& keys,
               security::CryptoCounters& counters) {
  Data d;
  d.name = name;
  d.aead_nonce = aead_nonce;
  const auto aad = name_value(name);
  ++counters.aead_ops;
  d.content = crypto::aes_ccm_encrypt(keys.aead_key, aead_nonce, aad, plaintext);
  ++counters.hmac_ops;
  auto mac = crypto::hmac_sha256(keys.mac_key, signed_portion(d));
  d.signature.assign(mac.begin(), mac.end());
  return d;
}

bool verify_data(const Data& data, const DataKeys& keys, security::CryptoCounters& counters) {
  ++counters.hmac_ops;
  auto mac = crypto::hmac_sha256(keys.mac_key, signed_portion(data));
  return data.signature.size() == mac.size() && std::equal(mac.begin(), mac.end(), data.signature.begin());
}

std::optional<Bytes> open_data(const Data& data, const DataKeys& keys, security::CryptoCounters& counters) {
  ++counters.aead_ops;
  return crypto::aes_ccm_decrypt(keys.aead_key, data.aead_nonce, name_value(data.name), data.content);
}

} // namespace wot::ndn
