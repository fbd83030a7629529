#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wot/crypto/primitives.hpp"
#include "wot/security/counters.hpp"

namespace wot::ndn {

using Bytes = std::vector<std::uint8_t>;

/// Hierarchical name. "/instruction?t=5" maps to [instruction, t=5] so
/// that CoAP-style resource keys translate directly.
struct Name {
  std::vector<std::string> components;

  static Name parse(std::string_view text);
  std::string to_uri() const;
  bool is_prefix_of(const Name& other) const;
  bool empty() const { return components.empty(); }

  friend auto operator<=>(const Name&, const Name&) = default;
};

struct Interest {
  Name name;
  std::uint32_t nonce = 0;

  friend bool operator==(const Interest&, const Interest&) = default;
};

struct Data {
  Name name;
  Bytes aead_nonce;  // 13 bytes
  Bytes content;     // AEAD ciphertext and tag
  Bytes signature;   // HMAC-SHA-256 over name, nonce and content

  friend bool operator==(const Data&, const Data&) = default;
};

using Packet = std::variant<Interest, Data>;

class TlvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NDN-like TLV. Interest 0x05 {Name, Nonce}; Data 0x06 {Name, Content,
/// SignatureInfo, SignatureValue}. Only as much as the simulator needs to
/// size frames and to round-trip packets.
Bytes encode_packet(const Packet& packet);
Packet decode_packet(const Bytes& wire);

/// Keys shared by producer and verifiers.
struct DataKeys {
  Bytes aead_key;  // 16 bytes
  Bytes mac_key;   // 32 bytes
};

/// Encrypts and signs: one AEAD and one MAC.
Data seal_data(const Name& name, const Bytes& plaintext, const Bytes& aead_nonce, const DataKeys& keys,
               security::CryptoCounters& counters);
/// Checks the signature: one MAC.
bool verify_data(const Data& data, const DataKeys& keys, security::CryptoCounters& counters);
/// Decrypts content whose signature was already checked: one AEAD.
std::optional<Bytes> open_data(const Data& data, const DataKeys& keys, security::CryptoCounters& counters);

} // namespace wot::ndn
