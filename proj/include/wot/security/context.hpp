#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "wot/coap/message.hpp"
#include "wot/crypto/primitives.hpp"

namespace wot::security {

class SecurityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// AEAD tag failure or a deterministic request whose hash does not match.
class IntegrityError : public SecurityError {
 public:
  using SecurityError::SecurityError;
};
class ReplayError : public SecurityError {
 public:
  using SecurityError::SecurityError;
};
/// Response signature did not verify.
class AuthenticityError : public SecurityError {
 public:
  using SecurityError::SecurityError;
};
class SequenceExhausted : public SecurityError {
 public:
  using SecurityError::SecurityError;
};
/// Operation not allowed for this context or message.
class UsageError : public SecurityError {
 public:
  using SecurityError::SecurityError;
};

enum class Mode { standard, deterministic_group };

/// Partial IVs are at most 40 bits.
inline constexpr std::uint64_t kMaxSequence = (std::uint64_t{1} << 40) - 1;

/// Anti-replay state for one recipient: the highest accepted sequence number
/// and a 32-entry bitmap below it.
class ReplayWindow {
 public:
  static constexpr std::uint64_t kSize = 32;

  bool is_replay(std::uint64_t seq) const;
  /// Records `seq`; call only after is_replay returned false.
  void accept(std::uint64_t seq);

 private:
  bool empty_ = true;
  std::uint64_t highest_ = 0;
  std::uint32_t bitmap_ = 0;  // bit i set: highest_ - i seen
};

/// Material shared by every member of a group that uses deterministic
/// requests. The deterministic client is a fictitious member whose sender
/// id all real members borrow.
struct GroupMaterial {
  Bytes group_id;
  Bytes deterministic_client_id;
  /// Sender key material of the deterministic client; request keys are
  /// derived from it and the request hash.
  Bytes deterministic_secret;
  /// Key for the Request-Hash MAC.
  Bytes hash_key;
  Bytes common_iv;
  /// Key for group-mode responses is the request key; responses add the
  /// server's signature, checked against this key.
  std::array<std::uint8_t, 32> server_public_key{};
};

/// Inputs from which a group context is derived.
struct GroupConfig {
  Bytes master_secret;
  Bytes master_salt;
  Bytes group_id;
  Bytes deterministic_client_id = Bytes{0xDC};
  Bytes server_id = Bytes{0x00};
  Bytes signing_seed;  // 32 bytes, Ed25519
};

/// An OSCORE-style security context. Standard mode holds a pairwise
/// sender/recipient key set with a sequence counter. Deterministic-group
/// mode additionally carries group material; a node with the signing key
/// plays the server.
class SecurityContext {
 public:
  /// RFC 8613 key derivation from a master secret and salt.
  static SecurityContext standard(const Bytes& master_secret, const Bytes& master_salt, Bytes sender_id,
                                  Bytes recipient_id, std::optional<Bytes> id_context = std::nullopt);
  /// `member_id` is this node's own sender id. The server passes
  /// `is_server` to load the signing key.
  static SecurityContext deterministic_group(const GroupConfig& config, Bytes member_id, bool is_server);

  Mode mode() const { return mode_; }
  const Bytes& sender_id() const { return sender_id_; }
  const Bytes& recipient_id() const { return recipient_id_; }
  const Bytes& sender_key() const { return sender_key_; }
  const Bytes& recipient_key() const { return recipient_key_; }
  const Bytes& common_iv() const { return common_iv_; }
  std::uint64_t sender_sequence() const { return sender_sequence_; }
  void set_sender_sequence(std::uint64_t seq) { sender_sequence_ = seq; }
  const std::optional<GroupMaterial>& group() const { return group_; }
  bool can_sign() const { return signing_key_.has_value(); }

  /// Returns the current sequence number and advances it.
  std::uint64_t next_sequence();
  ReplayWindow& replay_window() { return replay_; }
  const crypto::Ed25519KeyPair& signing_key() const;

 private:
  Mode mode_ = Mode::standard;
  Bytes sender_id_;
  Bytes recipient_id_;
  std::optional<Bytes> id_context_;
  Bytes sender_key_;
  Bytes recipient_key_;
  Bytes common_iv_;
  std::uint64_t sender_sequence_ = 0;
  ReplayWindow replay_;
  std::optional<GroupMaterial> group_;
  std::optional<crypto::Ed25519KeyPair> signing_key_;
};

/// HKDF-SHA256 with the OSCORE info structure. Exposed for tests.
Bytes derive_oscore_key(const Bytes& master_secret, const Bytes& master_salt, const Bytes& id,
                        const std::optional<Bytes>& id_context, std::string_view type, std::size_t length);
/// AEAD nonce from the id of the Partial IV's producer, the Partial IV and
/// the common IV.
Bytes make_nonce(const Bytes& id_piv, const Bytes& partial_iv, const Bytes& common_iv);
/// Minimal big-endian encoding; zero encodes as a single 0x00 byte.
Bytes encode_partial_iv(std::uint64_t seq);
std::uint64_t decode_partial_iv(const Bytes& piv);

} // namespace wot::security
