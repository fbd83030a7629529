#include "wot/security/context.hpp"

#include "cbor.hpp"

namespace wot::security {

bool ReplayWindow::is_replay(std::uint64_t seq) const {
  if (empty_ || seq > highest_) return false;
  const std::uint64_t age = highest_ - seq;
  if (age >= kSize) return true;  // too old to tell, treat as replay
  return (bitmap_ >> age) & 1u;
}

void ReplayWindow::accept(std::uint64_t seq) {
  if (empty_) {
    empty_ = false;
    highest_ = seq;
    bitmap_ = 1;
    return;
  }
  if (seq > highest_) {
    const std::uint64_t shift = seq - highest_;
    bitmap_ = shift >= kSize ? 0 : static_cast<std::uint32_t>(bitmap_ << shift);
    bitmap_ |= 1;
    highest_ = seq;
    return;
  }
  bitmap_ |= static_cast<std::uint32_t>(1u << (highest_ - seq));
}

Bytes derive_oscore_key(const Bytes& master_secret, const Bytes& master_salt, const Bytes& id,
                        const std::optional<Bytes>& id_context, std::string_view type, std::size_t length) {
  if (length > 32) throw SecurityError("derived key longer than one HKDF block");
  Bytes info;
  cbor::array_header(info, 5);
  cbor::bstr(info, id);
  if (id_context) {
    cbor::bstr(info, *id_context);
  } else {
    cbor::nil(info);
  }
  cbor::uint(info, crypto::ccm::kCoseAlgorithm);
  cbor::tstr(info, type);
  cbor::uint(info, length);

  auto prk = crypto::hmac_sha256(master_salt, master_secret);
  info.push_back(0x01);
  auto okm = crypto::hmac_sha256(prk, info);
  return Bytes(okm.begin(), okm.begin() + static_cast<std::ptrdiff_t>(length));
}

Bytes make_nonce(const Bytes& id_piv, const Bytes& partial_iv, const Bytes& common_iv) {
  constexpr std::size_t n = crypto::ccm::kNonceLength;
  if (id_piv.size() > n - 6) throw SecurityError("sender id too long for nonce");
  if (partial_iv.size() > 5) throw SecurityError("partial IV longer than 5 bytes");
  if (common_iv.size() != n) throw SecurityError("common IV has wrong length");
  Bytes nonce(n, 0);
  nonce[0] = static_cast<std::uint8_t>(id_piv.size());
  std::copy(id_piv.begin(), id_piv.end(), nonce.begin() + static_cast<std::ptrdiff_t>(1 + (n - 6) - id_piv.size()));
  std::copy(partial_iv.begin(), partial_iv.end(), nonce.end() - static_cast<std::ptrdiff_t>(partial_iv.size()));
  for (std::size_t i = 0; i < n; ++i) nonce[i] ^= common_iv[i];
  return nonce;
}

Bytes encode_partial_iv(std::uint64_t seq) {
  if (seq > kMaxSequence) throw SequenceExhausted("sequence number exceeds 40 bits");
  Bytes out;
  for (int shift = 32; shift >= 0; shift -= 8) {
    auto b = static_cast<std::uint8_t>(seq >> shift);
    if (!out.empty() || b != 0) out.push_back(b);
  }
  if (out.empty()) out.push_back(0);
  return out;
}

std::uint64_t decode_partial_iv(const Bytes& piv) {
  if (piv.empty() || piv.size() > 5) throw SecurityError("invalid partial IV length");
  std::uint64_t v = 0;
  for (auto b : piv) v = (v << 8) | b;
  return v;
}

SecurityContext SecurityContext::standard(const Bytes& master_secret, const Bytes& master_salt, Bytes sender_id,
                                          Bytes recipient_id, std::optional<Bytes> id_context) {
  SecurityContext ctx;
  ctx.mode_ = Mode::standard;
  ctx.sender_key_ = derive_oscore_key(master_secret, master_salt, sender_id, id_context, "Key", crypto::ccm::kKeyLength);
  ctx.recipient_key_ =
      derive_oscore_key(master_secret, master_salt, recipient_id, id_context, "Key", crypto::ccm::kKeyLength);
  ctx.common_iv_ = derive_oscore_key(master_secret, master_salt, Bytes{}, id_context, "IV", crypto::ccm::kNonceLength);
  ctx.sender_id_ = std::move(sender_id);
  ctx.recipient_id_ = std::move(recipient_id);
  ctx.id_context_ = std::move(id_context);
  return ctx;
}

SecurityContext SecurityContext::deterministic_group(const GroupConfig& config, Bytes member_id, bool is_server) {
  SecurityContext ctx;
  ctx.mode_ = Mode::deterministic_group;
  ctx.id_context_ = config.group_id;
  ctx.common_iv_ =
      derive_oscore_key(config.master_secret, config.master_salt, Bytes{}, config.group_id, "IV", crypto::ccm::kNonceLength);
  ctx.sender_id_ = std::move(member_id);
  ctx.recipient_id_ = config.server_id;

  GroupMaterial group;
  group.group_id = config.group_id;
  group.deterministic_client_id = config.deterministic_client_id;
  group.deterministic_secret = derive_oscore_key(config.master_secret, config.master_salt,
                                                 config.deterministic_client_id, config.group_id, "Key", 32);
  group.hash_key = derive_oscore_key(config.master_secret, config.master_salt, Bytes{}, config.group_id, "Hash", 32);
  group.common_iv = ctx.common_iv_;
  auto keypair = crypto::ed25519_from_seed(config.signing_seed);
  group.server_public_key = keypair.public_key;
  if (is_server) ctx.signing_key_ = keypair;
  ctx.group_ = std::move(group);
  return ctx;
}

std::uint64_t SecurityContext::next_sequence() {
  if (sender_sequence_ > kMaxSequence) throw SequenceExhausted("sender sequence exhausted");
  return sender_sequence_++;
}

const crypto::Ed25519KeyPair& SecurityContext::signing_key() const {
  if (!signing_key_) throw UsageError("context holds no signing key");
  return *signing_key_;
}

} // namespace wot::security
