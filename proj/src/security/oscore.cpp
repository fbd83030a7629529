#include "wot/security/oscore.hpp"

#include "cbor.hpp"
#include "wot/coap/codec.hpp"
#include "wot/coap/uri.hpp"

namespace wot::security {

using coap::Code;
using coap::Message;
using coap::OptionEntry;
using coap::OptionNumber;

namespace {

constexpr std::uint8_t kFlagKid = 0x08;
constexpr std::uint8_t kFlagKidContext = 0x10;
constexpr std::string_view kSignatureContext = "wot-response-signature";

bool is_inner(OptionNumber n) {
  return n == OptionNumber::uri_path || n == OptionNumber::uri_query || n == OptionNumber::content_format;
}

struct SplitOptions {
  std::vector<OptionEntry> outer;
  Message inner;  // code, inner options and payload
};

// Separates what gets encrypted from what stays visible to proxies. A full
// Proxy-Uri is cut down to scheme and host; its path and query go inside.
SplitOptions split_for_protection(const Message& m) {
  SplitOptions split;
  split.inner.set_code(m.code());
  split.inner.set_payload(m.payload());
  std::vector<OptionEntry> inner;
  for (const auto& opt : m.options()) {
    if (opt.number == OptionNumber::oscore || opt.number == OptionNumber::request_hash) continue;
    if (opt.number == OptionNumber::proxy_uri) {
      auto parts = coap::parse_proxy_uri(to_string(opt.value));
      for (const auto& p : parts.path) inner.push_back({OptionNumber::uri_path, to_bytes(p)});
      for (const auto& q : parts.query) inner.push_back({OptionNumber::uri_query, to_bytes(q)});
      coap::ProxyUriParts origin{parts.scheme, parts.host, {}, {}};
      split.outer.push_back({OptionNumber::proxy_uri, to_bytes(coap::format_proxy_uri(origin))});
    } else if (is_inner(opt.number)) {
      inner.push_back(opt);
    } else {
      split.outer.push_back(opt);
    }
  }
  split.inner.set_options(std::move(inner));
  return split;
}

Message decode_inner_plaintext(const Bytes& plaintext) {
  if (plaintext.empty()) throw IntegrityError("empty OSCORE plaintext");
  Message m;
  m.set_code(static_cast<Code>(plaintext[0]));
  std::vector<OptionEntry> options;
  std::size_t pos = 0;
  try {
    pos = coap::decode_options(plaintext, 1, options);
  } catch (const coap::DecodeError& e) {
    throw IntegrityError(std::string("malformed inner options: ") + e.what());
  }
  m.set_options(std::move(options));
  if (pos < plaintext.size()) m.set_payload(Bytes(plaintext.begin() + static_cast<std::ptrdiff_t>(pos) + 1, plaintext.end()));
  return m;
}

// Folds decrypted path/query back together with the outer scheme and host.
Message rebuild_request(const Message& outer, const Message& inner) {
  Message m(inner.code(), outer.type(), outer.message_id(), outer.token());
  m.set_payload(inner.payload());
  std::vector<OptionEntry> options;
  std::optional<Bytes> proxy_uri;
  for (const auto& opt : outer.options()) {
    if (opt.number == OptionNumber::oscore || opt.number == OptionNumber::request_hash) continue;
    if (opt.number == OptionNumber::proxy_uri) {
      proxy_uri = opt.value;
      continue;
    }
    options.push_back(opt);
  }
  if (proxy_uri) {
    auto parts = coap::parse_proxy_uri(to_string(*proxy_uri));
    for (const auto& opt : inner.options()) {
      if (opt.number == OptionNumber::uri_path) parts.path.push_back(to_string(opt.value));
      else if (opt.number == OptionNumber::uri_query) parts.query.push_back(to_string(opt.value));
      else options.push_back(opt);
    }
    options.push_back({OptionNumber::proxy_uri, to_bytes(coap::format_proxy_uri(parts))});
  } else {
    options.insert(options.end(), inner.options().begin(), inner.options().end());
  }
  m.set_options(std::move(options));
  return m;
}

Bytes make_aad(const Bytes& request_kid, const Bytes& request_piv, const Bytes& integrity_options) {
  Bytes external;
  cbor::array_header(external, 5);
  cbor::uint(external, 1);
  cbor::array_header(external, 1);
  cbor::uint(external, crypto::ccm::kCoseAlgorithm);
  cbor::bstr(external, request_kid);
  cbor::bstr(external, request_piv);
  cbor::bstr(external, integrity_options);

  Bytes aad;
  cbor::array_header(aad, 3);
  cbor::tstr(aad, "Encrypt0");
  cbor::bstr(aad, Bytes{});
  cbor::bstr(aad, external);
  return aad;
}

OscoreOption read_oscore_option(const Message& m) {
  auto value = m.find_option(OptionNumber::oscore);
  if (!value) throw SecurityError("message carries no OSCORE option");
  return OscoreOption::decode(*value);
}

const GroupMaterial& require_group(const SecurityContext& ctx) {
  if (ctx.mode() != Mode::deterministic_group || !ctx.group()) {
    throw UsageError("operation requires a deterministic-group context");
  }
  return *ctx.group();
}

// Identifies the request for the hash: group, algorithm, deterministic id.
Bytes deterministic_additional_data(const GroupMaterial& group) {
  Bytes ad;
  cbor::array_header(ad, 3);
  cbor::bstr(ad, group.group_id);
  cbor::uint(ad, crypto::ccm::kCoseAlgorithm);
  cbor::bstr(ad, group.deterministic_client_id);
  return ad;
}

Bytes request_hash_of(const GroupMaterial& group, const Bytes& plaintext, CryptoCounters& counters) {
  Bytes input = deterministic_additional_data(group);
  input.insert(input.end(), plaintext.begin(), plaintext.end());
  ++counters.hmac_ops;
  auto h = crypto::hmac_sha256(group.hash_key, input);
  return Bytes(h.begin(), h.end());
}

// HKDF extract and expand: two MACs.
Bytes request_key_from_hash(const GroupMaterial& group, const Bytes& request_hash, CryptoCounters& counters) {
  ++counters.hmac_ops;
  auto prk = crypto::hmac_sha256(request_hash, group.deterministic_secret);
  Bytes info;
  cbor::array_header(info, 3);
  cbor::bstr(info, group.group_id);
  cbor::uint(info, crypto::ccm::kCoseAlgorithm);
  cbor::tstr(info, "Key");
  info.push_back(0x01);
  ++counters.hmac_ops;
  auto okm = crypto::hmac_sha256(prk, info);
  return Bytes(okm.begin(), okm.begin() + static_cast<std::ptrdiff_t>(crypto::ccm::kKeyLength));
}

const Bytes kDeterministicPiv{0x00};

OpenedRequest deterministic_unprotect(const SecurityContext& ctx, const Message& m, const OscoreOption& option,
                                      CryptoCounters& counters) {
  const auto& group = require_group(ctx);
  auto request_hash = m.find_option(OptionNumber::request_hash);
  if (!request_hash) throw UsageError("deterministic request without Request-Hash");
  if (option.kid != group.deterministic_client_id) throw IntegrityError("deterministic request from unknown kid");
  if (option.kid_context != group.group_id) throw IntegrityError("deterministic request for another group");

  auto key = request_key_from_hash(group, *request_hash, counters);
  auto nonce = make_nonce(group.deterministic_client_id, kDeterministicPiv, group.common_iv);
  auto aad = make_aad(group.deterministic_client_id, kDeterministicPiv, *request_hash);
  ++counters.aead_ops;
  auto plaintext = crypto::aes_ccm_decrypt(key, nonce, aad, m.payload());
  if (!plaintext) throw IntegrityError("deterministic request failed authentication");
  if (request_hash_of(group, *plaintext, counters) != *request_hash) {
    throw IntegrityError("request hash does not match plaintext");
  }
  RequestBinding binding;
  binding.mode = Mode::deterministic_group;
  binding.request_kid = group.deterministic_client_id;
  binding.request_piv = kDeterministicPiv;
  binding.kid_context = group.group_id;
  binding.request_key = std::move(key);
  binding.request_hash = *request_hash;
  return {rebuild_request(m, decode_inner_plaintext(*plaintext)), std::move(binding)};
}

Bytes signature_input(const Message& m, std::span<const std::uint8_t> ciphertext) {
  Bytes input(kSignatureContext.begin(), kSignatureContext.end());
  input.push_back(static_cast<std::uint8_t>(m.code()));
  auto option = m.find_option(OptionNumber::oscore).value_or(Bytes{});
  cbor::bstr(input, option);
  cbor::bstr(input, Bytes(ciphertext.begin(), ciphertext.end()));
  return input;
}

} // namespace

Bytes OscoreOption::encode() const {
  if (partial_iv.size() > 5) throw SecurityError("partial IV longer than 5 bytes");
  std::uint8_t flags = static_cast<std::uint8_t>(partial_iv.size());
  if (kid) flags |= kFlagKid;
  if (kid_context) flags |= kFlagKidContext;
  Bytes out;
  if (flags == 0) return out;
  out.push_back(flags);
  out.insert(out.end(), partial_iv.begin(), partial_iv.end());
  if (kid_context) {
    if (kid_context->size() > 255) throw SecurityError("kid context too long");
    out.push_back(static_cast<std::uint8_t>(kid_context->size()));
    out.insert(out.end(), kid_context->begin(), kid_context->end());
  }
  if (kid) out.insert(out.end(), kid->begin(), kid->end());
  return out;
}

OscoreOption OscoreOption::decode(const Bytes& value) {
  OscoreOption opt;
  if (value.empty()) return opt;
  const std::uint8_t flags = value[0];
  if (flags & 0xE0) throw SecurityError("reserved OSCORE flag bits set");
  const std::size_t n = flags & 0x07;
  if (n > 5) throw SecurityError("reserved partial IV length");
  std::size_t pos = 1;
  if (pos + n > value.size()) throw SecurityError("truncated partial IV");
  opt.partial_iv.assign(value.begin() + 1, value.begin() + static_cast<std::ptrdiff_t>(1 + n));
  pos += n;
  if (flags & kFlagKidContext) {
    if (pos >= value.size()) throw SecurityError("truncated kid context");
    std::size_t s = value[pos++];
    if (pos + s > value.size()) throw SecurityError("truncated kid context");
    opt.kid_context = Bytes(value.begin() + static_cast<std::ptrdiff_t>(pos),
                            value.begin() + static_cast<std::ptrdiff_t>(pos + s));
    pos += s;
  }
  if (flags & kFlagKid) {
    opt.kid = Bytes(value.begin() + static_cast<std::ptrdiff_t>(pos), value.end());
  } else if (pos != value.size()) {
    throw SecurityError("trailing bytes in OSCORE option");
  }
  return opt;
}

Bytes encode_inner_plaintext(const Message& message) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(message.code()));
  coap::encode_options(message.options(), out);
  if (!message.payload().empty()) {
    out.push_back(0xFF);
    out.insert(out.end(), message.payload().begin(), message.payload().end());
  }
  return out;
}

ProtectedRequest protect_request(SecurityContext& ctx, const Message& request, CryptoCounters& counters) {
  if (!request.is_request()) throw UsageError("protect_request called on a response");
  if (request.has_option(OptionNumber::oscore)) throw UsageError("request is already protected");
  auto split = split_for_protection(request);
  auto piv = encode_partial_iv(ctx.sender_sequence());
  ctx.next_sequence();

  auto plaintext = encode_inner_plaintext(split.inner);
  auto nonce = make_nonce(ctx.sender_id(), piv, ctx.common_iv());
  auto aad = make_aad(ctx.sender_id(), piv, Bytes{});
  ++counters.aead_ops;
  auto ciphertext = crypto::aes_ccm_encrypt(ctx.sender_key(), nonce, aad, plaintext);

  Message out(Code::fetch, request.type(), request.message_id(), request.token());
  OscoreOption option{piv, std::nullopt, ctx.sender_id()};
  split.outer.push_back({OptionNumber::oscore, option.encode()});
  out.set_options(std::move(split.outer));
  out.set_payload(std::move(ciphertext));

  RequestBinding binding;
  binding.mode = Mode::standard;
  binding.request_kid = ctx.sender_id();
  binding.request_piv = std::move(piv);
  return {std::move(out), std::move(binding)};
}

OpenedRequest unprotect_request(SecurityContext& ctx, const Message& m, CryptoCounters& counters, ReplayCheck replay) {
  auto option = read_oscore_option(m);
  if (m.has_option(OptionNumber::request_hash)) return deterministic_unprotect(ctx, m, option, counters);
  if (ctx.mode() != Mode::standard) throw UsageError("standard request presented to a group context");
  if (!option.kid || *option.kid != ctx.recipient_id()) throw SecurityError("request kid does not match context");
  if (option.partial_iv.empty()) throw SecurityError("request without partial IV");
  const auto seq = decode_partial_iv(option.partial_iv);
  if (replay == ReplayCheck::enforce && ctx.replay_window().is_replay(seq)) {
    throw ReplayError("replayed request, sequence " + std::to_string(seq));
  }
  auto nonce = make_nonce(*option.kid, option.partial_iv, ctx.common_iv());
  auto aad = make_aad(*option.kid, option.partial_iv, Bytes{});
  ++counters.aead_ops;
  auto plaintext = crypto::aes_ccm_decrypt(ctx.recipient_key(), nonce, aad, m.payload());
  if (!plaintext) throw IntegrityError("request failed authentication");
  if (!ctx.replay_window().is_replay(seq)) ctx.replay_window().accept(seq);

  RequestBinding binding;
  binding.mode = Mode::standard;
  binding.request_kid = *option.kid;
  binding.request_piv = option.partial_iv;
  return {rebuild_request(m, decode_inner_plaintext(*plaintext)), std::move(binding)};
}

ProtectedRequest deterministic_protect_request(const SecurityContext& ctx, const Message& request,
                                               CryptoCounters& counters) {
  const auto& group = require_group(ctx);
  if (!request.is_request()) throw UsageError("deterministic_protect_request called on a response");
  if (!coap::is_safe(request.code())) {
    throw UsageError("deterministic requests are limited to safe methods, got " + coap::code_name(request.code()));
  }
  auto split = split_for_protection(request);
  auto plaintext = encode_inner_plaintext(split.inner);
  auto request_hash = request_hash_of(group, plaintext, counters);
  auto key = request_key_from_hash(group, request_hash, counters);
  auto nonce = make_nonce(group.deterministic_client_id, kDeterministicPiv, group.common_iv);
  auto aad = make_aad(group.deterministic_client_id, kDeterministicPiv, request_hash);
  ++counters.aead_ops;
  auto ciphertext = crypto::aes_ccm_encrypt(key, nonce, aad, plaintext);

  Message out(Code::fetch, request.type(), request.message_id(), request.token());
  OscoreOption option{kDeterministicPiv, group.group_id, group.deterministic_client_id};
  split.outer.push_back({OptionNumber::oscore, option.encode()});
  split.outer.push_back({OptionNumber::request_hash, request_hash});
  out.set_options(std::move(split.outer));
  out.set_payload(std::move(ciphertext));

  RequestBinding binding;
  binding.mode = Mode::deterministic_group;
  binding.request_kid = group.deterministic_client_id;
  binding.request_piv = kDeterministicPiv;
  binding.kid_context = group.group_id;
  binding.request_key = std::move(key);
  binding.request_hash = std::move(request_hash);
  return {std::move(out), std::move(binding)};
}

Message protect_response(SecurityContext& ctx, const RequestBinding& binding, const Message& response,
                         CryptoCounters& counters) {
  if (response.is_request()) throw UsageError("protect_response called on a request");
  auto piv = encode_partial_iv(ctx.sender_sequence());
  ctx.next_sequence();

  Message inner;
  inner.set_code(response.code());
  inner.set_options(response.options());
  inner.set_payload(response.payload());
  auto plaintext = encode_inner_plaintext(inner);

  const bool deterministic = binding.mode == Mode::deterministic_group;
  const Bytes& key = deterministic ? binding.request_key : ctx.sender_key();
  const Bytes& common_iv = deterministic ? require_group(ctx).common_iv : ctx.common_iv();
  auto nonce = make_nonce(ctx.sender_id(), piv, common_iv);
  auto aad = make_aad(binding.request_kid, binding.request_piv, binding.request_hash);
  ++counters.aead_ops;
  auto ciphertext = crypto::aes_ccm_encrypt(key, nonce, aad, plaintext);

  Message out(Code::content, response.type(), response.message_id(), response.token());
  OscoreOption option{piv, std::nullopt, std::nullopt};
  if (deterministic) option.kid = ctx.sender_id();
  out.add_option(OptionNumber::oscore, option.encode());
  out.set_payload(std::move(ciphertext));
  return out;
}

Message unprotect_response(const SecurityContext& ctx, const RequestBinding& binding, const Message& m,
                           CryptoCounters& counters) {
  auto option = read_oscore_option(m);
  const bool deterministic = binding.mode == Mode::deterministic_group;
  Bytes ciphertext = m.payload();
  Bytes nonce;
  const Bytes* key = nullptr;
  if (deterministic) {
    const auto& group = require_group(ctx);
    if (!verify_response(ctx, m, counters)) throw AuthenticityError("response signature does not verify");
    ciphertext.resize(ciphertext.size() - crypto::kEd25519SignatureLength);
    if (!option.kid || option.partial_iv.empty()) throw SecurityError("group response lacks kid or partial IV");
    nonce = make_nonce(*option.kid, option.partial_iv, group.common_iv);
    key = &binding.request_key;
  } else {
    nonce = option.partial_iv.empty() ? make_nonce(binding.request_kid, binding.request_piv, ctx.common_iv())
                                      : make_nonce(ctx.recipient_id(), option.partial_iv, ctx.common_iv());
    key = &ctx.recipient_key();
  }
  auto aad = make_aad(binding.request_kid, binding.request_piv, binding.request_hash);
  ++counters.aead_ops;
  auto plaintext = crypto::aes_ccm_decrypt(*key, nonce, aad, ciphertext);
  if (!plaintext) throw IntegrityError("response failed authentication");
  auto inner = decode_inner_plaintext(*plaintext);
  Message out(inner.code(), m.type(), m.message_id(), m.token());
  out.set_options(inner.options());
  out.set_payload(inner.payload());
  return out;
}

Message sign_response(const SecurityContext& ctx, const Message& protected_response, CryptoCounters& counters) {
  require_group(ctx);
  const auto& key = ctx.signing_key();
  ++counters.sign_ops;
  auto signature = crypto::ed25519_sign(key, signature_input(protected_response, protected_response.payload()));
  Message out = protected_response;
  Bytes payload = protected_response.payload();
  payload.insert(payload.end(), signature.begin(), signature.end());
  out.set_payload(std::move(payload));
  return out;
}

bool verify_response(const SecurityContext& ctx, const Message& signed_response, CryptoCounters& counters) {
  const auto& group = require_group(ctx);
  ++counters.verify_ops;
  const auto& payload = signed_response.payload();
  if (payload.size() < crypto::kEd25519SignatureLength) return false;
  std::span<const std::uint8_t> all(payload);
  auto ciphertext = all.first(payload.size() - crypto::kEd25519SignatureLength);
  auto signature = all.last(crypto::kEd25519SignatureLength);
  return crypto::ed25519_verify(group.server_public_key, signature_input(signed_response, ciphertext), signature);
}

} // namespace wot::security
