#pragma once

#include <optional>

#include "wot/coap/message.hpp"
#include "wot/security/context.hpp"
#include "wot/security/counters.hpp"

namespace wot::security {

/// Value of the OSCORE option (the compressed COSE header).
struct OscoreOption {
  Bytes partial_iv;
  std::optional<Bytes> kid_context;
  std::optional<Bytes> kid;

  Bytes encode() const;
  /// Throws SecurityError on a malformed value.
  static OscoreOption decode(const Bytes& value);
  friend bool operator==(const OscoreOption&, const OscoreOption&) = default;
};

/// What a response must be bound to. Standard mode binds to the exact
/// request (its kid and Partial IV). Deterministic mode binds to the
/// request content through the request hash and the key derived from it.
struct RequestBinding {
  Mode mode = Mode::standard;
  Bytes request_kid;
  Bytes request_piv;
  std::optional<Bytes> kid_context;
  Bytes request_key;
  Bytes request_hash;

  friend bool operator==(const RequestBinding&, const RequestBinding&) = default;
};

struct ProtectedRequest {
  coap::Message message;
  RequestBinding binding;
};

struct OpenedRequest {
  coap::Message request;
  RequestBinding binding;
};

enum class ReplayCheck {
  enforce,
  /// The caller has matched the message to an exchange it already
  /// accepted (a transport retransmission) and wants to process it again.
  skip,
};

/// Standard-mode protection. Path, query and payload move into the
/// ciphertext; scheme and host stay outside. The outer code is FETCH.
ProtectedRequest protect_request(SecurityContext& ctx, const coap::Message& request, CryptoCounters& counters);

/// Dispatches on the request: a Request-Hash option selects the
/// deterministic path, which bypasses replay protection.
OpenedRequest unprotect_request(SecurityContext& ctx, const coap::Message& protected_request,
                                CryptoCounters& counters, ReplayCheck replay = ReplayCheck::enforce);

/// Deterministic request: identical plaintext gives identical output on
/// every member. Costs three MACs and one AEAD. Safe methods only.
ProtectedRequest deterministic_protect_request(const SecurityContext& ctx, const coap::Message& request,
                                               CryptoCounters& counters);

/// Encrypts a response under the request binding using a fresh server
/// Partial IV. Deterministic-mode responses are not signed here; see
/// sign_response.
coap::Message protect_response(SecurityContext& ctx, const RequestBinding& binding, const coap::Message& response,
                               CryptoCounters& counters);

/// Decrypts a response. In deterministic mode the signature is verified
/// first (AuthenticityError on failure).
coap::Message unprotect_response(const SecurityContext& ctx, const RequestBinding& binding,
                                 const coap::Message& protected_response, CryptoCounters& counters);

/// Appends an Ed25519 signature over code, OSCORE option and ciphertext to
/// the payload. Requires the server's signing key.
coap::Message sign_response(const SecurityContext& ctx, const coap::Message& protected_response,
                            CryptoCounters& counters);
bool verify_response(const SecurityContext& ctx, const coap::Message& signed_response, CryptoCounters& counters);

/// OSCORE plaintext: code byte, inner options, 0xFF and payload.
Bytes encode_inner_plaintext(const coap::Message& message);

} // namespace wot::security
