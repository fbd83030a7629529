#pragma once

// Reference model for one client behind one forwarder with scripted message
// drops, no MAC retries and exchanges that never overlap. Written from the
// protocol rules alone; the simulator is checked against it.

#include <array>
#include <cstdint>
#include <vector>

namespace wot::oracle {

/// Directed streams of client -- forwarder -- server.
enum Stream { client_to_fwd = 0, fwd_to_server = 1, server_to_fwd = 2, fwd_to_client = 3 };

/// Bit (3 * stream + ordinal) set: message `ordinal` (< 3) of that stream is
/// dropped. Ordinals count messages per directed link over the whole run.
inline bool dropped(std::uint16_t mask, Stream s, std::uint64_t ordinal) {
  return ordinal < 3 && ((mask >> (3 * static_cast<int>(s) + static_cast<int>(ordinal))) & 1u);
}

struct RoundOutcome {
  bool delivered = false;
  /// Client attempt (0-based) whose answer was delivered.
  int attempt = -1;
};

/// The client sends attempt a at 2a seconds (a = 0..3) until answered and
/// gives up at 8 s. The first attempt to reach the forwarder opens an
/// entry; later copies are ignored while it is pending. The forwarder tries
/// upstream at 0, 2, 4, 6 s after opening; the server answers every request
/// that reaches it. An answer fans out once; afterwards the forwarder
/// serves copies from its cache. When all upstream attempts fail, the
/// forwarder sends an error reply if `error_replies` (CoAP) or nothing
/// (NDN), in both cases after the client gave up.
inline std::vector<RoundOutcome> expected_outcomes(std::uint16_t mask, int rounds, bool error_replies) {
  std::array<std::uint64_t, 4> next{};
  auto pass = [&](Stream s) { return !dropped(mask, s, next[s]++); };
  std::vector<RoundOutcome> out;
  for (int round = 0; round < rounds; ++round) {
    RoundOutcome o;
    int opened_at = -1;
    for (int a = 0; a <= 3 && opened_at < 0; ++a) {
      if (pass(client_to_fwd)) opened_at = a;
    }
    if (opened_at < 0) {
      out.push_back(o);
      continue;
    }
    int answered = -1;
    for (int b = 0; b <= 3 && answered < 0; ++b) {
      if (pass(fwd_to_server) && pass(server_to_fwd)) answered = b;
    }
    if (answered < 0) {
      // Client copies up to attempt 3 arrive while the entry is pending.
      for (int a = opened_at + 1; a <= 3; ++a) pass(client_to_fwd);
      if (error_replies) pass(fwd_to_client);
      out.push_back(o);
      continue;
    }
    const int k = opened_at + answered;
    // Copies sent while the entry was pending.
    for (int a = opened_at + 1; a <= std::min(k, 3); ++a) pass(client_to_fwd);
    if (pass(fwd_to_client) && k <= 3) {
      o = {true, k};
    } else {
      for (int a = k + 1; a <= 3 && !o.delivered; ++a) {
        if (pass(client_to_fwd) && pass(fwd_to_client)) o = {true, a};
      }
    }
    out.push_back(o);
  }
  return out;
}

} // namespace wot::oracle
