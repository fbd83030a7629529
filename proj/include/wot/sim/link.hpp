#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "wot/time.hpp"

namespace wot::sim {

/// mt19937_64 with an explicit 53-bit conversion to double, so draws are
/// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return p > 0.0 && uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

struct MacConfig {
  int max_retries = 3;
  /// Wait before retry k (1-based) is backoff[min(k, size) - 1].
  std::vector<SimTime> backoff{milliseconds(4), milliseconds(8), milliseconds(16)};
  double bitrate_bps = 250000.0;
  std::size_t max_frame_bytes = 127;
};

struct LinkModel {
  double loss = 0.0;
  SimTime latency = milliseconds(1);
  MacConfig mac;
};

struct TransmitOutcome {
  bool delivered = false;
  int frames = 0;
  /// Attempts summed over all fragments that were sent.
  int attempts = 0;
  /// Radio busy time for the whole message.
  SimTime occupancy = 0;
};

/// Sends a message of `bytes` over the link. Each fragment of at most
/// max_frame_bytes is tried up to 1 + max_retries times; every attempt loses
/// the data frame and, independently, the acknowledgement with the link's
/// loss probability. The sender moves on after an acknowledgement and
/// abandons the message when a fragment exhausts its attempts. The message is
/// delivered when the receiver got every fragment. `forced_drop` loses every
/// data frame.
TransmitOutcome transmit(const LinkModel& link, std::size_t bytes, Rng& rng, bool forced_drop = false);

SimTime airtime(std::size_t bytes, double bitrate_bps);
int fragment_count(std::size_t bytes, std::size_t max_frame_bytes);

/// Drops whole messages by (sender, receiver, per-direction ordinal).
using LossScript = std::function<bool(const std::string& from, const std::string& to, std::uint64_t ordinal)>;

} // namespace wot::sim
