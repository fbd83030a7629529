#include "wot/sim/link.hpp"

#include <algorithm>
#include <cmath>

namespace wot::sim {

SimTime airtime(std::size_t bytes, double bitrate_bps) {
  return static_cast<SimTime>(std::ceil(static_cast<double>(bytes) * 8.0 * 1e6 / bitrate_bps));
}

int fragment_count(std::size_t bytes, std::size_t max_frame_bytes) {
  return std::max<int>(1, static_cast<int>((bytes + max_frame_bytes - 1) / max_frame_bytes));
}

TransmitOutcome transmit(const LinkModel& link, std::size_t bytes, Rng& rng, bool forced_drop) {
  TransmitOutcome out;
  const auto& mac = link.mac;
  const int fragments = fragment_count(bytes, mac.max_frame_bytes);
  std::size_t remaining = bytes;
  bool all_received = true;
  for (int f = 0; f < fragments; ++f) {
    const std::size_t size = std::min(remaining, mac.max_frame_bytes);
    remaining -= size;
    ++out.frames;
    bool received = false;
    bool acked = false;
    for (int attempt = 0; attempt <= mac.max_retries && !acked; ++attempt) {
      if (attempt > 0 && !mac.backoff.empty()) {
        out.occupancy += mac.backoff[std::min<std::size_t>(attempt, mac.backoff.size()) - 1];
      }
      ++out.attempts;
      out.occupancy += airtime(size, mac.bitrate_bps);
      const bool data_ok = !forced_drop && !rng.bernoulli(link.loss);
      if (!data_ok) continue;
      received = true;
      acked = !rng.bernoulli(link.loss);
    }
    if (!received) all_received = false;
    if (!acked) break;
  }
  out.delivered = all_received && out.frames == fragments;
  return out;
}

} // namespace wot::sim
