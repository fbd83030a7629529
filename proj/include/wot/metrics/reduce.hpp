#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wot/security/counters.hpp"
#include "wot/sim/trace.hpp"

namespace wot::metrics {

struct ClientMetrics {
  std::string client;
  std::uint64_t issued = 0;
  std::uint64_t delivered = 0;
  std::uint64_t failed = 0;
  /// Issue to application delivery, in trace order.
  std::vector<SimTime> retrieval_times;

  double success_rate() const { return issued ? static_cast<double>(delivered) / static_cast<double>(issued) : 0.0; }
};

/// Message-level counts for one forwarder. Requests only travel toward the
/// server and responses away from it, so *_out of a forwarder is its
/// upstream request / downstream response load.
struct ForwarderLoad {
  std::string node;
  std::uint64_t requests_in = 0;
  std::uint64_t requests_out = 0;
  std::uint64_t responses_in = 0;
  std::uint64_t responses_out = 0;
  std::uint64_t frames_out = 0;
  std::uint64_t attempts_out = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t aggregated = 0;
  std::uint64_t lost_out = 0;
};

struct CryptoRow {
  std::string node;
  sim::Role role = sim::Role::forwarder;
  security::CryptoCounters raw;
};

struct MetricsBundle {
  std::string mode;
  std::uint64_t rounds = 0;
  std::vector<ClientMetrics> clients;
  std::uint64_t issued = 0;
  std::uint64_t delivered = 0;
  /// Server response transmissions per simulated second (index = second).
  std::vector<std::uint64_t> server_responses_per_second;
  std::uint64_t server_responses = 0;
  std::vector<ForwarderLoad> forwarders;
  std::vector<CryptoRow> crypto;

  double success_rate() const { return issued ? static_cast<double>(delivered) / static_cast<double>(issued) : 0.0; }
  double server_responses_per_round() const {
    return rounds ? static_cast<double>(server_responses) / static_cast<double>(rounds) : 0.0;
  }
  /// Mean per-second server rate without the first and last `margin` seconds.
  double steady_server_rate(std::size_t margin = 10) const;
  const ClientMetrics* client(const std::string& name) const;
  const ForwarderLoad* forwarder(const std::string& name) const;
  /// Summed counters of every node with the role.
  security::CryptoCounters role_counters(sim::Role role) const;
  /// Counter of a role divided by successful retrievals.
  struct PerRetrieval {
    double aead = 0, sign = 0, verify = 0, hmac = 0;
  };
  PerRetrieval per_retrieval(sim::Role role) const;
};

/// Pure function of the trace. Inconsistent records (unknown node, a
/// delivery without an issue, crypto records disagreeing with the final
/// counters) throw sim::TraceError carrying the record's NDJSON line number.
MetricsBundle reduce_trace(const sim::RawTrace& trace);
MetricsBundle reduce_ndjson(std::istream& in);

} // namespace wot::metrics
