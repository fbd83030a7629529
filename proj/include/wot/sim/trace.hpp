#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "wot/sim/topology.hpp"

namespace wot::sim {

/// Record kinds:
///   issue    client starts exchange `seq`
///   deliver  client hands content of exchange `seq` to the application
///   fail     client gives up on `seq`; detail says why
///   send     node queues a message for neighbor `peer`
///   tx       radio finished a message; frames/attempts, detail delivered|lost
///   rx       node received a message from `peer`
///   timer    a retransmission timer fired
///   crypto   `value` operations of type `detail` (aead|sign|verify|hmac)
///   pending_open, aggregate, pending_close, fanout, cache_hit, drop
///            proxy and PIT state changes; `key` is the cache key (hex) or
///            the name, `token` the upstream token, `peer` the downstream
///            node and `detail` its token
///   counters final per-node crypto totals, one record per operation type
struct TraceRecord {
  SimTime t = 0;
  std::string kind;
  std::string node;
  std::string peer;
  std::string msg;
  std::int64_t seq = -1;
  std::string token;
  std::string key;
  std::string detail;
  std::int64_t value = 0;
  int frames = 0;
  int attempts = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct NodeInfo {
  std::string name;
  Role role = Role::forwarder;
  friend bool operator==(const NodeInfo&, const NodeInfo&) = default;
};

class TraceError : public std::runtime_error {
 public:
  TraceError(std::size_t line, const std::string& what)
      : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct RawTrace {
  std::string mode;
  std::vector<NodeInfo> nodes;
  std::vector<TraceRecord> records;

  /// One JSON object per line: a header, one line per node, then records.
  void write_ndjson(std::ostream& out) const;
  std::string to_ndjson() const;
  /// Throws TraceError with the 1-based line number of a bad record.
  static RawTrace read_ndjson(std::istream& in);
};

} // namespace wot::sim
