#pragma once

#include <functional>
#include <list>
#include <map>
#include <set>

#include "wot/ndn/packet.hpp"
#include "wot/time.hpp"

namespace wot::ndn {

using FaceId = std::string;

struct SendPacket {
  FaceId face;
  Packet packet;
};

struct StartTimer {
  Name name;
  SimTime at = 0;
};

using Action = std::variant<SendPacket, StartTimer>;
using Actions = std::vector<Action>;

/// Component-wise longest-prefix FIB.
class NameFib {
 public:
  void add(const Name& prefix, std::vector<FaceId> faces);
  /// Faces of the longest matching prefix; empty on a miss.
  std::vector<FaceId> lookup(const Name& name) const;

 private:
  std::map<Name, std::vector<FaceId>> entries_;
};

/// Exact-name LRU content store.
class ContentStore {
 public:
  explicit ContentStore(std::size_t capacity);
  /// Returns the number of evicted packets (0 or 1).
  std::size_t insert(const Data& data);
  const Data* find(const Name& name);
  std::size_t size() const { return index_.size(); }

 private:
  std::size_t capacity_;
  std::list<Data> order_;
  std::map<Name, std::list<Data>::iterator> index_;
};

struct PitEntry {
  Name name;
  std::vector<FaceId> in_faces;
  std::vector<FaceId> out_faces;
  /// Faces a Data came back on; retransmissions skip them.
  std::set<FaceId> answered_faces;
  std::set<std::uint32_t> seen_nonces;
  int retries_left = 0;
  SimTime timeout_at = 0;
};

struct ForwarderConfig {
  SimTime interest_lifetime = seconds(2);
  int max_retries = 3;
  std::size_t cs_capacity = 40;
};

struct ForwarderStats {
  std::uint64_t interests = 0;
  std::uint64_t cs_hits = 0;
  std::uint64_t aggregated = 0;
  std::uint64_t duplicate_nonces = 0;
  std::uint64_t no_route = 0;
  std::uint64_t forwarded = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t expired = 0;
  std::uint64_t data_forwarded = 0;
  std::uint64_t unsolicited = 0;
  std::uint64_t invalid = 0;
};

enum class PitClose { satisfied, expired };

class ForwarderObserver {
 public:
  virtual ~ForwarderObserver() = default;
  virtual void on_pit_created(const PitEntry&) {}
  virtual void on_interest_aggregated(const PitEntry&, const FaceId&) {}
  virtual void on_pit_closed(const PitEntry&, PitClose) {}
  virtual void on_data_dropped(const Data&, const FaceId&, bool invalid) {}
  virtual void on_cs_hit(const Data&, const FaceId&) {}
};

/// NDN-style forwarder: PIT aggregation, content store, broadcast to every
/// FIB face and hop-wise retransmission of unanswered Interests.
class Forwarder {
 public:
  /// Returns whether a Data's signature checks out; called before caching.
  using Verifier = std::function<bool(const Data&)>;
  /// Fresh nonces for forwarded Interests.
  using NonceSource = std::function<std::uint32_t()>;

  Forwarder(FaceId self, NameFib fib, ForwarderConfig config, Verifier verify, NonceSource nonces);

  Actions on_interest(const Interest& interest, const FaceId& face, SimTime now);
  Actions on_data(const Data& data, const FaceId& face, SimTime now);
  /// Stale timers yield nothing.
  Actions on_pit_timeout(const Name& name, SimTime now);

  void set_observer(ForwarderObserver* observer) { observer_ = observer; }
  const ForwarderStats& stats() const { return stats_; }
  const PitEntry* pit_entry(const Name& name) const;
  std::size_t pit_size() const { return pit_.size(); }
  ContentStore& content_store() { return cs_; }
  const FaceId& self() const { return self_; }

 private:
  FaceId self_;
  NameFib fib_;
  ForwarderConfig config_;
  Verifier verify_;
  NonceSource nonces_;
  ContentStore cs_;
  std::map<Name, PitEntry> pit_;
  ForwarderStats stats_;
  ForwarderObserver* observer_ = nullptr;
};

/// Consumer side: one Interest per exchange, retransmitted with a fresh
/// nonce on timeout.
class Consumer {
 public:
  struct Completion {
    std::uint64_t id = 0;
    Data data;
    SimTime issued_at = 0;
  };
  struct Failure {
    std::uint64_t id = 0;
    SimTime issued_at = 0;
  };
  struct TimeoutResult {
    Actions actions;
    std::optional<Failure> failure;
  };

  Consumer(FaceId self, FaceId first_hop, ForwarderConfig config, Forwarder::NonceSource nonces);

  /// Throws if an exchange for the same name is already open.
  Actions express(std::uint64_t id, const Name& name, SimTime now);
  std::optional<Completion> on_data(const Data& data);
  TimeoutResult on_timeout(const Name& name, SimTime now);
  std::size_t open_exchanges() const { return open_.size(); }

 private:
  struct Exchange {
    std::uint64_t id;
    SimTime issued_at;
    SimTime timeout_at;
    int retries_left;
  };

  FaceId self_;
  FaceId first_hop_;
  ForwarderConfig config_;
  Forwarder::NonceSource nonces_;
  std::map<Name, Exchange> open_;
};

} // namespace wot::ndn
