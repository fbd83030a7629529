#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wot/coap/message.hpp"
#include "wot/sim/link.hpp"
#include "wot/sim/topology.hpp"
#include "wot/sim/trace.hpp"

namespace wot::sim {

/// Deployment modes. `oscore` runs end to end with forwarders as plain IP
/// routers; the proxy modes put a caching forward proxy on every forwarder;
/// `coap_proxy` is the proxy mode without any security, used by tests.
enum class Mode { oscore, oscore_proxy, det_oscore_proxy, ndn, coap_proxy };

std::string to_string(Mode mode);
/// Accepts "oscore", "oscore-proxy", "det-oscore-proxy", "ndn", "coap-proxy".
Mode parse_mode(const std::string& text);
const std::vector<Mode>& all_modes();

struct WorkloadConfig {
  int rounds = 1000;
  SimTime period = seconds(1);
  /// Issue time of round x is x * period + uniform[0, jitter).
  SimTime jitter = milliseconds(500);
  /// Round x requests "<resource>?t=x"; the server publishes it at x * period.
  std::string resource = "/instruction";
  SimTime drain = seconds(10);
  /// Requesting clients; empty means every client node.
  std::vector<std::string> clients;
};

struct ExchangeConfig {
  SimTime request_timeout = seconds(2);
  int max_retries = 3;
  std::size_t cache_capacity = 40;
};

struct CryptoConfig {
  Bytes master_secret = wot::from_hex("0102030405060708090a0b0c0d0e0f10");
  Bytes master_salt = wot::from_hex("9e7ca92223786340");
  Bytes group_id = wot::from_hex("37cbf3210017a2d3");
  Bytes signing_seed = wot::from_hex("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f");
  /// Server (or NDN producer) is busy this long per signature.
  SimTime signing_delay = milliseconds(20);
};

struct SimConfig {
  Mode mode = Mode::det_oscore_proxy;
  std::uint64_t seed = 1;
  Topology topology = Topology::paper_tree();
  MacConfig mac;
  WorkloadConfig workload;
  ExchangeConfig exchange;
  CryptoConfig crypto;
  /// Optional whole-message drops on top of random frame loss.
  LossScript loss_script;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One simulation run. Construction instantiates nodes, routes, FIBs and
/// security contexts and validates the config; run() executes the workload.
class Simulation {
 public:
  explicit Simulation(SimConfig config);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  /// Runs to completion of the workload plus the drain period. Callable once.
  RawTrace run();

  const SimConfig& config() const;
  std::vector<NodeInfo> nodes() const;
  /// "client", "proxy", "router", "ndn-forwarder", "origin" or "producer".
  std::string stack(const std::string& node) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Simulation build_scenario(const SimConfig& config);

/// "/instruction?t=x" for round x.
std::string resource_for_round(const WorkloadConfig& workload, std::int64_t round);

} // namespace wot::sim
