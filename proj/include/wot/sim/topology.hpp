#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wot/sim/link.hpp"

namespace wot::sim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Role { client, forwarder, server };

std::string to_string(Role role);
Role parse_role(const std::string& text);

struct NodeSpec {
  std::string name;
  Role role = Role::forwarder;
};

/// Bidirectional link; `loss_reverse` applies to b -> a when set.
struct LinkSpec {
  std::string a;
  std::string b;
  SimTime latency = milliseconds(1);
  double loss = 0.0;
  std::optional<double> loss_reverse;
};

struct Topology {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;

  /// Server, forwarders f7 (next to the server) down to f1, clients 1-9.
  /// client1 hangs off the server; client k (2..8) off f(9-k); client9
  /// shares f1 with client8. `chain_loss` applies to the six f1..f7 links,
  /// `edge_loss` to every other link.
  static Topology paper_tree(double chain_loss = 0.0, double edge_loss = 0.0, SimTime latency = milliseconds(1));
  /// client1 -- server.
  static Topology single_link(double loss = 0.0, SimTime latency = milliseconds(1));
  /// client1 -- f1 -- ... -- fN -- server.
  static Topology chain(int forwarders, double loss = 0.0, SimTime latency = milliseconds(1));

  /// Throws ConfigError on duplicate names, dangling or duplicate links,
  /// anything other than exactly one server, or a disconnected graph.
  void validate() const;

  const NodeSpec* find(const std::string& name) const;
  std::vector<std::string> names_with(Role role) const;
};

/// Hop distances and equal-cost next hops computed by BFS.
class Routing {
 public:
  explicit Routing(const Topology& topology);

  const std::vector<std::string>& neighbors(const std::string& node) const;
  /// Every neighbor one hop closer to `destination`, in topology order.
  std::vector<std::string> next_hops(const std::string& from, const std::string& destination) const;
  /// First of next_hops; throws when unreachable or from == destination.
  std::string next_hop(const std::string& from, const std::string& destination) const;
  int distance(const std::string& from, const std::string& destination) const;

 private:
  std::map<std::string, std::vector<std::string>> adjacency_;
  std::map<std::string, std::map<std::string, int>> distance_;  // destination -> node -> hops
};

} // namespace wot::sim
