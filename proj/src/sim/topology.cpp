#include "wot/sim/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace wot::sim {

std::string to_string(Role role) {
  switch (role) {
    case Role::client: return "client";
    case Role::forwarder: return "forwarder";
    case Role::server: return "server";
  }
  return "?";
}

Role parse_role(const std::string& text) {
  if (text == "client") return Role::client;
  if (text == "forwarder") return Role::forwarder;
  if (text == "server") return Role::server;
  throw ConfigError("unknown node role '" + text + "'");
}

Topology Topology::paper_tree(double chain_loss, double edge_loss, SimTime latency) {
  Topology t;
  t.nodes.push_back({"server", Role::server});
  for (int k = 7; k >= 1; --k) t.nodes.push_back({"f" + std::to_string(k), Role::forwarder});
  for (int k = 1; k <= 9; ++k) t.nodes.push_back({"client" + std::to_string(k), Role::client});

  t.links.push_back({"f7", "server", latency, edge_loss, std::nullopt});
  for (int k = 1; k < 7; ++k) {
    t.links.push_back({"f" + std::to_string(k), "f" + std::to_string(k + 1), latency, chain_loss, std::nullopt});
  }
  t.links.push_back({"client1", "server", latency, edge_loss, std::nullopt});
  for (int k = 2; k <= 8; ++k) {
    t.links.push_back({"client" + std::to_string(k), "f" + std::to_string(9 - k), latency, edge_loss, std::nullopt});
  }
  t.links.push_back({"client9", "f1", latency, edge_loss, std::nullopt});
  return t;
}

Topology Topology::single_link(double loss, SimTime latency) {
  Topology t;
  t.nodes = {{"server", Role::server}, {"client1", Role::client}};
  t.links = {{"client1", "server", latency, loss, std::nullopt}};
  return t;
}

Topology Topology::chain(int forwarders, double loss, SimTime latency) {
  if (forwarders < 0) throw ConfigError("chain needs a nonnegative forwarder count");
  Topology t;
  t.nodes.push_back({"server", Role::server});
  t.nodes.push_back({"client1", Role::client});
  std::string prev = "client1";
  for (int k = 1; k <= forwarders; ++k) {
    std::string name = "f" + std::to_string(k);
    t.nodes.push_back({name, Role::forwarder});
    t.links.push_back({prev, name, latency, loss, std::nullopt});
    prev = name;
  }
  t.links.push_back({prev, "server", latency, loss, std::nullopt});
  return t;
}

const NodeSpec* Topology::find(const std::string& name) const {
  for (const auto& n : nodes) {
    if (n.name == name) return &n;
  }
  return nullptr;
}

std::vector<std::string> Topology::names_with(Role role) const {
  std::vector<std::string> out;
  for (const auto& n : nodes) {
    if (n.role == role) out.push_back(n.name);
  }
  return out;
}

void Topology::validate() const {
  if (nodes.empty()) throw ConfigError("topology has no nodes");
  std::set<std::string> names;
  for (const auto& n : nodes) {
    if (n.name.empty()) throw ConfigError("node with empty name");
    if (!names.insert(n.name).second) throw ConfigError("duplicate node '" + n.name + "'");
  }
  if (names_with(Role::server).size() != 1) throw ConfigError("topology needs exactly one server");
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& l : links) {
    if (!names.count(l.a) || !names.count(l.b)) {
      throw ConfigError("link " + l.a + "-" + l.b + " references an unknown node");
    }
    if (l.a == l.b) throw ConfigError("self-loop on '" + l.a + "'");
    auto key = std::minmax(l.a, l.b);
    if (!seen.insert({key.first, key.second}).second) throw ConfigError("duplicate link " + l.a + "-" + l.b);
    auto bad = [](double p) { return !(p >= 0.0 && p <= 1.0); };
    if (bad(l.loss) || (l.loss_reverse && bad(*l.loss_reverse))) {
      throw ConfigError("loss probability of link " + l.a + "-" + l.b + " outside [0, 1]");
    }
    if (l.latency < 0) throw ConfigError("negative latency on link " + l.a + "-" + l.b);
  }
  Routing routing(*this);
  const auto server = names_with(Role::server).front();
  for (const auto& n : nodes) {
    if (n.name != server && routing.distance(n.name, server) < 0) {
      throw ConfigError("node '" + n.name + "' is not connected to the server");
    }
  }
}

Routing::Routing(const Topology& topology) {
  for (const auto& n : topology.nodes) adjacency_[n.name];
  for (const auto& l : topology.links) {
    adjacency_[l.a].push_back(l.b);
    adjacency_[l.b].push_back(l.a);
  }
  for (const auto& [dest, _] : adjacency_) {
    auto& dist = distance_[dest];
    dist[dest] = 0;
    std::deque<std::string> queue{dest};
    while (!queue.empty()) {
      auto u = queue.front();
      queue.pop_front();
      for (const auto& v : adjacency_[u]) {
        if (!dist.count(v)) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
}

const std::vector<std::string>& Routing::neighbors(const std::string& node) const {
  auto it = adjacency_.find(node);
  if (it == adjacency_.end()) throw ConfigError("unknown node '" + node + "'");
  return it->second;
}

int Routing::distance(const std::string& from, const std::string& destination) const {
  auto d = distance_.find(destination);
  if (d == distance_.end()) throw ConfigError("unknown node '" + destination + "'");
  auto it = d->second.find(from);
  return it == d->second.end() ? -1 : it->second;
}

std::vector<std::string> Routing::next_hops(const std::string& from, const std::string& destination) const {
  std::vector<std::string> out;
  const int d = distance(from, destination);
  if (d <= 0) return out;
  for (const auto& n : neighbors(from)) {
    if (distance(n, destination) == d - 1) out.push_back(n);
  }
  return out;
}

std::string Routing::next_hop(const std::string& from, const std::string& destination) const {
  auto hops = next_hops(from, destination);
  if (hops.empty()) throw ConfigError("no route from '" + from + "' to '" + destination + "'");
  return hops.front();
}

} // namespace wot::sim
