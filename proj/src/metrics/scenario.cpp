#include "wot/metrics/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace wot::metrics {

using sim::ConfigError;

namespace {

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& key, const std::string& where, T fallback) {
  const auto v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

SimTime get_ms(const YAML::Node& node, const std::string& key, const std::string& where, SimTime fallback) {
  const auto ms = get<double>(node, key, where, static_cast<double>(fallback) / 1000.0);
  if (ms < 0) throw ConfigError(where + "." + key + ": must be nonnegative");
  return static_cast<SimTime>(ms * 1000.0 + 0.5);
}

double get_probability(const YAML::Node& node, const std::string& key, const std::string& where, double fallback) {
  const auto p = get<double>(node, key, where, fallback);
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(where + "." + key + ": must lie in [0, 1]");
  return p;
}

Bytes get_hex(const YAML::Node& node, const std::string& key, const std::string& where, const Bytes& fallback) {
  const auto text = get<std::string>(node, key, where, "");
  if (text.empty()) return fallback;
  try {
    return from_hex(text);
  } catch (const std::exception&) {
    throw ConfigError(where + "." + key + ": not a hex string");
  }
}

TopologyConfig parse_topology(const YAML::Node& node) {
  const std::string where = "topology";
  check_keys(node, where, {"preset", "forwarders", "loss", "edge_loss", "latency_ms", "nodes", "links"});
  TopologyConfig t;
  t.preset = get<std::string>(node, "preset", where, t.preset);
  t.forwarders = get<int>(node, "forwarders", where, t.forwarders);
  t.loss = get_probability(node, "loss", where, t.loss);
  t.edge_loss = get_probability(node, "edge_loss", where, t.edge_loss);
  t.latency = get_ms(node, "latency_ms", where, t.latency);
  if (const auto nodes = node["nodes"]) {
    if (!nodes.IsSequence()) throw ConfigError("topology.nodes: expected a list");
    for (const auto& n : nodes) {
      check_keys(n, "topology.nodes[]", {"name", "role"});
      t.nodes.push_back({get<std::string>(n, "name", "topology.nodes[]", ""),
                         sim::parse_role(get<std::string>(n, "role", "topology.nodes[]", ""))});
    }
  }
  if (const auto links = node["links"]) {
    if (!links.IsSequence()) throw ConfigError("topology.links: expected a list");
    for (const auto& l : links) {
      const std::string w = "topology.links[]";
      check_keys(l, w, {"a", "b", "latency_ms", "loss", "loss_reverse"});
      sim::LinkSpec spec;
      spec.a = get<std::string>(l, "a", w, "");
      spec.b = get<std::string>(l, "b", w, "");
      spec.latency = get_ms(l, "latency_ms", w, t.latency);
      spec.loss = get_probability(l, "loss", w, t.loss);
      if (l["loss_reverse"]) spec.loss_reverse = get_probability(l, "loss_reverse", w, 0.0);
      t.links.push_back(spec);
    }
  }
  if (t.preset == "custom") {
    if (t.nodes.empty()) throw ConfigError("topology: preset 'custom' needs nodes and links");
  } else if (!t.nodes.empty() || !t.links.empty()) {
    throw ConfigError("topology: explicit nodes/links require preset 'custom'");
  }
  return t;
}

} // namespace

sim::Topology TopologyConfig::build() const {
  if (preset == "paper-tree") return sim::Topology::paper_tree(loss, edge_loss, latency);
  if (preset == "single-link") return sim::Topology::single_link(loss, latency);
  if (preset == "chain") return sim::Topology::chain(forwarders, loss, latency);
  if (preset == "custom") return sim::Topology{nodes, links};
  throw ConfigError("topology: unknown preset '" + preset + "'");
}

sim::SimConfig ScenarioConfig::sim_config() const {
  sim::SimConfig c;
  c.mode = mode;
  c.seed = seed;
  c.topology = topology.build();
  c.mac = mac;
  c.workload = workload;
  c.exchange = exchange;
  c.crypto = crypto;
  return c;
}

void ScenarioConfig::set_loss(double loss) {
  if (!(loss >= 0.0 && loss <= 1.0)) throw ConfigError("loss must lie in [0, 1]");
  topology.loss = loss;
  for (auto& l : topology.links) {
    l.loss = loss;
    l.loss_reverse.reset();
  }
}

ScenarioConfig parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario is not valid YAML: ") + e.what());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  check_keys(root, "scenario", {"name", "mode", "seed", "topology", "mac", "workload", "exchange", "crypto", "output"});
  ScenarioConfig s;
  s.name = get<std::string>(root, "name", "scenario", s.name);
  s.mode = sim::parse_mode(get<std::string>(root, "mode", "scenario", sim::to_string(s.mode)));
  s.seed = get<std::uint64_t>(root, "seed", "scenario", s.seed);
  if (const auto t = root["topology"]) s.topology = parse_topology(t);

  if (const auto m = root["mac"]) {
    check_keys(m, "mac", {"max_retries", "backoff_ms", "bitrate_bps", "max_frame_bytes"});
    s.mac.max_retries = get<int>(m, "max_retries", "mac", s.mac.max_retries);
    if (const auto b = m["backoff_ms"]) {
      if (!b.IsSequence()) throw ConfigError("mac.backoff_ms: expected a list");
      s.mac.backoff.clear();
      for (const auto& v : b) s.mac.backoff.push_back(static_cast<SimTime>(v.as<double>() * 1000.0 + 0.5));
    }
    s.mac.bitrate_bps = get<double>(m, "bitrate_bps", "mac", s.mac.bitrate_bps);
    s.mac.max_frame_bytes = get<std::size_t>(m, "max_frame_bytes", "mac", s.mac.max_frame_bytes);
  }
  if (const auto w = root["workload"]) {
    check_keys(w, "workload", {"rounds", "period_ms", "jitter_ms", "resource", "drain_ms", "clients"});
    s.workload.rounds = get<int>(w, "rounds", "workload", s.workload.rounds);
    s.workload.period = get_ms(w, "period_ms", "workload", s.workload.period);
    s.workload.jitter = get_ms(w, "jitter_ms", "workload", s.workload.jitter);
    s.workload.resource = get<std::string>(w, "resource", "workload", s.workload.resource);
    s.workload.drain = get_ms(w, "drain_ms", "workload", s.workload.drain);
    s.workload.clients = get<std::vector<std::string>>(w, "clients", "workload", {});
  }
  if (const auto e = root["exchange"]) {
    check_keys(e, "exchange", {"request_timeout_ms", "max_retries", "cache_capacity"});
    s.exchange.request_timeout = get_ms(e, "request_timeout_ms", "exchange", s.exchange.request_timeout);
    s.exchange.max_retries = get<int>(e, "max_retries", "exchange", s.exchange.max_retries);
    s.exchange.cache_capacity = get<std::size_t>(e, "cache_capacity", "exchange", s.exchange.cache_capacity);
  }
  if (const auto c = root["crypto"]) {
    check_keys(c, "crypto", {"master_secret", "master_salt", "group_id", "signing_seed", "signing_delay_ms"});
    s.crypto.master_secret = get_hex(c, "master_secret", "crypto", s.crypto.master_secret);
    s.crypto.master_salt = get_hex(c, "master_salt", "crypto", s.crypto.master_salt);
    s.crypto.group_id = get_hex(c, "group_id", "crypto", s.crypto.group_id);
    s.crypto.signing_seed = get_hex(c, "signing_seed", "crypto", s.crypto.signing_seed);
    s.crypto.signing_delay = get_ms(c, "signing_delay_ms", "crypto", s.crypto.signing_delay);
  }
  if (const auto o = root["output"]) {
    check_keys(o, "output", {"dir", "trace"});
    s.output_dir = get<std::string>(o, "dir", "output", s.output_dir.string());
    s.write_trace = get<bool>(o, "trace", "output", s.write_trace);
  }
  // Surface topology and parameter errors now rather than at run time.
  sim::build_scenario(s.sim_config());
  return s;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

} // namespace wot::metrics
