#pragma once

#include <filesystem>
#include <string>

#include "wot/sim/simulation.hpp"

namespace wot::metrics {

/// Topology as written in a scenario: a preset with its knobs, or explicit
/// node and link lists (preset "custom").
struct TopologyConfig {
  std::string preset = "paper-tree";
  int forwarders = 3;         // chain
  double loss = 0.0;          // paper-tree: f1..f7 links; other presets: every link
  double edge_loss = 0.0;     // paper-tree: links outside the chain
  SimTime latency = milliseconds(1);
  std::vector<sim::NodeSpec> nodes;
  std::vector<sim::LinkSpec> links;

  sim::Topology build() const;
};

struct ScenarioConfig {
  std::string name = "scenario";
  sim::Mode mode = sim::Mode::det_oscore_proxy;
  std::uint64_t seed = 1;
  TopologyConfig topology;
  sim::MacConfig mac;
  sim::WorkloadConfig workload;
  sim::ExchangeConfig exchange;
  sim::CryptoConfig crypto;
  std::filesystem::path output_dir = "out";
  bool write_trace = false;

  sim::SimConfig sim_config() const;
  /// Overrides the loss knob; explicit links all take the new value.
  void set_loss(double loss);
};

/// Parses the YAML scenario format. Unknown keys, wrong types and
/// out-of-range values throw sim::ConfigError naming the offending key.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

} // namespace wot::metrics
