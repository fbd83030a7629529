#pragma once

#include <string>
#include <vector>

#include "wot/metrics/reduce.hpp"
#include "wot/metrics/scenario.hpp"

namespace wot::metrics {

struct RunResult {
  std::string name;
  sim::Mode mode = sim::Mode::det_oscore_proxy;
  std::uint64_t seed = 0;
  MetricsBundle bundle;
};

/// Builds, runs and reduces one scenario. With `write_outputs`, CSVs,
/// summary.json and (if requested by the scenario) trace.ndjson go to the
/// scenario's output directory.
RunResult run_scenario(const ScenarioConfig& scenario, bool write_outputs = false);

/// One copy of `base` per mode, same seed, output in <dir>/<mode>.
std::vector<ScenarioConfig> mode_sweep(const ScenarioConfig& base, const std::vector<sim::Mode>& modes);

struct SuiteReport {
  std::vector<RunResult> runs;

  /// Columns: name, mode, seed, success_rate, one <client>_success column per
  /// client of the first run, server_responses_per_round,
  /// server_rate_steady_mean, client_aead, server_aead, server_sign,
  /// server_hmac (per retrieval).
  std::string to_csv() const;
  /// The same content as an aligned text table.
  std::string to_table() const;
};

/// Runs every scenario, up to `jobs` at a time; results keep input order.
/// The first failing run's exception propagates.
SuiteReport run_suite(const std::vector<ScenarioConfig>& scenarios, unsigned jobs = 1, bool write_outputs = false);

} // namespace wot::metrics
