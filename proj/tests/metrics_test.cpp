#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wot/metrics/export.hpp"
#include "wot/metrics/suite.hpp"

namespace wot::metrics {
namespace {

using sim::ConfigError;
using sim::RawTrace;
using sim::TraceError;
using sim::TraceRecord;

TEST(Scenario, DefaultsFromEmptyDocument) {
  auto s = parse_scenario("");
  EXPECT_EQ(s.mode, sim::Mode::det_oscore_proxy);
  EXPECT_EQ(s.topology.preset, "paper-tree");
  EXPECT_EQ(s.workload.rounds, 1000);
  EXPECT_EQ(s.workload.jitter, milliseconds(500));
  EXPECT_EQ(s.mac.max_retries, 3);
  EXPECT_EQ(s.mac.backoff, (std::vector<SimTime>{milliseconds(4), milliseconds(8), milliseconds(16)}));
  EXPECT_EQ(s.crypto.signing_delay, milliseconds(20));
}

TEST(Scenario, ParsesEverySection) {
  auto s = parse_scenario(R"(
name: t
mode: ndn
seed: 99
topology: {preset: chain, forwarders: 2, loss: 0.25, latency_ms: 3}
mac: {max_retries: 2, backoff_ms: [1, 2], bitrate_bps: 100000, max_frame_bytes: 64}
workload: {rounds: 7, period_ms: 500, jitter_ms: 0, resource: /temp, drain_ms: 4000, clients: [client1]}
exchange: {request_timeout_ms: 1500, max_retries: 1, cache_capacity: 5}
crypto: {signing_delay_ms: 0, group_id: "0102"}
output: {dir: /tmp/x, trace: true}
)");
  EXPECT_EQ(s.name, "t");
  EXPECT_EQ(s.mode, sim::Mode::ndn);
  EXPECT_EQ(s.seed, 99u);
  auto topo = s.topology.build();
  EXPECT_EQ(topo.nodes.size(), 4u);
  EXPECT_DOUBLE_EQ(topo.links[0].loss, 0.25);
  EXPECT_EQ(topo.links[0].latency, milliseconds(3));
  EXPECT_EQ(s.mac.max_retries, 2);
  EXPECT_EQ(s.mac.backoff, (std::vector<SimTime>{milliseconds(1), milliseconds(2)}));
  EXPECT_EQ(s.mac.max_frame_bytes, 64u);
  EXPECT_EQ(s.workload.rounds, 7);
  EXPECT_EQ(s.workload.period, milliseconds(500));
  EXPECT_EQ(s.workload.resource, "/temp");
  EXPECT_EQ(s.workload.clients, std::vector<std::string>{"client1"});
  EXPECT_EQ(s.exchange.request_timeout, milliseconds(1500));
  EXPECT_EQ(s.exchange.cache_capacity, 5u);
  EXPECT_EQ(s.crypto.signing_delay, 0);
  EXPECT_EQ(s.crypto.group_id, (Bytes{1, 2}));
  EXPECT_EQ(s.output_dir, "/tmp/x");
  EXPECT_TRUE(s.write_trace);
}

TEST(Scenario, RejectsUnknownKeys) {
  EXPECT_THROW(parse_scenario("colour: blue"), ConfigError);
  EXPECT_THROW(parse_scenario("workload: {rounds: 3, speed: 2}"), ConfigError);
  EXPECT_THROW(parse_scenario("topology: {preset: chain, layers: 2}"), ConfigError);
  EXPECT_THROW(parse_scenario("output: {dir: x, format: csv}"), ConfigError);
  try {
    parse_scenario("mac: {retries: 3}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("retries"), std::string::npos);
  }
}

TEST(Scenario, RejectsBadValues) {
  EXPECT_THROW(parse_scenario("mode: quic"), ConfigError);
  EXPECT_THROW(parse_scenario("seed: minus"), ConfigError);
  EXPECT_THROW(parse_scenario("topology: {loss: 1.5}"), ConfigError);
  EXPECT_THROW(parse_scenario("topology: {preset: star}"), ConfigError);
  EXPECT_THROW(parse_scenario("workload: {period_ms: 0}"), ConfigError);
  EXPECT_THROW(parse_scenario("crypto: {signing_seed: zz}"), ConfigError);
  EXPECT_THROW(parse_scenario("topology: [1, 2]"), ConfigError);
  EXPECT_THROW(parse_scenario("topology: {preset: paper-tree, nodes: [{name: a, role: client}]}"), ConfigError);
  EXPECT_THROW(parse_scenario("{unbalanced"), ConfigError);
  EXPECT_THROW(load_scenario("/nonexistent/scenario.yaml"), ConfigError);
}

TEST(Scenario, CustomTopologyAndLossOverride) {
  auto s = parse_scenario(R"(
topology:
  preset: custom
  nodes: [{name: s, role: server}, {name: f, role: forwarder}, {name: c, role: client}]
  links: [{a: c, b: f, loss: 0.1, loss_reverse: 0.3}, {a: f, b: s}]
)");
  auto t = s.topology.build();
  ASSERT_EQ(t.links.size(), 2u);
  EXPECT_DOUBLE_EQ(*t.links[0].loss_reverse, 0.3);
  s.set_loss(0.5);
  for (const auto& l : s.topology.build().links) {
    EXPECT_DOUBLE_EQ(l.loss, 0.5);
    EXPECT_FALSE(l.loss_reverse);
  }
  EXPECT_THROW(parse_scenario("topology: {preset: custom, nodes: [{name: a, role: hub}]}"), ConfigError);
}

RawTrace one_success_trace() {
  RawTrace t;
  t.mode = "det-oscore-proxy";
  t.nodes = {{"server", sim::Role::server}, {"c", sim::Role::client}};
  TraceRecord issue;
  issue.t = seconds(5);
  issue.kind = "issue";
  issue.node = "c";
  issue.seq = 1;
  TraceRecord deliver = issue;
  deliver.kind = "deliver";
  deliver.t = seconds(5) + milliseconds(30);
  t.records = {issue, deliver};
  return t;
}

TEST(Reduce, SingleSuccess) {
  auto b = reduce_trace(one_success_trace());
  ASSERT_EQ(b.clients.size(), 1u);
  EXPECT_EQ(b.clients[0].retrieval_times, std::vector<SimTime>{milliseconds(30)});
  EXPECT_DOUBLE_EQ(b.success_rate(), 1.0);
  EXPECT_DOUBLE_EQ(b.clients[0].success_rate(), 1.0);
}

TEST(Reduce, MalformedRecordsCarryLineNumbers) {
  auto t = one_success_trace();
  t.records[1].seq = 2;  // delivery of something never issued
  try {
    reduce_trace(t);
    FAIL();
  } catch (const TraceError& e) {
    EXPECT_EQ(e.line(), 5u);  // header, two nodes, issue, deliver
  }
  t = one_success_trace();
  t.records[0].node = "ghost";
  try {
    reduce_trace(t);
    FAIL();
  } catch (const TraceError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  t = one_success_trace();
  TraceRecord crypto;
  crypto.kind = "crypto";
  crypto.node = "server";
  crypto.detail = "aead";
  crypto.value = 2;
  t.records.push_back(crypto);  // no matching final counter
  EXPECT_THROW(reduce_trace(t), TraceError);
  t.records.back().detail = "rot13";
  EXPECT_THROW(reduce_trace(t), TraceError);

  std::istringstream in("{\"kind\":\"header\",\"mode\":\"ndn\"}\n{\"kind\":\"node\",\"node\":\"c\",\"role\":\"client\"}\n"
                        "{\"t\":1,\"kind\":\"deliver\",\"node\":\"c\",\"seq\":1}\n");
  try {
    reduce_ndjson(in);
    FAIL();
  } catch (const TraceError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

sim::SimConfig zero_loss(sim::Mode mode, int rounds) {
  sim::SimConfig c;
  c.mode = mode;
  c.seed = 9;
  c.workload.rounds = rounds;
  return c;
}

TEST(Reduce, DeterministicReduction) {
  auto trace = sim::build_scenario(zero_loss(sim::Mode::ndn, 5)).run();
  auto a = reduce_trace(trace);
  auto b = reduce_trace(trace);
  EXPECT_EQ(summary_json(a), summary_json(b));
  EXPECT_EQ(link_stress_csv(a), link_stress_csv(b));
  EXPECT_EQ(retrieval_cdf_csv(a), retrieval_cdf_csv(b));
}

// Zero loss, single path: what enters a forwarder either leaves upstream or
// is answered locally, and what leaves arrives at the next hop.
TEST(Reduce, AccountingClosureOnLosslessRuns) {
  for (auto mode : {sim::Mode::det_oscore_proxy, sim::Mode::ndn, sim::Mode::coap_proxy, sim::Mode::oscore}) {
    auto b = reduce_trace(sim::build_scenario(zero_loss(mode, 20)).run());
    for (int k = 1; k <= 7; ++k) {
      const auto* f = b.forwarder("f" + std::to_string(k));
      ASSERT_NE(f, nullptr);
      EXPECT_EQ(f->requests_in, f->requests_out + f->cache_hits + f->aggregated) << to_string(mode) << " f" << k;
      EXPECT_EQ(f->responses_out, f->requests_in) << to_string(mode) << " f" << k;
      if (k < 7) {
        // f(k+1) also serves the client attached to it: client(8-k).
        const auto* up = b.forwarder("f" + std::to_string(k + 1));
        EXPECT_EQ(up->requests_in, f->requests_out + 20) << to_string(mode) << " f" << k;
        EXPECT_EQ(f->responses_in, up->responses_out - 20) << to_string(mode) << " f" << k;
      }
    }
  }
}

TEST(Reduce, CryptoNormalization) {
  auto trace = sim::build_scenario(zero_loss(sim::Mode::det_oscore_proxy, 30)).run();
  auto b = reduce_trace(trace);
  ASSERT_EQ(b.delivered, 270u);
  // Independent tally straight from the snapshot records.
  security::CryptoCounters server;
  for (const auto& r : trace.records) {
    if (r.kind != "counters" || r.node != "server") continue;
    if (r.detail == "aead") server.aead_ops = static_cast<std::uint64_t>(r.value);
    if (r.detail == "sign") server.sign_ops = static_cast<std::uint64_t>(r.value);
    if (r.detail == "hmac") server.hmac_ops = static_cast<std::uint64_t>(r.value);
  }
  const auto p = b.per_retrieval(sim::Role::server);
  EXPECT_DOUBLE_EQ(p.aead, static_cast<double>(server.aead_ops) / 270.0);
  EXPECT_DOUBLE_EQ(p.sign, static_cast<double>(server.sign_ops) / 270.0);
  EXPECT_DOUBLE_EQ(p.hmac, static_cast<double>(server.hmac_ops) / 270.0);
  EXPECT_NEAR(p.aead, 4.0 / 9.0, 1e-9);
  EXPECT_NEAR(p.sign, 2.0 / 9.0, 1e-9);
  EXPECT_NEAR(p.hmac, 6.0 / 9.0, 1e-9);

  const auto csv = crypto_csv(b);
  EXPECT_NE(csv.find("server,server,270,120,60,0,180,0.444444,0.222222,0.000000,0.666667"), std::string::npos) << csv;
}

TEST(Reduce, SteadyServerRateSkipsEdges) {
  MetricsBundle b;
  b.server_responses_per_second = std::vector<std::uint64_t>(30, 2);
  for (std::size_t i = 0; i < 10; ++i) b.server_responses_per_second[i] = 100;
  EXPECT_DOUBLE_EQ(b.steady_server_rate(), 2.0);
  EXPECT_DOUBLE_EQ(MetricsBundle{}.steady_server_rate(), 0.0);

  auto det = reduce_trace(sim::build_scenario(zero_loss(sim::Mode::det_oscore_proxy, 40)).run());
  EXPECT_DOUBLE_EQ(det.steady_server_rate(), 2.0);
  auto e2e = reduce_trace(sim::build_scenario(zero_loss(sim::Mode::oscore, 40)).run());
  EXPECT_DOUBLE_EQ(e2e.steady_server_rate(), 9.0);
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST(Export, EmptyBundleHasHeadersOnly) {
  MetricsBundle b;
  for (const auto& csv : {retrieval_cdf_csv(b), success_csv(b), server_rate_csv(b), link_stress_csv(b), crypto_csv(b)}) {
    EXPECT_EQ(line_count(csv), 1u) << csv;
  }
  EXPECT_NE(summary_json(b).find("\"success_rate\": 0.0"), std::string::npos);
}

TEST(Export, CdfIsSortedAndMonotone) {
  auto c = zero_loss(sim::Mode::det_oscore_proxy, 10);
  c.topology = sim::Topology::paper_tree(0.4, 0.4);
  auto csv = retrieval_cdf_csv(reduce_trace(sim::build_scenario(c).run()));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "client,retrieval_s,cumulative_fraction");
  std::string prev_client;
  double prev_t = -1, prev_f = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string client, t, f;
    std::getline(row, client, ',');
    std::getline(row, t, ',');
    std::getline(row, f, ',');
    if (client != prev_client) {
      if (!prev_client.empty()) EXPECT_DOUBLE_EQ(prev_f, 1.0);
      prev_client = client;
      prev_t = -1;
      prev_f = 0;
    }
    EXPECT_GE(std::stod(t), prev_t);
    EXPECT_GT(std::stod(f), prev_f);
    prev_t = std::stod(t);
    prev_f = std::stod(f);
    ++rows;
  }
  EXPECT_DOUBLE_EQ(prev_f, 1.0);
  EXPECT_GT(rows, 0u);
}

TEST(Export, WritesFilesAndReportsUnwritablePaths) {
  const auto dir = std::filesystem::temp_directory_path() / "wot_export_test";
  std::filesystem::remove_all(dir);
  export_bundle(reduce_trace(one_success_trace()), dir);
  for (const char* f : {kRetrievalCdfCsv, kSuccessCsv, kServerRateCsv, kLinkStressCsv, kCryptoCsv, kSummaryJson}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const auto blocker = dir / "file";
  std::ofstream(blocker) << "x";
  EXPECT_THROW(export_bundle(MetricsBundle{}, blocker / "sub"), ExportError);
  std::filesystem::remove_all(dir);
}

ScenarioConfig small_scenario() {
  auto s = parse_scenario("topology: {preset: paper-tree, loss: 0.2}\nworkload: {rounds: 8}\nseed: 4");
  return s;
}

TEST(Suite, SingleModeSingleRow) {
  auto report = run_suite(mode_sweep(small_scenario(), {sim::Mode::ndn}));
  ASSERT_EQ(report.runs.size(), 1u);
  EXPECT_EQ(line_count(report.to_csv()), 2u);
  EXPECT_EQ(line_count(report.to_table()), 2u);
}

TEST(Suite, IdenticalSeedsIdenticalReports) {
  auto configs = mode_sweep(small_scenario(), sim::all_modes());
  auto a = run_suite(configs, 1);
  auto b = run_suite(configs, 4);
  EXPECT_EQ(a.to_csv(), b.to_csv());
  ASSERT_EQ(a.runs.size(), 4u);
  for (std::size_t i = 0; i < configs.size(); ++i) EXPECT_EQ(a.runs[i].mode, configs[i].mode);
}

TEST(Suite, PropagatesRunErrors) {
  auto bad = small_scenario();
  bad.workload.clients = {"nobody"};
  EXPECT_THROW(run_suite({small_scenario(), bad}, 2), ConfigError);
}

} // namespace
} // namespace wot::metrics
