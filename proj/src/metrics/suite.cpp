#include "wot/metrics/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "wot/metrics/export.hpp"

namespace wot::metrics {

RunResult run_scenario(const ScenarioConfig& scenario, bool write_outputs) {
  auto trace = sim::build_scenario(scenario.sim_config()).run();
  RunResult result{scenario.name, scenario.mode, scenario.seed, reduce_trace(trace)};
  if (write_outputs) {
    export_bundle(result.bundle, scenario.output_dir);
    if (scenario.write_trace) {
      std::ofstream out(scenario.output_dir / "trace.ndjson", std::ios::binary | std::ios::trunc);
      if (!out) throw ExportError("cannot write " + (scenario.output_dir / "trace.ndjson").string());
      trace.write_ndjson(out);
    }
  }
  return result;
}

std::vector<ScenarioConfig> mode_sweep(const ScenarioConfig& base, const std::vector<sim::Mode>& modes) {
  std::vector<ScenarioConfig> out;
  for (auto m : modes) {
    auto s = base;
    s.mode = m;
    s.name = base.name + "/" + sim::to_string(m);
    s.output_dir = base.output_dir / sim::to_string(m);
    out.push_back(std::move(s));
  }
  return out;
}

SuiteReport run_suite(const std::vector<ScenarioConfig>& scenarios, unsigned jobs, bool write_outputs) {
  SuiteReport report;
  report.runs.resize(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        report.runs[i] = run_scenario(scenarios[i], write_outputs);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(scenarios.size())));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return report;
}

namespace {

std::vector<std::vector<std::string>> rows(const SuiteReport& report) {
  std::vector<std::string> header{"name", "mode", "seed", "success_rate"};
  std::vector<std::string> clients;
  if (!report.runs.empty()) {
    for (const auto& c : report.runs.front().bundle.clients) clients.push_back(c.client);
  }
  for (const auto& c : clients) header.push_back(c + "_success");
  for (const char* h : {"server_responses_per_round", "server_rate_steady_mean", "client_aead", "server_aead",
                        "server_sign", "server_hmac"}) {
    header.emplace_back(h);
  }
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  std::vector<std::vector<std::string>> out{header};
  for (const auto& r : report.runs) {
    const auto& b = r.bundle;
    std::vector<std::string> row{r.name, sim::to_string(r.mode), std::to_string(r.seed), num(b.success_rate())};
    for (const auto& c : clients) {
      const auto* m = b.client(c);
      row.push_back(m ? num(m->success_rate()) : "");
    }
    const auto client = b.per_retrieval(sim::Role::client);
    const auto server = b.per_retrieval(sim::Role::server);
    for (double v : {b.server_responses_per_round(), b.steady_server_rate(), client.aead, server.aead, server.sign,
                     server.hmac}) {
      row.push_back(num(v));
    }
    out.push_back(std::move(row));
  }
  return out;
}

} // namespace

std::string SuiteReport::to_csv() const {
  std::ostringstream out;
  for (const auto& row : rows(*this)) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

std::string SuiteReport::to_table() const {
  const auto table = rows(*this);
  std::vector<std::size_t> width(table.front().size(), 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << std::string(width[i] - row[i].size() + (i + 1 < row.size() ? 2 : 0), ' ');
    }
    out << '\n';
  }
  return out.str();
}

} // namespace wot::metrics
