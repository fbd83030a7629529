#include "wot/metrics/reduce.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>

namespace wot::metrics {

using sim::TraceError;
using sim::TraceRecord;

double MetricsBundle::steady_server_rate(std::size_t margin) const {
  const auto& s = server_responses_per_second;
  if (s.size() <= 2 * margin) return 0.0;
  const auto first = s.begin() + static_cast<std::ptrdiff_t>(margin);
  const auto last = s.end() - static_cast<std::ptrdiff_t>(margin);
  return static_cast<double>(std::accumulate(first, last, std::uint64_t{0})) / static_cast<double>(last - first);
}

const ClientMetrics* MetricsBundle::client(const std::string& name) const {
  for (const auto& c : clients) {
    if (c.client == name) return &c;
  }
  return nullptr;
}

const ForwarderLoad* MetricsBundle::forwarder(const std::string& name) const {
  for (const auto& f : forwarders) {
    if (f.node == name) return &f;
  }
  return nullptr;
}

security::CryptoCounters MetricsBundle::role_counters(sim::Role role) const {
  security::CryptoCounters sum;
  for (const auto& row : crypto) {
    if (row.role == role) sum += row.raw;
  }
  return sum;
}

MetricsBundle::PerRetrieval MetricsBundle::per_retrieval(sim::Role role) const {
  PerRetrieval out;
  if (delivered == 0) return out;
  const auto c = role_counters(role);
  const auto d = static_cast<double>(delivered);
  out.aead = static_cast<double>(c.aead_ops) / d;
  out.sign = static_cast<double>(c.sign_ops) / d;
  out.verify = static_cast<double>(c.verify_ops) / d;
  out.hmac = static_cast<double>(c.hmac_ops) / d;
  return out;
}

namespace {

std::uint64_t& counter_field(security::CryptoCounters& c, const std::string& op, std::size_t line) {
  if (op == "aead") return c.aead_ops;
  if (op == "sign") return c.sign_ops;
  if (op == "verify") return c.verify_ops;
  if (op == "hmac") return c.hmac_ops;
  throw TraceError(line, "unknown crypto operation '" + op + "'");
}

bool is_request(const std::string& msg) { return msg == "request" || msg == "interest"; }
bool is_response(const std::string& msg) { return msg == "response" || msg == "data"; }

} // namespace

MetricsBundle reduce_trace(const sim::RawTrace& trace) {
  MetricsBundle b;
  b.mode = trace.mode;
  std::map<std::string, sim::Role> roles;
  std::map<std::string, std::size_t> client_index;
  std::map<std::string, std::size_t> forwarder_index;
  std::map<std::string, security::CryptoCounters> ops;
  std::map<std::string, security::CryptoCounters> finals;
  for (const auto& n : trace.nodes) {
    roles[n.name] = n.role;
    if (n.role == sim::Role::client) {
      client_index[n.name] = b.clients.size();
      b.clients.push_back({n.name, 0, 0, 0, {}});
    } else if (n.role == sim::Role::forwarder) {
      forwarder_index[n.name] = b.forwarders.size();
      b.forwarders.push_back({n.name});
    }
  }

  // Open exchanges per client: seq -> issue time.
  std::map<std::string, std::map<std::int64_t, SimTime>> open;
  const std::size_t first_line = 2 + trace.nodes.size();
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const TraceRecord& r = trace.records[i];
    const std::size_t line = first_line + i;
    auto role_it = roles.find(r.node);
    if (role_it == roles.end()) throw TraceError(line, "record for unknown node '" + r.node + "'");
    const auto role = role_it->second;

    if (r.kind == "issue" || r.kind == "deliver" || r.kind == "fail") {
      if (role != sim::Role::client) throw TraceError(line, r.kind + " record on non-client '" + r.node + "'");
      auto& c = b.clients[client_index.at(r.node)];
      auto& pending = open[r.node];
      if (r.kind == "issue") {
        if (!pending.emplace(r.seq, r.t).second) throw TraceError(line, "exchange issued twice");
        ++c.issued;
        b.rounds = std::max<std::uint64_t>(b.rounds, static_cast<std::uint64_t>(std::max<std::int64_t>(r.seq, 0)));
        continue;
      }
      auto it = pending.find(r.seq);
      if (it == pending.end()) throw TraceError(line, r.kind + " for an exchange that is not open");
      if (r.kind == "deliver") {
        ++c.delivered;
        c.retrieval_times.push_back(r.t - it->second);
      } else {
        ++c.failed;
      }
      pending.erase(it);
    } else if (r.kind == "send") {
      if (role == sim::Role::server && is_response(r.msg)) {
        ++b.server_responses;
        const auto second = static_cast<std::size_t>(r.t / seconds(1));
        if (b.server_responses_per_second.size() <= second) b.server_responses_per_second.resize(second + 1, 0);
        ++b.server_responses_per_second[second];
      }
      if (role == sim::Role::forwarder) {
        auto& f = b.forwarders[forwarder_index.at(r.node)];
        if (is_request(r.msg)) ++f.requests_out;
        if (is_response(r.msg)) ++f.responses_out;
      }
    } else if (r.kind == "rx") {
      if (role == sim::Role::forwarder) {
        auto& f = b.forwarders[forwarder_index.at(r.node)];
        if (is_request(r.msg)) ++f.requests_in;
        if (is_response(r.msg)) ++f.responses_in;
      }
    } else if (r.kind == "tx") {
      if (r.attempts < r.frames || r.frames <= 0) throw TraceError(line, "tx record with inconsistent attempts");
      if (role == sim::Role::forwarder) {
        auto& f = b.forwarders[forwarder_index.at(r.node)];
        f.frames_out += static_cast<std::uint64_t>(r.frames);
        f.attempts_out += static_cast<std::uint64_t>(r.attempts);
        if (r.detail == "lost") ++f.lost_out;
      }
    } else if (r.kind == "cache_hit" || r.kind == "aggregate") {
      if (role != sim::Role::forwarder) throw TraceError(line, r.kind + " record on non-forwarder");
      auto& f = b.forwarders[forwarder_index.at(r.node)];
      ++(r.kind == "cache_hit" ? f.cache_hits : f.aggregated);
    } else if (r.kind == "crypto") {
      if (r.value <= 0) throw TraceError(line, "crypto record without a positive count");
      counter_field(ops[r.node], r.detail, line) += static_cast<std::uint64_t>(r.value);
    } else if (r.kind == "counters") {
      if (r.value < 0) throw TraceError(line, "negative counter");
      counter_field(finals[r.node], r.detail, line) = static_cast<std::uint64_t>(r.value);
    }
  }

  for (const auto& c : b.clients) {
    b.issued += c.issued;
    b.delivered += c.delivered;
  }
  const std::size_t end_line = first_line + trace.records.size();
  for (const auto& n : trace.nodes) {
    const auto o = ops.count(n.name) ? ops.at(n.name) : security::CryptoCounters{};
    const auto f = finals.count(n.name) ? finals.at(n.name) : security::CryptoCounters{};
    if (!(o == f)) throw TraceError(end_line, "crypto records of '" + n.name + "' disagree with its final counters");
    b.crypto.push_back({n.name, n.role, f});
  }
  return b;
}

MetricsBundle reduce_ndjson(std::istream& in) { return reduce_trace(sim::RawTrace::read_ndjson(in)); }

} // namespace wot::metrics
