#include "wot/metrics/export.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wot::metrics {

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ExportError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw ExportError("write failed for " + path.string());
}

double ratio(std::uint64_t n, std::uint64_t d) { return d ? static_cast<double>(n) / static_cast<double>(d) : 0.0; }

} // namespace

std::string retrieval_cdf_csv(const MetricsBundle& b) {
  std::ostringstream out;
  out << "client,retrieval_s,cumulative_fraction\n";
  auto emit = [&](const std::string& name, std::vector<SimTime> samples) {
    std::sort(samples.begin(), samples.end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      out << name << ',' << fixed(to_seconds(samples[i])) << ',' << fixed(ratio(i + 1, samples.size())) << '\n';
    }
  };
  std::vector<SimTime> all;
  for (const auto& c : b.clients) {
    emit(c.client, c.retrieval_times);
    all.insert(all.end(), c.retrieval_times.begin(), c.retrieval_times.end());
  }
  if (!all.empty()) emit("all", std::move(all));
  return out.str();
}

std::string success_csv(const MetricsBundle& b) {
  std::ostringstream out;
  out << "client,issued,delivered,failed,success_rate\n";
  for (const auto& c : b.clients) {
    out << c.client << ',' << c.issued << ',' << c.delivered << ',' << c.failed << ',' << fixed(c.success_rate())
        << '\n';
  }
  return out.str();
}

std::string server_rate_csv(const MetricsBundle& b) {
  std::ostringstream out;
  out << "second,responses\n";
  for (std::size_t s = 0; s < b.server_responses_per_second.size(); ++s) {
    out << s << ',' << b.server_responses_per_second[s] << '\n';
  }
  return out.str();
}

std::string link_stress_csv(const MetricsBundle& b) {
  std::ostringstream out;
  out << "node,requests_in,requests_out,responses_in,responses_out,frames_out,attempts_out,lost_out,cache_hits,"
         "aggregated\n";
  for (const auto& f : b.forwarders) {
    out << f.node << ',' << f.requests_in << ',' << f.requests_out << ',' << f.responses_in << ',' << f.responses_out
        << ',' << f.frames_out << ',' << f.attempts_out << ',' << f.lost_out << ',' << f.cache_hits << ','
        << f.aggregated << '\n';
  }
  return out.str();
}

std::string crypto_csv(const MetricsBundle& b) {
  std::ostringstream out;
  out << "node,role,retrievals,aead,sign,verify,hmac,aead_per_retrieval,sign_per_retrieval,verify_per_retrieval,"
         "hmac_per_retrieval\n";
  for (const auto& row : b.crypto) {
    const auto& c = row.raw;
    out << row.node << ',' << sim::to_string(row.role) << ',' << b.delivered << ',' << c.aead_ops << ',' << c.sign_ops
        << ',' << c.verify_ops << ',' << c.hmac_ops << ',' << fixed(ratio(c.aead_ops, b.delivered)) << ','
        << fixed(ratio(c.sign_ops, b.delivered)) << ',' << fixed(ratio(c.verify_ops, b.delivered)) << ','
        << fixed(ratio(c.hmac_ops, b.delivered)) << '\n';
  }
  return out.str();
}

std::string summary_json(const MetricsBundle& b) {
  using nlohmann::json;
  json j;
  j["mode"] = b.mode;
  j["rounds"] = b.rounds;
  j["issued"] = b.issued;
  j["delivered"] = b.delivered;
  j["success_rate"] = b.success_rate();
  j["server_responses"] = b.server_responses;
  j["server_responses_per_round"] = b.server_responses_per_round();
  j["server_rate_steady_mean"] = b.steady_server_rate();
  json clients = json::array();
  for (const auto& c : b.clients) {
    json row;
    row["client"] = c.client;
    row["issued"] = c.issued;
    row["delivered"] = c.delivered;
    row["success_rate"] = c.success_rate();
    if (!c.retrieval_times.empty()) {
      auto sorted = c.retrieval_times;
      std::sort(sorted.begin(), sorted.end());
      row["median_retrieval_s"] = to_seconds(sorted[sorted.size() / 2]);
    } else {
      row["median_retrieval_s"] = nullptr;
    }
    clients.push_back(row);
  }
  j["clients"] = clients;
  json crypto;
  for (auto role : {sim::Role::client, sim::Role::forwarder, sim::Role::server}) {
    const auto p = b.per_retrieval(role);
    crypto[sim::to_string(role)] = {{"aead", p.aead}, {"sign", p.sign}, {"verify", p.verify}, {"hmac", p.hmac}};
  }
  j["crypto_per_retrieval"] = crypto;
  return j.dump(2) + "\n";
}

void export_bundle(const MetricsBundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ExportError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / kRetrievalCdfCsv, retrieval_cdf_csv(bundle));
  write_file(dir / kSuccessCsv, success_csv(bundle));
  write_file(dir / kServerRateCsv, server_rate_csv(bundle));
  write_file(dir / kLinkStressCsv, link_stress_csv(bundle));
  write_file(dir / kCryptoCsv, crypto_csv(bundle));
  write_file(dir / kSummaryJson, summary_json(bundle));
}

} // namespace wot::metrics
