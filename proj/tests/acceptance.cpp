// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs a
// single criterion; the exit status is non-zero when any selected
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "generators.hpp"
#include "retransmission_oracle.hpp"
#include "sim_properties.hpp"
#include "wot/coap/cache_key.hpp"
#include "wot/coap/codec.hpp"
#include "wot/crypto/primitives.hpp"
#include "wot/metrics/reduce.hpp"
#include "wot/security/oscore.hpp"
#include "wot/sim/simulation.hpp"

using namespace wot;
using sim::Mode;
using sim::Role;

namespace {

// Pinned tolerances.
namespace tol {
constexpr double kExact = 1e-9;             // integer ratios
constexpr double kTwoNinths = 0.01;         // per-retrieval ratios that are multiples of 1/9
constexpr double kRuntimeSeconds = 10.0;    // zero-loss 100-round runs, all modes together
constexpr SimTime kCluster = milliseconds(200);
constexpr double kSuccessAbs = 0.02;        // single-link success vs closed form
constexpr double kDetAdvantage = 0.20;      // det client9 minus oscore client9
constexpr double kDetUniformity = 0.05;     // |det client9 - det client1|
constexpr double kCodecSeconds = 60.0;
}  // namespace tol

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

sim::RawTrace run_trace(const sim::SimConfig& c) { return sim::Simulation(c).run(); }
metrics::MetricsBundle run(const sim::SimConfig& c) { return metrics::reduce_trace(run_trace(c)); }

sim::SimConfig paper_tree(Mode mode, int rounds, double chain_loss = 0.0) {
  sim::SimConfig c;
  c.mode = mode;
  c.topology = sim::Topology::paper_tree(chain_loss, 0.0);
  c.workload.rounds = rounds;
  return c;
}

bool near(double a, double b, double t) { return std::abs(a - b) <= t; }

// 1. Server load at zero loss.
Result server_load() {
  const auto start = std::chrono::steady_clock::now();
  const std::pair<Mode, double> expected[] = {
      {Mode::oscore, 9.0}, {Mode::oscore_proxy, 9.0}, {Mode::det_oscore_proxy, 2.0}, {Mode::ndn, 2.0}};
  Result r{true, ""};
  for (const auto& [mode, want] : expected) {
    const double got = run(paper_tree(mode, 100)).server_responses_per_round();
    r.pass &= near(got, want, tol::kExact);
    r.detail += fmt("%s %.4f/round (want %.1f); ", sim::to_string(mode).c_str(), got, want);
  }
  const double secs = elapsed_since(start);
  r.pass &= secs < tol::kRuntimeSeconds;
  r.detail += fmt("runtime %.2f s (limit %.0f s)", secs, tol::kRuntimeSeconds);
  return r;
}

// 2. Cryptographic operations per successful retrieval.
Result crypto_per_retrieval() {
  Result r{true, ""};
  auto check = [&](const char* label, double got, double want, double t) {
    const bool ok = near(got, want, t);
    r.pass &= ok;
    r.detail += fmt("%s %.4f%s; ", label, got, ok ? "" : fmt(" (want %.4f)", want).c_str());
  };
  const auto osc = run(paper_tree(Mode::oscore, 100));
  check("oscore client aead", osc.per_retrieval(Role::client).aead, 2.0, tol::kExact);
  check("oscore server aead", osc.per_retrieval(Role::server).aead, 2.0, tol::kExact);
  const auto det = run(paper_tree(Mode::det_oscore_proxy, 100));
  const auto dc = det.per_retrieval(Role::client);
  const auto ds = det.per_retrieval(Role::server);
  check("det client aead", dc.aead, 2.0, tol::kExact);
  check("det client verify", dc.verify, 1.0, tol::kExact);
  check("det client hmac", dc.hmac, 3.0, tol::kExact);
  check("det server aead", ds.aead, 0.44, tol::kTwoNinths);
  check("det server sign", ds.sign, 0.22, tol::kTwoNinths);
  check("det server hmac", ds.hmac, 0.67, tol::kTwoNinths);
  return r;
}

// 3. Deterministic requests are identical across members; standard ones never repeat.
Result request_determinism() {
  const sim::CryptoConfig cc;
  security::GroupConfig gc;
  gc.master_secret = cc.master_secret;
  gc.master_salt = cc.master_salt;
  gc.group_id = cc.group_id;
  gc.signing_seed = cc.signing_seed;
  auto a = security::SecurityContext::deterministic_group(gc, Bytes{0x11}, false);
  auto b = security::SecurityContext::deterministic_group(gc, Bytes{0x12}, false);
  auto standard = security::SecurityContext::standard(cc.master_secret, cc.master_salt, Bytes{0x01}, Bytes{});
  security::CryptoCounters counters;
  gen::Gen g(2024);
  int identical = 0;
  std::set<Bytes> outputs;
  std::set<coap::CacheKey> keys;
  constexpr int kPlaintexts = 1000;
  for (int i = 0; i < kPlaintexts; ++i) {
    auto req = g.request();
    req.set_code(g.chance(0.5) ? coap::Code::get : coap::Code::fetch);
    req.remove_options(coap::OptionNumber::oscore);
    req.remove_options(coap::OptionNumber::request_hash);
    auto pa = security::deterministic_protect_request(a, req, counters);
    auto pb = security::deterministic_protect_request(b, req, counters);
    identical += coap::encode_message(pa.message) == coap::encode_message(pb.message);
    for (int copy = 0; copy < 2; ++copy) {
      auto p = security::protect_request(standard, req, counters);
      outputs.insert(coap::encode_message(p.message));
      keys.insert(coap::compute_cache_key(p.message));
    }
  }
  const bool pass = identical == kPlaintexts && outputs.size() == 2 * kPlaintexts && keys.size() == 2 * kPlaintexts;
  return {pass, fmt("deterministic identical %d/%d; standard distinct outputs %zu/%d, distinct cache keys %zu/%d",
                    identical, kPlaintexts, outputs.size(), 2 * kPlaintexts, keys.size(), 2 * kPlaintexts)};
}

// 4. Forwarder state invariants on random small topologies.
Result forwarder_invariants() {
  constexpr int kCases = 10000;
  const Mode modes[] = {Mode::coap_proxy, Mode::oscore_proxy, Mode::det_oscore_proxy, Mode::ndn};
  gen::Gen g(4);
  int failures = 0;
  std::string first;
  std::map<std::string, std::uint64_t> pending, aggregated;
  for (int i = 0; i < kCases; ++i) {
    const auto mode = modes[i % 4];
    const auto config = props::random_small_config(g, mode);
    std::vector<std::string> violations;
    try {
      const auto trace = run_trace(config);
      violations = props::trace_violations(trace);
      for (const auto& rec : trace.records) {
        if (rec.kind == "pending_open") ++pending[trace.mode];
        if (rec.kind == "aggregate") ++aggregated[trace.mode];
      }
    } catch (const std::exception& e) {
      violations.push_back(std::string("exception: ") + e.what());
    }
    if (!violations.empty()) {
      if (failures++ == 0) first = fmt("case %d (%s): %s", i, sim::to_string(mode).c_str(), violations.front().c_str());
    }
  }
  std::string detail = fmt("%d cases, %d violating", kCases, failures);
  for (const auto& [mode, n] : pending) detail += fmt("; %s entries %llu aggregated %llu", mode.c_str(),
                                                      static_cast<unsigned long long>(n),
                                                      static_cast<unsigned long long>(aggregated[mode]));
  if (failures) detail += "; first: " + first;
  return {failures == 0, detail};
}

// Closed form for a message of `frames` fragments under per-frame loss p and
// R attempts per fragment: every fragment but the last must be
// acknowledged, the last only received.
double message_delivery(double p, int frames, int attempts) {
  const double acked = 1.0 - std::pow(1.0 - (1.0 - p) * (1.0 - p), attempts);
  const double received = 1.0 - std::pow(p, attempts);
  return std::pow(acked, frames - 1) * received;
}

// 5. Retrieval times cluster at the retransmission offsets; success matches the closed form.
Result single_link_staircase() {
  constexpr double kLoss = 0.3;
  sim::SimConfig c;
  c.mode = Mode::det_oscore_proxy;
  c.topology = sim::Topology::single_link(kLoss);
  c.workload.rounds = 2000;
  const auto trace = run_trace(c);
  const auto m = metrics::reduce_trace(trace);

  int req_frames = 0, resp_frames = 0;
  for (const auto& r : trace.records) {
    if (r.kind != "tx") continue;
    const int frames = sim::fragment_count(static_cast<std::size_t>(r.value), c.mac.max_frame_bytes);
    (r.msg == "request" ? req_frames : resp_frames) = std::max(r.msg == "request" ? req_frames : resp_frames, frames);
  }
  const int attempts = 1 + c.mac.max_retries;
  const double per_attempt = message_delivery(kLoss, req_frames, attempts) * message_delivery(kLoss, resp_frames, attempts);
  const int exchanges = 1 + c.exchange.max_retries;
  const double expected = 1.0 - std::pow(1.0 - per_attempt, exchanges);

  std::map<int, int> clusters;
  int outside = 0;
  for (auto t : m.clients.at(0).retrieval_times) {
    const auto k = (t + seconds(1)) / seconds(2);
    if (k <= 3 && std::abs(t - k * seconds(2)) <= tol::kCluster) ++clusters[static_cast<int>(k)];
    else ++outside;
  }
  const double success = m.success_rate();
  const bool pass = outside == 0 && near(success, expected, tol::kSuccessAbs);
  return {pass, fmt("success %.4f vs closed form %.4f (frames %d/%d); clusters 0s:%d 2s:%d 4s:%d 6s:%d, outside %d",
                    success, expected, req_frames, resp_frames, clusters[0], clusters[1], clusters[2], clusters[3],
                    outside)};
}

// 6. Success under chain loss: deterministic requests versus end-to-end OSCORE.
Result lossy_chain_success() {
  constexpr double kChainLoss = 0.2;
  const auto det = run(paper_tree(Mode::det_oscore_proxy, 1000, kChainLoss));
  const auto osc = run(paper_tree(Mode::oscore, 1000, kChainLoss));
  const double d9 = det.client("client9")->success_rate();
  const double d1 = det.client("client1")->success_rate();
  const double o9 = osc.client("client9")->success_rate();
  const bool pass = d9 - o9 >= tol::kDetAdvantage && std::abs(d9 - d1) <= tol::kDetUniformity;
  return {pass, fmt("det client9 %.4f, oscore client9 %.4f (advantage %.1f pp, need %.0f); det client1 %.4f "
                    "(gap %.1f pp, limit %.0f)",
                    d9, o9, 100 * (d9 - o9), 100 * tol::kDetAdvantage, d1, 100 * std::abs(d9 - d1),
                    100 * tol::kDetUniformity)};
}

// 7. Exhaustive drop patterns on client -- forwarder -- server against the reference model.
Result drop_pattern_oracle() {
  constexpr int kRounds = 2;
  int mismatches = 0;
  std::string first;
  std::uint64_t delivered = 0;
  for (Mode mode : {Mode::det_oscore_proxy, Mode::ndn}) {
    for (std::uint32_t mask = 0; mask < 4096; ++mask) {
      sim::SimConfig c;
      c.mode = mode;
      c.topology = sim::Topology::chain(1);
      c.mac.max_retries = 0;
      c.workload.rounds = kRounds;
      c.workload.period = seconds(20);
      c.workload.jitter = 0;
      const auto m16 = static_cast<std::uint16_t>(mask);
      c.loss_script = [m16](const std::string& from, const std::string& to, std::uint64_t ordinal) {
        oracle::Stream s = from == "client1" ? oracle::client_to_fwd
                           : from == "server" ? oracle::server_to_fwd
                           : to == "server"   ? oracle::fwd_to_server
                                              : oracle::fwd_to_client;
        return oracle::dropped(m16, s, ordinal);
      };
      const auto want = oracle::expected_outcomes(m16, kRounds, mode != Mode::ndn);
      std::map<std::int64_t, std::pair<std::string, int>> got;  // round -> content, attempt
      for (const auto& r : run_trace(c).records) {
        if (r.kind == "deliver") got[r.seq] = {r.detail, static_cast<int>((r.value + seconds(1)) / seconds(2))};
      }
      bool ok = true;
      for (int i = 0; i < kRounds; ++i) {
        const auto round = i + 1;
        auto it = got.find(round);
        if (want[i].delivered) {
          ++delivered;
          ok &= it != got.end() && it->second.first == "instruction " + std::to_string(round) &&
                it->second.second == want[i].attempt;
        } else {
          ok &= it == got.end();
        }
      }
      if (!ok && mismatches++ == 0) first = fmt("%s mask %03x", sim::to_string(mode).c_str(), mask);
    }
  }
  std::string detail = fmt("2 modes x 4096 patterns x %d rounds, %llu deliveries expected, %d mismatching patterns",
                           kRounds, static_cast<unsigned long long>(delivered), mismatches);
  if (mismatches) detail += "; first: " + first;
  return {mismatches == 0, detail};
}

// 8. Link stress along the forwarder chain.
Result link_stress() {
  Result r{true, ""};
  for (Mode mode : sim::all_modes()) {
    const auto m = run(paper_tree(mode, 1000));
    const bool aggregating = mode == Mode::det_oscore_proxy || mode == Mode::ndn;
    std::string counts;
    std::uint64_t prev = 0;
    bool ok = true;
    for (int k = 1; k <= 7; ++k) {
      const auto* f = m.forwarder("f" + std::to_string(k));
      const auto out = f->requests_out;
      counts += fmt("%s%llu", k > 1 ? "," : "", static_cast<unsigned long long>(out));
      if (aggregating) {
        const auto hop = f->requests_out + f->responses_in;
        ok &= (k == 1 || out <= prev) && hop >= 1000 && hop <= 2000;
      } else {
        ok &= out == (k == 1 ? 2000u : prev + 1000u);
      }
      prev = out;
    }
    r.pass &= ok;
    r.detail += fmt("%s upstream requests f1..f7 %s%s; ", sim::to_string(mode).c_str(), counts.c_str(), ok ? "" : " BAD");
  }
  return r;
}

// 9. Codec round trips and tamper detection.
Result codec_and_tamper() {
  const auto start = std::chrono::steady_clock::now();
  gen::Gen g(9);
  int codec_bad = 0;
  constexpr int kMessages = 100000;
  for (int i = 0; i < kMessages; ++i) {
    const auto m = g.message();
    try {
      codec_bad += !(coap::decode_message(coap::encode_message(m)) == m);
    } catch (const std::exception&) {
      ++codec_bad;
    }
  }

  int aead_trials = 0, aead_undetected = 0, aead_bad = 0;
  for (int i = 0; i < 200; ++i) {
    const auto key = g.bytes(16, 16), nonce = g.bytes(13, 13), aad = g.bytes(0, 32), pt = g.bytes(0, 48);
    const auto ct = crypto::aes_ccm_encrypt(key, nonce, aad, pt);
    auto back = crypto::aes_ccm_decrypt(key, nonce, aad, ct);
    aead_bad += !back || *back != pt;
    for (std::size_t bit = 0; bit < ct.size() * 8; ++bit) {
      auto t = ct;
      t[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      ++aead_trials;
      aead_undetected += crypto::aes_ccm_decrypt(key, nonce, aad, t).has_value();
    }
  }

  int sig_trials = 0, sig_undetected = 0, sig_bad = 0;
  for (int i = 0; i < 20; ++i) {
    const auto kp = crypto::ed25519_from_seed(g.bytes(32, 32));
    const auto msg = g.bytes(1, 40);
    const auto sig = crypto::ed25519_sign(kp, msg);
    sig_bad += !crypto::ed25519_verify(kp.public_key, msg, sig);
    for (std::size_t bit = 0; bit < sig.size() * 8; ++bit) {
      auto t = sig;
      t[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      ++sig_trials;
      sig_undetected += crypto::ed25519_verify(kp.public_key, msg, t);
    }
    for (std::size_t bit = 0; bit < msg.size() * 8; ++bit) {
      auto t = msg;
      t[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      ++sig_trials;
      sig_undetected += crypto::ed25519_verify(kp.public_key, t, sig);
    }
  }
  const double secs = elapsed_since(start);
  const bool pass = codec_bad == 0 && aead_bad == 0 && aead_undetected == 0 && sig_bad == 0 && sig_undetected == 0 &&
                    secs < tol::kCodecSeconds;
  return {pass, fmt("codec %d/%d round trips failed; aead %d round-trip failures, %d/%d flips undetected; "
                    "signature %d round-trip failures, %d/%d flips undetected; %.2f s (limit %.0f s)",
                    codec_bad, kMessages, aead_bad, aead_undetected, aead_trials, sig_bad, sig_undetected, sig_trials,
                    secs, tol::kCodecSeconds)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Result()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "server load at zero loss", server_load},
      {2, "crypto operations per retrieval", crypto_per_retrieval},
      {3, "request determinism", request_determinism},
      {4, "forwarder invariants", forwarder_invariants},
      {5, "single-link staircase", single_link_staircase},
      {6, "lossy chain success", lossy_chain_success},
      {7, "drop-pattern oracle", drop_pattern_oracle},
      {8, "link stress", link_stress},
      {9, "codec and tamper", codec_and_tamper},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    Result r;
    try {
      r = c.fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    all &= r.pass;
    while (r.detail.size() >= 2 && r.detail.ends_with("; ")) r.detail.resize(r.detail.size() - 2);
    std::printf("criterion %d %-32s %s  %s\n", c.id, c.name, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
