#include "wot/sim/simulation.hpp"

#include <deque>
#include <map>
#include <set>

#include "wot/coap/codec.hpp"
#include "wot/coap/uri.hpp"
#include "wot/ndn/forwarder.hpp"
#include "wot/proxy/endpoints.hpp"
#include "wot/proxy/forward_proxy.hpp"
#include "wot/security/oscore.hpp"
#include "wot/sim/event_queue.hpp"

namespace wot::sim {

using coap::Message;
using security::CryptoCounters;
using security::SecurityContext;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::oscore: return "oscore";
    case Mode::oscore_proxy: return "oscore-proxy";
    case Mode::det_oscore_proxy: return "det-oscore-proxy";
    case Mode::ndn: return "ndn";
    case Mode::coap_proxy: return "coap-proxy";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  for (auto m : {Mode::oscore, Mode::oscore_proxy, Mode::det_oscore_proxy, Mode::ndn, Mode::coap_proxy}) {
    if (to_string(m) == text) return m;
  }
  throw ConfigError("unknown mode '" + text + "'");
}

const std::vector<Mode>& all_modes() {
  static const std::vector<Mode> modes{Mode::oscore, Mode::oscore_proxy, Mode::det_oscore_proxy, Mode::ndn};
  return modes;
}

std::string resource_for_round(const WorkloadConfig& workload, std::int64_t round) {
  return workload.resource + "?t=" + std::to_string(round);
}

namespace {

enum class Kind { request, response, interest, data };

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::request: return "request";
    case Kind::response: return "response";
    case Kind::interest: return "interest";
    case Kind::data: return "data";
  }
  return "?";
}

struct Datagram {
  std::string src;
  /// Final destination; equals the next hop except for routed end-to-end
  /// traffic.
  std::string dst;
  Kind kind = Kind::request;
  Bytes bytes;
  std::string label;  // token hex or name, for the trace
};

struct Queued {
  std::string next_hop;
  Datagram datagram;
};

} // namespace

struct Simulation::Impl {
  struct Node;

  class ProxyTracer : public proxy::ProxyObserver {
   public:
    ProxyTracer(Impl& sim, Node& node) : sim_(sim), node_(node) {}
    void on_pending_opened(const proxy::PendingEntry& e) override {
      record("pending_open", e, e.downstream.front());
    }
    void on_request_aggregated(const proxy::PendingEntry& e, const proxy::Downstream& d) override {
      record("aggregate", e, d);
    }
    void on_pending_closed(const proxy::PendingEntry& e, proxy::CloseReason reason) override {
      auto r = sim_.make("pending_close", node_);
      r.token = to_hex(e.upstream_token);
      r.key = e.cache_key.hex();
      r.detail = reason == proxy::CloseReason::answered ? "answered" : "timed_out";
      r.value = static_cast<std::int64_t>(e.downstream.size());
      sim_.emit(std::move(r));
      for (const auto& d : e.downstream) record("fanout", e, d);
    }
    void on_response_dropped(const Message& m, const proxy::NodeAddress& from, proxy::DropReason reason) override {
      auto r = sim_.make("drop", node_);
      r.peer = from;
      r.msg = "response";
      r.token = to_hex(m.token());
      r.detail = reason == proxy::DropReason::duplicate ? "duplicate" : "unmatched";
      sim_.emit(std::move(r));
    }
    void on_cache_hit(const coap::CacheKey& key, const proxy::Downstream& d) override {
      auto r = sim_.make("cache_hit", node_);
      r.key = key.hex();
      r.peer = d.client;
      r.detail = to_hex(d.token);
      sim_.emit(std::move(r));
    }

   private:
    void record(const char* kind, const proxy::PendingEntry& e, const proxy::Downstream& d) {
      auto r = sim_.make(kind, node_);
      r.token = to_hex(e.upstream_token);
      r.key = e.cache_key.hex();
      r.peer = d.client;
      r.detail = to_hex(d.token);
      sim_.emit(std::move(r));
    }
    Impl& sim_;
    Node& node_;
  };

  class PitTracer : public ndn::ForwarderObserver {
   public:
    PitTracer(Impl& sim, Node& node) : sim_(sim), node_(node) {}
    void on_pit_created(const ndn::PitEntry& e) override { record("pending_open", e, e.in_faces.front()); }
    void on_interest_aggregated(const ndn::PitEntry& e, const ndn::FaceId& face) override {
      record("aggregate", e, face);
    }
    void on_pit_closed(const ndn::PitEntry& e, ndn::PitClose how) override {
      auto r = sim_.make("pending_close", node_);
      r.key = e.name.to_uri();
      r.detail = how == ndn::PitClose::satisfied ? "answered" : "timed_out";
      r.value = static_cast<std::int64_t>(e.in_faces.size());
      sim_.emit(std::move(r));
      if (how == ndn::PitClose::satisfied) {
        for (const auto& f : e.in_faces) record("fanout", e, f);
      }
    }
    void on_data_dropped(const ndn::Data& d, const ndn::FaceId& face, bool invalid) override {
      auto r = sim_.make("drop", node_);
      r.peer = face;
      r.msg = "data";
      r.key = d.name.to_uri();
      r.detail = invalid ? "invalid" : "unmatched";
      sim_.emit(std::move(r));
    }
    void on_cs_hit(const ndn::Data& d, const ndn::FaceId& face) override {
      auto r = sim_.make("cache_hit", node_);
      r.key = d.name.to_uri();
      r.peer = face;
      sim_.emit(std::move(r));
    }

   private:
    void record(const char* kind, const ndn::PitEntry& e, const ndn::FaceId& face) {
      auto r = sim_.make(kind, node_);
      r.key = e.name.to_uri();
      r.peer = face;
      sim_.emit(std::move(r));
    }
    Impl& sim_;
    Node& node_;
  };

  struct Node {
    std::string name;
    Role role = Role::forwarder;
    SimTime busy_until = 0;
    CryptoCounters counters;
    std::deque<Queued> radio;
    bool radio_busy = false;

    // client
    std::optional<proxy::ClientEndpoint> client;
    std::optional<SecurityContext> context;
    std::map<std::uint64_t, security::RequestBinding> bindings;
    std::optional<ndn::Consumer> consumer;
    std::set<std::uint64_t> open_ids;

    // forwarder
    std::unique_ptr<proxy::ForwardProxy> proxy;
    std::unique_ptr<ProxyTracer> proxy_tracer;
    std::unique_ptr<ndn::Forwarder> forwarder;
    std::unique_ptr<PitTracer> pit_tracer;

    // server
    std::map<Bytes, SecurityContext> pairwise;  // by client kid
    std::set<std::pair<Bytes, Bytes>> seen_requests;
    proxy::ResourceMap resources;
    std::map<ndn::Name, Bytes> named_resources;
    std::uint64_t data_counter = 0;
  };

  SimConfig config;
  Routing routing;
  std::string server;
  EventQueue queue;
  Rng workload_rng;
  Rng link_rng;
  Rng nonce_rng;
  ndn::DataKeys data_keys;
  std::vector<std::unique_ptr<Node>> nodes;
  std::map<std::string, Node*> by_name;
  std::map<std::pair<std::string, std::string>, LinkModel> links;
  std::map<std::pair<std::string, std::string>, std::uint64_t> ordinals;
  std::vector<std::string> clients;
  RawTrace trace;
  std::vector<NodeInfo> node_infos;
  SimTime now = 0;
  bool ran = false;

  explicit Impl(SimConfig c)
      : config(std::move(c)),
        routing((config.topology.validate(), config.topology)),
        workload_rng(config.seed),
        link_rng(workload_rng.next()),
        nonce_rng(workload_rng.next()) {
    validate();
    server = config.topology.names_with(Role::server).front();
    for (const auto& l : config.topology.links) {
      links[{l.a, l.b}] = LinkModel{l.loss, l.latency, config.mac};
      links[{l.b, l.a}] = LinkModel{l.loss_reverse.value_or(l.loss), l.latency, config.mac};
    }
    clients = config.workload.clients.empty() ? config.topology.names_with(Role::client) : config.workload.clients;
    for (const auto& c : clients) {
      const auto* spec = config.topology.find(c);
      if (!spec || spec->role != Role::client) throw ConfigError("workload client '" + c + "' is not a client node");
    }
    const auto& crypto = config.crypto;
    data_keys.aead_key = security::derive_oscore_key(crypto.master_secret, crypto.master_salt, Bytes{},
                                                     crypto.group_id, "NdnKey", 16);
    data_keys.mac_key = security::derive_oscore_key(crypto.master_secret, crypto.master_salt, Bytes{},
                                                    crypto.group_id, "NdnMac", 32);
    for (const auto& spec : config.topology.nodes) {
      auto node = std::make_unique<Node>();
      node->name = spec.name;
      node->role = spec.role;
      by_name[spec.name] = node.get();
      nodes.push_back(std::move(node));
      trace.nodes.push_back({spec.name, spec.role});
    }
    trace.mode = to_string(config.mode);
    node_infos = trace.nodes;
    for (auto& n : nodes) install(*n);
  }

  void validate() const {
    const auto& w = config.workload;
    if (w.rounds < 0) throw ConfigError("workload rounds must be nonnegative");
    if (w.period <= 0) throw ConfigError("workload period must be positive");
    if (w.jitter < 0 || w.drain < 0) throw ConfigError("jitter and drain must be nonnegative");
    if (w.resource.empty() || w.resource.front() != '/') throw ConfigError("resource must start with '/'");
    if (config.exchange.request_timeout <= 0) throw ConfigError("request timeout must be positive");
    if (config.exchange.max_retries < 0) throw ConfigError("retry limit must be nonnegative");
    if (config.exchange.cache_capacity == 0) throw ConfigError("cache capacity must be positive");
    if (config.mac.max_retries < 0) throw ConfigError("MAC retry limit must be nonnegative");
    if (config.mac.bitrate_bps <= 0) throw ConfigError("bitrate must be positive");
    if (config.mac.max_frame_bytes == 0) throw ConfigError("maximum frame size must be positive");
    if (config.crypto.signing_delay < 0) throw ConfigError("signing delay must be nonnegative");
    if (config.crypto.master_secret.empty()) throw ConfigError("master secret is empty");
    if (config.crypto.signing_seed.size() != 32) throw ConfigError("signing seed must be 32 bytes");
    if (config.crypto.group_id.empty()) throw ConfigError("group id is empty");
  }

  bool routed() const { return config.mode == Mode::oscore; }
  bool named() const { return config.mode == Mode::ndn; }

  // --- setup ---------------------------------------------------------------

  Bytes client_kid(const std::string& name) const {
    std::size_t i = 0;
    for (const auto& n : config.topology.nodes) {
      if (n.role != Role::client) continue;
      ++i;
      if (n.name == name) return Bytes{static_cast<std::uint8_t>(i)};
    }
    throw ConfigError("unknown client '" + name + "'");
  }

  security::GroupConfig group_config() const {
    const auto& c = config.crypto;
    security::GroupConfig g;
    g.master_secret = c.master_secret;
    g.master_salt = c.master_salt;
    g.group_id = c.group_id;
    g.signing_seed = c.signing_seed;
    return g;
  }

  ExchangeConfig timing() const { return config.exchange; }

  void install(Node& n) {
    const auto& crypto = config.crypto;
    const auto& ex = config.exchange;
    auto nonce_source = [this] { return static_cast<std::uint32_t>(nonce_rng.next()); };
    switch (n.role) {
      case Role::client: {
        const auto first_hop = routed() ? server : routing.next_hop(n.name, server);
        if (named()) {
          n.consumer.emplace(n.name, first_hop, ndn::ForwarderConfig{ex.request_timeout, ex.max_retries, 0},
                             nonce_source);
          break;
        }
        n.client.emplace(n.name, first_hop, proxy::ClientConfig{ex.request_timeout, ex.max_retries});
        const auto kid = client_kid(n.name);
        if (config.mode == Mode::oscore || config.mode == Mode::oscore_proxy) {
          n.context = SecurityContext::standard(crypto.master_secret, crypto.master_salt, kid, Bytes{},
                                                to_bytes(n.name));
        } else if (config.mode == Mode::det_oscore_proxy) {
          n.context = SecurityContext::deterministic_group(group_config(), Bytes{static_cast<std::uint8_t>(0x10 + kid[0])},
                                                           false);
        }
        break;
      }
      case Role::forwarder: {
        if (routed()) break;
        auto hops = routing.next_hops(n.name, server);
        if (named()) {
          ndn::NameFib fib;
          fib.add(ndn::Name{}, hops);
          auto verify = [this, &n](const ndn::Data& d) { return ndn::verify_data(d, data_keys, n.counters); };
          n.forwarder = std::make_unique<ndn::Forwarder>(
              n.name, std::move(fib), ndn::ForwarderConfig{ex.request_timeout, ex.max_retries, ex.cache_capacity},
              verify, nonce_source);
          n.pit_tracer = std::make_unique<PitTracer>(*this, n);
          n.forwarder->set_observer(n.pit_tracer.get());
          break;
        }
        proxy::Fib fib;
        std::vector<proxy::NextHop> next;
        for (const auto& h : hops) next.push_back({h, h != server});
        fib.add("coap://" + server + "/*", std::move(next));
        n.proxy = std::make_unique<proxy::ForwardProxy>(
            n.name, std::move(fib), proxy::ProxyConfig{ex.request_timeout, ex.max_retries, ex.cache_capacity});
        n.proxy_tracer = std::make_unique<ProxyTracer>(*this, n);
        n.proxy->set_observer(n.proxy_tracer.get());
        break;
      }
      case Role::server: {
        if (config.mode == Mode::oscore || config.mode == Mode::oscore_proxy) {
          for (const auto& spec : config.topology.nodes) {
            if (spec.role != Role::client) continue;
            auto kid = client_kid(spec.name);
            n.pairwise.emplace(kid, SecurityContext::standard(crypto.master_secret, crypto.master_salt, Bytes{}, kid,
                                                              to_bytes(spec.name)));
          }
        } else if (config.mode == Mode::det_oscore_proxy) {
          n.context = SecurityContext::deterministic_group(group_config(), group_config().server_id, true);
        }
        break;
      }
    }
  }

  // --- trace ---------------------------------------------------------------

  TraceRecord make(const char* kind, const Node& n) const {
    TraceRecord r;
    r.t = now;
    r.kind = kind;
    r.node = n.name;
    return r;
  }

  void emit(TraceRecord r) { trace.records.push_back(std::move(r)); }

  void emit_crypto(const Node& n, const CryptoCounters& before) {
    const std::pair<const char*, std::uint64_t> deltas[] = {
        {"aead", n.counters.aead_ops - before.aead_ops},
        {"sign", n.counters.sign_ops - before.sign_ops},
        {"verify", n.counters.verify_ops - before.verify_ops},
        {"hmac", n.counters.hmac_ops - before.hmac_ops},
    };
    for (const auto& [op, count] : deltas) {
      if (count == 0) continue;
      auto r = make("crypto", n);
      r.detail = op;
      r.value = static_cast<std::int64_t>(count);
      emit(std::move(r));
    }
  }

  // --- scheduling ----------------------------------------------------------

  /// Node-bound work: postponed while the node is busy signing.
  void at_node(Node& n, SimTime at, std::function<void()> fn) {
    queue.schedule(at, [this, &n, fn = std::move(fn)]() mutable { run_on(n, std::move(fn)); });
  }

  void run_on(Node& n, std::function<void()> fn) {
    if (now < n.busy_until) {
      queue.schedule(n.busy_until, [this, &n, fn = std::move(fn)]() mutable { run_on(n, std::move(fn)); });
      return;
    }
    const auto before = n.counters;
    fn();
    emit_crypto(n, before);
  }

  // --- radio ---------------------------------------------------------------

  void send(Node& n, const std::string& next_hop, Datagram d) {
    auto r = make("send", n);
    r.peer = next_hop;
    r.msg = kind_name(d.kind);
    r.token = d.label;
    emit(std::move(r));
    n.radio.push_back({next_hop, std::move(d)});
    if (!n.radio_busy) start_transmission(n);
  }

  void start_transmission(Node& n) {
    if (n.radio.empty()) {
      n.radio_busy = false;
      return;
    }
    n.radio_busy = true;
    auto item = std::move(n.radio.front());
    n.radio.pop_front();
    const auto key = std::make_pair(n.name, item.next_hop);
    auto link = links.find(key);
    if (link == links.end()) throw SimulationError("no link " + n.name + " -> " + item.next_hop);
    const auto ordinal = ordinals[key]++;
    const bool forced = config.loss_script && config.loss_script(n.name, item.next_hop, ordinal);
    const auto outcome = transmit(link->second, item.datagram.bytes.size(), link_rng, forced);

    auto r = make("tx", n);
    r.peer = item.next_hop;
    r.msg = kind_name(item.datagram.kind);
    r.token = item.datagram.label;
    r.seq = static_cast<std::int64_t>(ordinal);
    r.frames = outcome.frames;
    r.attempts = outcome.attempts;
    r.value = static_cast<std::int64_t>(item.datagram.bytes.size());
    r.detail = outcome.delivered ? "delivered" : "lost";
    emit(std::move(r));

    if (outcome.delivered) {
      Node& to = *by_name.at(item.next_hop);
      const auto from = n.name;
      at_node(to, now + outcome.occupancy + link->second.latency,
              [this, &to, from, d = std::move(item.datagram)] { receive(to, from, d); });
    }
    queue.schedule(now + outcome.occupancy, [this, &n] { start_transmission(n); });
  }

  /// `to` is the logical destination; routed mode picks the physical hop.
  void send_coap(Node& n, const std::string& to, const Message& m) {
    Datagram d{n.name, to, m.is_request() ? Kind::request : Kind::response, coap::encode_message(m),
               to_hex(m.token())};
    const auto hop = routed() ? routing.next_hop(n.name, to) : to;
    send(n, hop, std::move(d));
  }

  void send_ndn(Node& n, const std::string& face, const ndn::Packet& p) {
    const bool interest = std::holds_alternative<ndn::Interest>(p);
    const auto& name = interest ? std::get<ndn::Interest>(p).name : std::get<ndn::Data>(p).name;
    send(n, face, Datagram{n.name, face, interest ? Kind::interest : Kind::data, ndn::encode_packet(p), name.to_uri()});
  }

  // --- receive -------------------------------------------------------------

  void drop(const Node& n, const std::string& peer, const Datagram& d, const std::string& why) {
    auto r = make("drop", n);
    r.peer = peer;
    r.msg = kind_name(d.kind);
    r.token = d.label;
    r.detail = why;
    emit(std::move(r));
  }

  void receive(Node& n, const std::string& from, const Datagram& d) {
    auto r = make("rx", n);
    r.peer = from;
    r.msg = kind_name(d.kind);
    r.token = d.label;
    emit(std::move(r));

    if (routed() && d.dst != n.name) {
      send(n, routing.next_hop(n.name, d.dst), d);
      return;
    }
    if (d.kind == Kind::interest || d.kind == Kind::data) {
      ndn::Packet p;
      try {
        p = ndn::decode_packet(d.bytes);
      } catch (const ndn::TlvError& e) {
        drop(n, from, d, "decode");
        return;
      }
      receive_ndn(n, from, p, d);
      return;
    }
    Message m;
    try {
      m = coap::decode_message(d.bytes);
    } catch (const coap::DecodeError&) {
      drop(n, from, d, "decode");
      return;
    }
    const auto reply_to = routed() ? d.src : from;
    switch (n.role) {
      case Role::client:
        if (d.kind == Kind::response) client_response(n, m);
        else drop(n, from, d, "unexpected");
        break;
      case Role::forwarder:
        if (!n.proxy) {
          drop(n, from, d, "unexpected");
        } else if (d.kind == Kind::request) {
          proxy_actions(n, n.proxy->handle_client_request(m, from, now));
        } else {
          proxy_actions(n, n.proxy->handle_upstream_response(m, from, now));
        }
        break;
      case Role::server:
        if (d.kind == Kind::request) serve(n, m, reply_to);
        else drop(n, from, d, "unexpected");
        break;
    }
  }

  void receive_ndn(Node& n, const std::string& from, const ndn::Packet& p, const Datagram& d) {
    if (n.role == Role::forwarder && n.forwarder) {
      if (auto* i = std::get_if<ndn::Interest>(&p)) ndn_actions(n, n.forwarder->on_interest(*i, from, now));
      else ndn_actions(n, n.forwarder->on_data(std::get<ndn::Data>(p), from, now));
    } else if (n.role == Role::client && n.consumer && std::holds_alternative<ndn::Data>(p)) {
      consumer_data(n, std::get<ndn::Data>(p));
    } else if (n.role == Role::server && std::holds_alternative<ndn::Interest>(p)) {
      produce(n, std::get<ndn::Interest>(p), from);
    } else {
      drop(n, from, d, "unexpected");
    }
  }

  // --- forwarders ----------------------------------------------------------

  void proxy_actions(Node& n, const proxy::Actions& actions) {
    for (const auto& a : actions) {
      if (auto* s = std::get_if<proxy::SendTo>(&a)) {
        send_coap(n, s->to, s->message);
      } else if (auto* t = std::get_if<proxy::StartTimer>(&a)) {
        at_node(n, t->at, [this, &n, token = t->token, at = t->at] {
          proxy_actions(n, n.proxy->on_request_timeout(token, at));
        });
      } else {
        auto r = make("drop", n);
        r.msg = "request";
        r.detail = "local";
        emit(std::move(r));
      }
    }
  }

  void ndn_actions(Node& n, const ndn::Actions& actions) {
    for (const auto& a : actions) {
      if (auto* s = std::get_if<ndn::SendPacket>(&a)) {
        send_ndn(n, s->face, s->packet);
      } else {
        const auto& t = std::get<ndn::StartTimer>(a);
        at_node(n, t.at, [this, &n, name = t.name, at = t.at] {
          if (n.forwarder) {
            ndn_actions(n, n.forwarder->on_pit_timeout(name, at));
            return;
          }
          auto result = n.consumer->on_timeout(name, at);
          if (result.failure) fail(n, result.failure->id, "timeout");
          ndn_actions(n, result.actions);
        });
      }
    }
  }

  // --- clients -------------------------------------------------------------

  void issue(Node& n, std::int64_t round) {
    auto r = make("issue", n);
    r.seq = round;
    const auto key = resource_for_round(config.workload, round);
    r.key = key;
    emit(std::move(r));
    n.open_ids.insert(static_cast<std::uint64_t>(round));

    if (named()) {
      ndn_actions(n, n.consumer->express(static_cast<std::uint64_t>(round), ndn::Name::parse(key), now));
      return;
    }
    auto parts = coap::parse_proxy_uri("coap://" + server + key);
    Message base(coap::Code::get, coap::Type::con, n.client->next_message_id(), n.client->next_token());
    const bool send_host = !routed() && n.client->first_hop() != server;
    auto request = coap::compose_request(parts, send_host, base);
    security::RequestBinding binding;
    switch (config.mode) {
      case Mode::oscore:
      case Mode::oscore_proxy: {
        auto p = security::protect_request(*n.context, request, n.counters);
        request = std::move(p.message);
        binding = std::move(p.binding);
        break;
      }
      case Mode::det_oscore_proxy: {
        auto p = security::deterministic_protect_request(*n.context, request, n.counters);
        request = std::move(p.message);
        binding = std::move(p.binding);
        break;
      }
      default:
        break;
    }
    n.bindings[static_cast<std::uint64_t>(round)] = std::move(binding);
    client_actions(n, n.client->start(static_cast<std::uint64_t>(round), std::move(request), now));
  }

  void client_actions(Node& n, const proxy::Actions& actions) {
    for (const auto& a : actions) {
      if (auto* s = std::get_if<proxy::SendTo>(&a)) {
        send_coap(n, s->to, s->message);
      } else if (auto* t = std::get_if<proxy::StartTimer>(&a)) {
        at_node(n, t->at, [this, &n, token = t->token, at = t->at] {
          auto result = n.client->on_timeout(token, at);
          if (result.failure) {
            n.bindings.erase(result.failure->id);
            fail(n, result.failure->id, "timeout");
          }
          client_actions(n, result.actions);
        });
      }
    }
  }

  void deliver(Node& n, std::uint64_t id, SimTime issued_at, const Bytes& content, int attempts) {
    n.open_ids.erase(id);
    auto r = make("deliver", n);
    r.seq = static_cast<std::int64_t>(id);
    r.value = now - issued_at;
    r.attempts = attempts;
    r.detail = wot::to_string(content);
    emit(std::move(r));
  }

  void fail(Node& n, std::uint64_t id, const std::string& why) {
    n.open_ids.erase(id);
    auto r = make("fail", n);
    r.seq = static_cast<std::int64_t>(id);
    r.detail = why;
    emit(std::move(r));
  }

  void client_response(Node& n, const Message& m) {
    auto done = n.client->on_response(m);
    if (!done) {
      auto r = make("drop", n);
      r.msg = "response";
      r.token = to_hex(m.token());
      r.detail = "late";
      emit(std::move(r));
      return;
    }
    auto binding = std::move(n.bindings.at(done->id));
    n.bindings.erase(done->id);
    Message plain = m;
    if (config.mode != Mode::coap_proxy) {
      if (!m.has_option(coap::OptionNumber::oscore)) {
        fail(n, done->id, coap::code_name(m.code()));
        return;
      }
      try {
        plain = security::unprotect_response(*n.context, binding, m, n.counters);
      } catch (const security::SecurityError& e) {
        fail(n, done->id, "integrity");
        return;
      }
    }
    if (plain.code() != coap::Code::content) {
      fail(n, done->id, coap::code_name(plain.code()));
      return;
    }
    deliver(n, done->id, done->issued_at, plain.payload(), done->attempts);
  }

  void consumer_data(Node& n, const ndn::Data& data) {
    auto done = n.consumer->on_data(data);
    if (!done) {
      auto r = make("drop", n);
      r.msg = "data";
      r.token = data.name.to_uri();
      r.detail = "late";
      emit(std::move(r));
      return;
    }
    if (!ndn::verify_data(data, data_keys, n.counters)) {
      fail(n, done->id, "integrity");
      return;
    }
    auto content = ndn::open_data(data, data_keys, n.counters);
    if (!content) {
      fail(n, done->id, "integrity");
      return;
    }
    deliver(n, done->id, done->issued_at, *content, 0);
  }

  // --- server --------------------------------------------------------------

  void publish(Node& n, std::int64_t round) {
    const auto key = resource_for_round(config.workload, round);
    Bytes content = to_bytes("instruction " + std::to_string(round));
    n.named_resources[ndn::Name::parse(key)] = content;
    n.resources[key] = std::move(content);
  }

  /// The reply leaves once the signature is done; the node stays busy.
  void after_signing(Node& n, std::function<void()> send_fn) {
    n.busy_until = now + config.crypto.signing_delay;
    queue.schedule(n.busy_until, std::move(send_fn));
  }

  void serve(Node& n, const Message& request, const std::string& reply_to) {
    try {
      switch (config.mode) {
        case Mode::coap_proxy:
          send_coap(n, reply_to, proxy::serve_origin(request, n.resources));
          return;
        case Mode::oscore:
        case Mode::oscore_proxy: {
          auto raw = request.find_option(coap::OptionNumber::oscore);
          if (!raw) throw security::SecurityError("unprotected request");
          auto option = security::OscoreOption::decode(*raw);
          if (!option.kid) throw security::SecurityError("request without kid");
          auto ctx = n.pairwise.find(*option.kid);
          if (ctx == n.pairwise.end()) throw security::SecurityError("unknown kid");
          // A copy of an already accepted request is a transport
          // retransmission: answer it again instead of rejecting it.
          const auto id = std::make_pair(*option.kid, option.partial_iv);
          const auto check = n.seen_requests.count(id) ? security::ReplayCheck::skip : security::ReplayCheck::enforce;
          auto opened = security::unprotect_request(ctx->second, request, n.counters, check);
          n.seen_requests.insert(id);
          auto inner = proxy::serve_origin(opened.request, n.resources);
          send_coap(n, reply_to, security::protect_response(ctx->second, opened.binding, inner, n.counters));
          return;
        }
        case Mode::det_oscore_proxy: {
          auto opened = security::unprotect_request(*n.context, request, n.counters);
          auto inner = proxy::serve_origin(opened.request, n.resources);
          auto response = security::protect_response(*n.context, opened.binding, inner, n.counters);
          auto signed_response = security::sign_response(*n.context, response, n.counters);
          after_signing(n, [this, &n, reply_to, m = std::move(signed_response)] {
            send_coap(n, reply_to, m);
          });
          return;
        }
        case Mode::ndn:
          break;
      }
    } catch (const security::ReplayError&) {
      drop_request(n, request, "replay");
    } catch (const security::SecurityError&) {
      drop_request(n, request, "integrity");
    }
  }

  void drop_request(const Node& n, const Message& m, const char* why) {
    auto r = make("drop", n);
    r.msg = "request";
    r.token = to_hex(m.token());
    r.detail = why;
    emit(std::move(r));
  }

  void produce(Node& n, const ndn::Interest& interest, const std::string& face) {
    auto it = n.named_resources.find(interest.name);
    if (it == n.named_resources.end()) {
      auto r = make("drop", n);
      r.msg = "interest";
      r.token = interest.name.to_uri();
      r.detail = "no_content";
      emit(std::move(r));
      return;
    }
    Bytes nonce(13, 0);
    auto counter = ++n.data_counter;
    for (int i = 12; i >= 5 && counter; --i, counter >>= 8) nonce[i] = static_cast<std::uint8_t>(counter);
    auto data = ndn::seal_data(interest.name, it->second, nonce, data_keys, n.counters);
    after_signing(n, [this, &n, face, d = std::move(data)] { send_ndn(n, face, d); });
  }

  // --- run -----------------------------------------------------------------

  RawTrace run() {
    if (ran) throw SimulationError("simulation already ran");
    ran = true;
    const auto& w = config.workload;
    Node& origin = *by_name.at(server);
    SimTime last_issue = 0;
    if (!clients.empty()) {
      for (std::int64_t x = 1; x <= w.rounds; ++x) {
        at_node(origin, x * w.period, [this, &origin, x] { publish(origin, x); });
        for (const auto& c : clients) {
          const SimTime jitter =
              w.jitter > 0 ? static_cast<SimTime>(workload_rng.uniform01() * static_cast<double>(w.jitter)) : 0;
          const SimTime at = x * w.period + jitter;
          last_issue = std::max(last_issue, at);
          Node& n = *by_name.at(c);
          at_node(n, at, [this, &n, x] { issue(n, x); });
        }
      }
    }
    const SimTime end = last_issue + w.drain;
    while (!queue.empty() && queue.next_time() <= end) {
      auto event = queue.pop();
      now = event.at;
      event.callback();
    }
    std::size_t open = 0;
    for (auto& n : nodes) {
      if (n->client) open += n->client->open_exchanges();
      if (n->consumer) open += n->consumer->open_exchanges();
    }
    if (open > 0 && queue.empty()) {
      throw SimulationError("event queue exhausted with " + std::to_string(open) + " exchanges still open");
    }
    now = std::max(now, end);
    for (auto& n : nodes) {
      const auto ids = n->open_ids;
      for (auto id : ids) fail(*n, id, "unfinished");
    }
    emit_counters();
    return std::move(trace);
  }

  void emit_counters() {
    for (auto& n : nodes) {
      const std::pair<const char*, std::uint64_t> totals[] = {
          {"aead", n->counters.aead_ops},
          {"sign", n->counters.sign_ops},
          {"verify", n->counters.verify_ops},
          {"hmac", n->counters.hmac_ops},
      };
      for (const auto& [op, count] : totals) {
        if (count == 0) continue;
        auto r = make("counters", *n);
        r.detail = op;
        r.value = static_cast<std::int64_t>(count);
        emit(std::move(r));
      }
    }
  }

  std::string stack(const std::string& name) const {
    const Node& n = *by_name.at(name);
    switch (n.role) {
      case Role::client: return "client";
      case Role::server: return named() ? "producer" : "origin";
      case Role::forwarder:
        if (n.proxy) return "proxy";
        if (n.forwarder) return "ndn-forwarder";
        return "router";
    }
    return "?";
  }
};

Simulation::Simulation(SimConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

RawTrace Simulation::run() { return impl_->run(); }
const SimConfig& Simulation::config() const { return impl_->config; }
std::vector<NodeInfo> Simulation::nodes() const { return impl_->node_infos; }

std::string Simulation::stack(const std::string& node) const {
  if (!impl_->by_name.count(node)) throw ConfigError("unknown node '" + node + "'");
  return impl_->stack(node);
}

Simulation build_scenario(const SimConfig& config) { return Simulation(config); }

} // namespace wot::sim
