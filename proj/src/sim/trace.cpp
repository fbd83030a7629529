#include "wot/sim/trace.hpp"

#include <istream>
#include "json.hpp"
#include <ostream>
#include <sstream>

namespace wot::sim {

using nlohmann::json;

namespace {

json to_json(const TraceRecord& r) {
  json j;
  j["t"] = r.t;
  j["kind"] = r.kind;
  j["node"] = r.node;
  if (!r.peer.empty()) j["peer"] = r.peer;
  if (!r.msg.empty()) j["msg"] = r.msg;
  if (r.seq >= 0) j["seq"] = r.seq;
  if (!r.token.empty()) j["token"] = r.token;
  if (!r.key.empty()) j["key"] = r.key;
  if (!r.detail.empty()) j["detail"] = r.detail;
  if (r.value != 0) j["value"] = r.value;
  if (r.frames != 0) j["frames"] = r.frames;
  if (r.attempts != 0) j["attempts"] = r.attempts;
  return j;
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

TraceRecord from_json(const json& j) {
  TraceRecord r;
  r.t = j.at("t").get<SimTime>();
  r.kind = j.at("kind").get<std::string>();
  r.node = j.at("node").get<std::string>();
  r.peer = field<std::string>(j, "peer", "");
  r.msg = field<std::string>(j, "msg", "");
  r.seq = field<std::int64_t>(j, "seq", -1);
  r.token = field<std::string>(j, "token", "");
  r.key = field<std::string>(j, "key", "");
  r.detail = field<std::string>(j, "detail", "");
  r.value = field<std::int64_t>(j, "value", 0);
  r.frames = field<int>(j, "frames", 0);
  r.attempts = field<int>(j, "attempts", 0);
  if (r.kind.empty()) throw std::invalid_argument("empty kind");
  return r;
}

} // namespace

void RawTrace::write_ndjson(std::ostream& out) const {
  out << json{{"kind", "header"}, {"mode", mode}}.dump() << '\n';
  for (const auto& n : nodes) {
    out << json{{"kind", "node"}, {"node", n.name}, {"role", to_string(n.role)}}.dump() << '\n';
  }
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::string RawTrace::to_ndjson() const {
  std::ostringstream out;
  write_ndjson(out);
  return out.str();
}

RawTrace RawTrace::read_ndjson(std::istream& in) {
  RawTrace trace;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("not an object");
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "header") {
        trace.mode = j.at("mode").get<std::string>();
      } else if (kind == "node") {
        trace.nodes.push_back({j.at("node").get<std::string>(), parse_role(j.at("role").get<std::string>())});
      } else {
        trace.records.push_back(from_json(j));
      }
    } catch (const std::exception& e) {
      throw TraceError(number, e.what());
    }
  }
  return trace;
}

} // namespace wot::sim
