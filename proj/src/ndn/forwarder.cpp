#include "wot/ndn/forwarder.hpp"

#include <algorithm>

namespace wot::ndn {

void NameFib::add(const Name& prefix, std::vector<FaceId> faces) {
  if (faces.empty()) throw std::invalid_argument("FIB prefix without faces: " + prefix.to_uri());
  entries_[prefix] = std::move(faces);
}

std::vector<FaceId> NameFib::lookup(const Name& name) const {
  Name probe = name;
  while (true) {
    if (auto it = entries_.find(probe); it != entries_.end()) return it->second;
    if (probe.components.empty()) return {};
    probe.components.pop_back();
  }
}

ContentStore::ContentStore(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("content store capacity must be positive");
}

std::size_t ContentStore::insert(const Data& data) {
  if (auto it = index_.find(data.name); it != index_.end()) {
    *it->second = data;
    order_.splice(order_.begin(), order_, it->second);
    return 0;
  }
  std::size_t evicted = 0;
  if (index_.size() == capacity_) {
    index_.erase(order_.back().name);
    order_.pop_back();
    evicted = 1;
  }
  order_.push_front(data);
  index_.emplace(data.name, order_.begin());
  return evicted;
}

const Data* ContentStore::find(const Name& name) {
  auto it = index_.find(name);
  if (it == index_.end()) return nullptr;
  order_.splice(order_.begin(), order_, it->second);
  return &*it->second;
}

Forwarder::Forwarder(FaceId self, NameFib fib, ForwarderConfig config, Verifier verify, NonceSource nonces)
    : self_(std::move(self)),
      fib_(std::move(fib)),
      config_(config),
      verify_(std::move(verify)),
      nonces_(std::move(nonces)),
      cs_(config.cs_capacity) {}

const PitEntry* Forwarder::pit_entry(const Name& name) const {
  auto it = pit_.find(name);
  return it == pit_.end() ? nullptr : &it->second;
}

Actions Forwarder::on_interest(const Interest& interest, const FaceId& face, SimTime now) {
  ++stats_.interests;
  if (const auto* cached = cs_.find(interest.name)) {
    ++stats_.cs_hits;
    if (observer_) observer_->on_cs_hit(*cached, face);
    return {SendPacket{face, *cached}};
  }
  if (auto it = pit_.find(interest.name); it != pit_.end()) {
    auto& entry = it->second;
    if (!entry.seen_nonces.insert(interest.nonce).second) {
      ++stats_.duplicate_nonces;
      return {};
    }
    if (std::find(entry.in_faces.begin(), entry.in_faces.end(), face) == entry.in_faces.end()) {
      entry.in_faces.push_back(face);
      ++stats_.aggregated;
      if (observer_) observer_->on_interest_aggregated(entry, face);
    }
    return {};
  }

  auto faces = fib_.lookup(interest.name);
  std::erase(faces, face);
  if (faces.empty()) {
    ++stats_.no_route;
    return {};
  }
  PitEntry entry;
  entry.name = interest.name;
  entry.in_faces.push_back(face);
  entry.out_faces = faces;
  entry.seen_nonces.insert(interest.nonce);
  entry.retries_left = config_.max_retries;
  entry.timeout_at = now + config_.interest_lifetime;

  Actions out;
  for (const auto& f : faces) {
    out.push_back(SendPacket{f, interest});
    ++stats_.forwarded;
  }
  out.push_back(StartTimer{interest.name, entry.timeout_at});
  auto& stored = pit_.emplace(interest.name, std::move(entry)).first->second;
  if (observer_) observer_->on_pit_created(stored);
  return out;
}

Actions Forwarder::on_data(const Data& data, const FaceId& face, SimTime /*now*/) {
  auto it = pit_.find(data.name);
  if (it == pit_.end()) {
    ++stats_.unsolicited;
    if (observer_) observer_->on_data_dropped(data, face, false);
    return {};
  }
  if (!verify_(data)) {
    ++stats_.invalid;
    it->second.answered_faces.insert(face);
    if (observer_) observer_->on_data_dropped(data, face, true);
    return {};
  }
  PitEntry entry = std::move(it->second);
  pit_.erase(it);
  cs_.insert(data);
  Actions out;
  for (const auto& f : entry.in_faces) {
    out.push_back(SendPacket{f, data});
    ++stats_.data_forwarded;
  }
  if (observer_) observer_->on_pit_closed(entry, PitClose::satisfied);
  return out;
}

Actions Forwarder::on_pit_timeout(const Name& name, SimTime now) {
  auto it = pit_.find(name);
  if (it == pit_.end() || it->second.timeout_at != now) return {};
  auto& entry = it->second;
  if (entry.retries_left == 0) {
    ++stats_.expired;
    PitEntry closed = std::move(entry);
    pit_.erase(it);
    if (observer_) observer_->on_pit_closed(closed, PitClose::expired);
    return {};
  }
  --entry.retries_left;
  entry.timeout_at = now + config_.interest_lifetime;
  Interest again{name, nonces_()};
  entry.seen_nonces.insert(again.nonce);
  Actions out;
  for (const auto& f : entry.out_faces) {
    if (entry.answered_faces.count(f)) continue;
    out.push_back(SendPacket{f, again});
    ++stats_.retransmissions;
  }
  out.push_back(StartTimer{name, entry.timeout_at});
  return out;
}

Consumer::Consumer(FaceId self, FaceId first_hop, ForwarderConfig config, Forwarder::NonceSource nonces)
    : self_(std::move(self)), first_hop_(std::move(first_hop)), config_(config), nonces_(std::move(nonces)) {}

Actions Consumer::express(std::uint64_t id, const Name& name, SimTime now) {
  if (open_.count(name)) throw std::invalid_argument("exchange already open for " + name.to_uri());
  open_.emplace(name, Exchange{id, now, now + config_.interest_lifetime, config_.max_retries});
  return {SendPacket{first_hop_, Interest{name, nonces_()}}, StartTimer{name, now + config_.interest_lifetime}};
}

std::optional<Consumer::Completion> Consumer::on_data(const Data& data) {
  auto it = open_.find(data.name);
  if (it == open_.end()) return std::nullopt;
  Completion done{it->second.id, data, it->second.issued_at};
  open_.erase(it);
  return done;
}

Consumer::TimeoutResult Consumer::on_timeout(const Name& name, SimTime now) {
  TimeoutResult result;
  auto it = open_.find(name);
  if (it == open_.end() || it->second.timeout_at != now) return result;
  auto& ex = it->second;
  if (ex.retries_left > 0) {
    --ex.retries_left;
    ex.timeout_at = now + config_.interest_lifetime;
    result.actions.push_back(SendPacket{first_hop_, Interest{name, nonces_()}});
    result.actions.push_back(StartTimer{name, ex.timeout_at});
    return result;
  }
  result.failure = Failure{ex.id, ex.issued_at};
  open_.erase(it);
  return result;
}

} // namespace wot::ndn
