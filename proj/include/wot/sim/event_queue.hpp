#pragma once

#include <functional>
#include <queue>
#include <vector>

#include "wot/time.hpp"

namespace wot::sim {

/// Min-heap of callbacks ordered by time, then by insertion order.
class EventQueue {
 public:
  using Callback = std::function<void()>;

  struct Event {
    SimTime at;
    std::uint64_t seq;
    Callback callback;
  };

  void schedule(SimTime at, Callback callback) { heap_.push(Event{at, next_seq_++, std::move(callback)}); }
  bool empty() const { return heap_.empty(); }
  SimTime next_time() const { return heap_.top().at; }
  std::size_t size() const { return heap_.size(); }

  Event pop() {
    Event e = std::move(const_cast<Event&>(heap_.top()));
    heap_.pop();
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

} // namespace wot::sim
