#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "psychflow/errors.hpp"

namespace psychflow::sim {

struct SchedulingError : Error {
  using Error::Error;
};

/// What an event was, for tracing and for the deterministic run digest.
struct EventLabel {
  std::string type;    ///< e.g. "ed_arrival", "commit", "release"
  std::string entity;  ///< primary entity id
  std::string detail;  ///< free-form extra column (may be empty)
};

/// Future-event calendar: a simulation clock plus a time-ordered queue of
/// callbacks. Events at equal times fire in scheduling order. Every fired
/// event is folded into an order-sensitive digest so two runs can be
/// compared for bit-identical behaviour without storing full traces.
class EventCalendar {
 public:
  using Action = std::function<void(double now)>;
  struct Handle {
    std::uint64_t id = 0;
  };

  /// Schedules `action` at absolute time `at` (hours). Scheduling into the
  /// past throws SchedulingError.
  Handle schedule(double at, EventLabel label, Action action);

  /// Cancels a pending event; cancelled events never fire, never appear in
  /// the trace and do not advance the clock. Unknown/fired handles throw.
  void cancel(Handle h);

  /// Fires events with time <= until, in (time, scheduling order), then
  /// leaves the clock at `until`. Returns the number of events fired.
  std::uint64_t run_until(double until);

  double now() const { return now_; }
  std::uint64_t events_fired() const { return fired_; }
  std::uint64_t pending() const { return live_ids_.size(); }
  std::uint64_t trace_hash() const { return hash_; }

  /// Optional observer invoked for every fired event (drives --trace).
  void set_trace_sink(std::function<void(double, const EventLabel&)> sink) {
    sink_ = std::move(sink);
  }

 private:
  struct Entry {
    double time;
    std::uint64_t seq;
    EventLabel label;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_set<std::uint64_t> live_ids_;   // scheduled, not yet fired or cancelled
  std::unordered_set<std::uint64_t> cancelled_;  // cancelled, not yet popped
  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t fired_ = 0;
  std::uint64_t hash_;
  std::function<void(double, const EventLabel&)> sink_;

 public:
  EventCalendar();
};

}  // namespace psychflow::sim
