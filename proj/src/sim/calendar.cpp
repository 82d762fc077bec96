#include "psychflow/sim/calendar.hpp"

#include <fmt/format.h>

#include <bit>
#include <utility>

#include "psychflow/util/io.hpp"

namespace psychflow::sim {

EventCalendar::EventCalendar() : hash_(util::kFnvOffset) {}

EventCalendar::Handle EventCalendar::schedule(double at, EventLabel label, Action action) {
  if (at < now_) {
    throw SchedulingError(
        fmt::format("cannot schedule '{}' at t={} before current time t={}", label.type, at, now_));
  }
  std::uint64_t seq = next_seq_++;
  queue_.push(Entry{at, seq, std::move(label), std::move(action)});
  live_ids_.insert(seq);
  return Handle{seq};
}

void EventCalendar::cancel(Handle h) {
  if (live_ids_.erase(h.id) == 0) {
    throw SchedulingError(
        fmt::format("cancel of unknown, fired, or already-cancelled event {}", h.id));
  }
  cancelled_.insert(h.id);
}

std::uint64_t EventCalendar::run_until(double until) {
  if (until < now_) {
    throw SchedulingError(
        fmt::format("cannot run until t={} which is before current time t={}", until, now_));
  }
  std::uint64_t fired_now = 0;
  while (!queue_.empty() && queue_.top().time <= until) {
    Entry ev = queue_.top();
    queue_.pop();
    if (cancelled_.erase(ev.seq) > 0) continue;
    live_ids_.erase(ev.seq);
    now_ = ev.time;
    hash_ = util::fnv1a_u64(std::bit_cast<std::uint64_t>(ev.time), hash_);
    hash_ = util::fnv1a(ev.label.type, hash_);
    hash_ = util::fnv1a(ev.label.entity, hash_);
    hash_ = util::fnv1a(ev.label.detail, hash_);
    if (sink_) sink_(now_, ev.label);
    ++fired_;
    ++fired_now;
    ev.action(now_);
  }
  now_ = until;
  return fired_now;
}

}  // namespace psychflow::sim
