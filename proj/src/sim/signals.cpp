#include "psychflow/sim/signals.hpp"

#include <algorithm>
#include <utility>

namespace psychflow::sim {

void SignalHub::subscribe(AgeGroup group, double wait_start, Callback cb) {
  auto& channel = channels_[static_cast<std::size_t>(group)];
  Waiter w{wait_start, next_seq_++, std::move(cb)};
  // Keep the channel ordered by (wait_start, seq) so a broadcast is a plain
  // front-to-back sweep.
  auto pos = std::upper_bound(channel.begin(), channel.end(), w, [](const Waiter& a,
                                                                    const Waiter& b) {
    if (a.wait_start != b.wait_start) return a.wait_start < b.wait_start;
    return a.seq < b.seq;
  });
  channel.insert(pos, std::move(w));
}

std::size_t SignalHub::broadcast(AgeGroup group, double now) {
  auto& channel = channels_[static_cast<std::size_t>(group)];
  if (channel.empty()) return 0;
  // Snapshot: callbacks may re-subscribe, which must not extend this sweep.
  std::vector<Waiter> woken;
  woken.swap(channel);
  for (Waiter& w : woken) w.cb(now);
  return woken.size();
}

std::size_t SignalHub::waiting(AgeGroup group) const {
  return channels_[static_cast<std::size_t>(group)].size();
}

std::size_t SignalHub::total_waiting() const {
  std::size_t n = 0;
  for (const auto& c : channels_) n += c.size();
  return n;
}

std::vector<SignalHub::Callback> SignalHub::drain() {
  std::vector<Callback> out;
  for (auto& channel : channels_) {
    for (Waiter& w : channel) out.push_back(std::move(w.cb));
    channel.clear();
  }
  return out;
}

}  // namespace psychflow::sim
