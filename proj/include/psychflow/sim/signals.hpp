#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "psychflow/scenario/types.hpp"

namespace psychflow::sim {

/// Region-wide free-bed notification board, one channel per age group.
///
/// Patients whose bed search failed park here. When a unit licensed for a
/// group frees a bed, every waiter on that channel is woken exactly once,
/// longest-waiting first, and re-runs its search synchronously; a later
/// waiter therefore sees any reservation an earlier one just made. Waiters
/// that stay bedless simply re-subscribe (with their original wait start,
/// preserving their priority).
class SignalHub {
 public:
  using Callback = std::function<void(double now)>;

  /// Registers a waiter on one channel. `wait_start` orders the wake-up
  /// queue (earlier = served first; ties by subscription order).
  void subscribe(AgeGroup group, double wait_start, Callback cb);

  /// Wakes the current snapshot of waiters on `group`'s channel. Waiters
  /// subscribing *during* the broadcast (i.e. re-subscriptions) are not
  /// woken again by it. Returns the number of callbacks invoked.
  std::size_t broadcast(AgeGroup group, double now);

  std::size_t waiting(AgeGroup group) const;
  std::size_t total_waiting() const;

  /// Removes and returns all channels' waiter callbacks (used to account
  /// for still-waiting patients when a run ends).
  std::vector<Callback> drain();

 private:
  struct Waiter {
    double wait_start;
    std::uint64_t seq;
    Callback cb;
  };
  std::array<std::vector<Waiter>, kAgeGroupCount> channels_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace psychflow::sim
