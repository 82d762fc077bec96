#include "psychflow/sim/resource.hpp"

#include <fmt/format.h>

#include <utility>

namespace psychflow::sim {

BedResource::BedResource(std::string id, int capacity) : id_(std::move(id)), capacity_(capacity) {
  if (capacity < 1) {
    throw ResourceError(fmt::format("unit '{}': capacity must be >= 1, got {}", id_, capacity));
  }
}

void BedResource::check() const {
  if (in_service_ < 0 || reserved() < 0 || in_service_ + reserved() > capacity_) {
    throw ResourceError(fmt::format("unit '{}': bed bookkeeping out of range ({} in service, {} "
                                    "reserved, {} beds)",
                                    id_, in_service_, reserved(), capacity_));
  }
}

std::optional<Reservation> BedResource::reserve() {
  if (available() <= 0) return std::nullopt;
  Reservation r{next_token_++};
  outstanding_.insert(r.token);
  ++reserves_granted_;
  check();
  return r;
}

void BedResource::commit(const Reservation& r) {
  if (outstanding_.erase(r.token) == 0) {
    throw ResourceError(fmt::format("unit '{}': commit of unknown reservation token {}", id_,
                                    r.token));
  }
  ++in_service_;
  ++reservation_commits_;
  ++admissions_;
  check();
}

FreedAction BedResource::cancel_reservation(const Reservation& r) {
  if (outstanding_.erase(r.token) == 0) {
    throw ResourceError(fmt::format("unit '{}': cancel of unknown reservation token {}", id_,
                                    r.token));
  }
  ++reservation_cancels_;
  check();
  return after_free();
}

FreedAction BedResource::release() {
  if (in_service_ <= 0) {
    throw ResourceError(fmt::format("unit '{}': release with no occupied beds", id_));
  }
  --in_service_;
  ++releases_;
  check();
  return after_free();
}

bool BedResource::try_admit() {
  if (available() <= 0) return false;
  ++in_service_;
  ++admissions_;
  check();
  return true;
}

void BedResource::enqueue(std::function<void(double)> waiter) {
  if (available() > 0) {
    throw ResourceError(
        fmt::format("unit '{}': enqueue while a bed is visible (must admit instead)", id_));
  }
  queue_.push_back(std::move(waiter));
}

FreedAction BedResource::after_free() {
  // A slot just opened. The FIFO waiting list outranks any broadcast.
  if (!queue_.empty() && available() > 0) {
    ++in_service_;
    ++admissions_;
    check();
    FreedAction act;
    act.admitted = std::move(queue_.front());
    queue_.pop_front();
    return act;
  }
  FreedAction act;
  act.broadcast_free = true;
  return act;
}

}  // namespace psychflow::sim
