#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <unordered_set>

#include "psychflow/errors.hpp"

namespace psychflow::sim {

struct ResourceError : Error {
  using Error::Error;
};

/// Token for one held bed that is not yet occupied (patient in transit).
struct Reservation {
  std::uint64_t token = 0;
};

/// What a freed bed slot turned into. Exactly one of the two applies:
/// either the FIFO waiting list head was admitted on the spot (invoke
/// `admitted` with the current time) or the bed became publicly visible
/// and the caller should broadcast a free-bed signal.
struct FreedAction {
  std::function<void(double now)> admitted;
  bool broadcast_free = false;
};

/// A pool of interchangeable inpatient beds with reservation semantics.
///
/// Beds are taken two ways: referred patients *reserve* a bed which is held
/// through travel and then committed on arrival, while direct admissions
/// seize immediately or join a FIFO waiting list. Reserved beds are
/// invisible to searches (available() excludes them), which is what makes a
/// placement decision safe across the travel delay.
class BedResource {
 public:
  BedResource(std::string id, int capacity);

  const std::string& id() const { return id_; }
  int capacity() const { return capacity_; }
  int in_service() const { return in_service_; }
  int reserved() const { return static_cast<int>(outstanding_.size()); }
  int available() const { return capacity_ - in_service_ - reserved(); }
  std::size_t queue_length() const { return queue_.size(); }

  /// Holds one bed if any is visible; empty otherwise.
  std::optional<Reservation> reserve();

  /// Converts a held bed into an occupied one (patient arrived).
  /// Unknown or already-consumed tokens throw ResourceError.
  void commit(const Reservation& r);

  /// Gives a held bed back without occupying it.
  FreedAction cancel_reservation(const Reservation& r);

  /// Discharges one occupied bed. Throws if none are occupied.
  FreedAction release();

  /// Immediate admission without reservation; true if a bed was seized.
  bool try_admit();

  /// Joins the FIFO waiting list. Only legal when no bed is visible, so
  /// a non-empty queue always implies available() == 0.
  void enqueue(std::function<void(double now)> waiter);

  // Lifetime counters for conservation checks.
  std::uint64_t reserves_granted() const { return reserves_granted_; }
  std::uint64_t reservation_commits() const { return reservation_commits_; }
  std::uint64_t reservation_cancels() const { return reservation_cancels_; }
  std::uint64_t admissions() const { return admissions_; }  ///< all bed occupations
  std::uint64_t releases() const { return releases_; }

 private:
  FreedAction after_free();
  void check() const;

  std::string id_;
  int capacity_;
  int in_service_ = 0;
  std::unordered_set<std::uint64_t> outstanding_;
  std::uint64_t next_token_ = 1;
  std::deque<std::function<void(double)>> queue_;

  std::uint64_t reserves_granted_ = 0;
  std::uint64_t reservation_commits_ = 0;
  std::uint64_t reservation_cancels_ = 0;
  std::uint64_t admissions_ = 0;
  std::uint64_t releases_ = 0;
};

}  // namespace psychflow::sim
