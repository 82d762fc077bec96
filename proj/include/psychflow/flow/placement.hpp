#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psychflow/errors.hpp"
#include "psychflow/scenario/types.hpp"
#include "psychflow/sim/resource.hpp"

namespace psychflow::flow {

struct FlowError : Error {
  using Error::Error;
};

/// A unit as seen by the bed search: static description plus live bed state.
struct UnitSlot {
  const IpUnit* unit = nullptr;
  sim::BedResource* beds = nullptr;
  std::size_t travel_col = 0;  ///< column of this unit in the travel matrix
};

/// One entry of the ordered referral list built for a single search.
struct Candidate {
  std::size_t slot_index = 0;
  double drive_hours = 0.0;
  double distance_miles = 0.0;
  double accept_prob = 0.0;   ///< effective probability; 1 within the origin facility
  double review_hours = 0.0;  ///< pre-sampled response time for this request
};

/// Draws one referral-review duration for the given unit.
using ReviewSampler = std::function<double(const IpUnit&)>;

/// Who is searching and under which rules.
struct SearchRequest {
  AgeGroup age = AgeGroup::Adult;
  double acuity = 0.0;
  const std::string* origin_facility_id = nullptr;  ///< null: no in-house shortcut
  std::size_t travel_row = 0;  ///< row of the origin ED in the travel matrix
  PlacementPolicy policy;
};

struct SearchOutcome {
  bool placed = false;
  std::size_t slot_index = 0;      ///< accepting unit (valid when placed)
  sim::Reservation reservation;    ///< held bed at the accepting unit
  double review_hours = 0.0;       ///< referral time consumed by this search
  int requests_sent = 0;
};

/// Builds the policy-ordered referral list: units licensed for `age` with at
/// least one free bed, each with a pre-sampled review duration. Sequential
/// policies order by drive time; acceptance-informed policies order by
/// effective acceptance probability (descending), breaking ties by drive
/// time and then unit id.
std::vector<Candidate> build_candidates(const SearchRequest& req,
                                        const std::vector<UnitSlot>& slots,
                                        const TravelMatrix& travel,
                                        const ReviewSampler& sample_review);

/// Runs one bed search over the current bed state. The walk itself consumes
/// no simulated time; `review_hours` reports how much coordination time the
/// search adds. On success the returned reservation is already held.
///
/// Sequential policies contact one unit at a time and stop at the first
/// acceptance. Concurrent policies contact `fanout` units per round: a round
/// with no acceptance costs its slowest review, a round with acceptances
/// costs the fastest accepting review and places the patient there.
SearchOutcome find_placement(const SearchRequest& req,
                             const std::vector<UnitSlot>& slots,
                             const TravelMatrix& travel,
                             const ReviewSampler& sample_review);

}  // namespace psychflow::flow
