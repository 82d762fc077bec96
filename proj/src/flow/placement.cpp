#include "psychflow/flow/placement.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace psychflow::flow {

namespace {

bool proximity_before(const std::vector<UnitSlot>& slots, const Candidate& a,
                      const Candidate& b) {
  if (a.drive_hours != b.drive_hours) return a.drive_hours < b.drive_hours;
  return slots[a.slot_index].unit->unit_id < slots[b.slot_index].unit->unit_id;
}

bool acceptance_before(const std::vector<UnitSlot>& slots, const Candidate& a,
                       const Candidate& b) {
  if (a.accept_prob != b.accept_prob) return a.accept_prob > b.accept_prob;
  return proximity_before(slots, a, b);
}

}  // namespace

std::vector<Candidate> build_candidates(const SearchRequest& req,
                                        const std::vector<UnitSlot>& slots,
                                        const TravelMatrix& travel,
                                        const ReviewSampler& sample_review) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const UnitSlot& slot = slots[i];
    if (!slot.unit->licensed_for(req.age)) continue;
    if (slot.beds->available() <= 0) continue;
    Candidate c;
    c.slot_index = i;
    c.drive_hours = travel.drive_hours_at(req.travel_row, slot.travel_col);
    c.distance_miles = travel.distance_miles_at(req.travel_row, slot.travel_col);
    const bool in_house = req.origin_facility_id != nullptr &&
                          slot.unit->facility_id == *req.origin_facility_id;
    // A facility always takes its own ED's patient if a bed is open.
    c.accept_prob = in_house ? 1.0 : slot.unit->accept_prob;
    out.push_back(c);
  }

  const bool by_acceptance = req.policy.by_acceptance();
  std::sort(out.begin(), out.end(),
            [&](const Candidate& a, const Candidate& b) {
              return by_acceptance ? acceptance_before(slots, a, b)
                                   : proximity_before(slots, a, b);
            });

  // Reviews are drawn in list order so a given stream state always maps to
  // the same sequence of requests.
  for (Candidate& c : out) c.review_hours = sample_review(*slots[c.slot_index].unit);
  return out;
}

namespace {

SearchOutcome accept(const std::vector<UnitSlot>& slots, const Candidate& c,
                     double review_hours, int requests_sent) {
  SearchOutcome out;
  out.placed = true;
  out.slot_index = c.slot_index;
  auto reservation = slots[c.slot_index].beds->reserve();
  if (!reservation) {
    throw FlowError(fmt::format(
        "unit '{}' lost its free bed during an atomic search",
        slots[c.slot_index].unit->unit_id));
  }
  out.reservation = *reservation;
  out.review_hours = review_hours;
  out.requests_sent = requests_sent;
  return out;
}

SearchOutcome walk_sequential(const SearchRequest& req,
                              const std::vector<UnitSlot>& slots,
                              const std::vector<Candidate>& candidates) {
  SearchOutcome out;
  for (const Candidate& c : candidates) {
    ++out.requests_sent;
    out.review_hours += c.review_hours;
    if (req.acuity < c.accept_prob) {
      return accept(slots, c, out.review_hours, out.requests_sent);
    }
  }
  return out;
}

SearchOutcome walk_concurrent(const SearchRequest& req,
                              const std::vector<UnitSlot>& slots,
                              const std::vector<Candidate>& candidates) {
  SearchOutcome out;
  const std::size_t m = static_cast<std::size_t>(req.policy.fanout);
  for (std::size_t start = 0; start < candidates.size(); start += m) {
    const std::size_t end = std::min(start + m, candidates.size());
    out.requests_sent += static_cast<int>(end - start);
    double slowest = 0.0;
    const Candidate* winner = nullptr;
    for (std::size_t i = start; i < end; ++i) {
      const Candidate& c = candidates[i];
      slowest = std::max(slowest, c.review_hours);
      const bool accepts = req.acuity < c.accept_prob;
      if (accepts && (winner == nullptr || c.review_hours < winner->review_hours)) {
        winner = &c;  // first acceptance to arrive wins the round
      }
    }
    if (winner != nullptr) {
      out.review_hours += winner->review_hours;
      return accept(slots, *winner, out.review_hours, out.requests_sent);
    }
    out.review_hours += slowest;  // the round only ends once every answer is in
  }
  return out;
}

}  // namespace

SearchOutcome find_placement(const SearchRequest& req,
                             const std::vector<UnitSlot>& slots,
                             const TravelMatrix& travel,
                             const ReviewSampler& sample_review) {
  if (req.policy.concurrent() && req.policy.fanout < 1) {
    throw FlowError("concurrent policies need fanout >= 1");
  }
  const std::vector<Candidate> candidates =
      build_candidates(req, slots, travel, sample_review);
  return req.policy.concurrent() ? walk_concurrent(req, slots, candidates)
                                 : walk_sequential(req, slots, candidates);
}

}  // namespace psychflow::flow
