#include "psychflow/flow/simulation.hpp"

#include <fmt/format.h>

#include <cmath>
#include <memory>

#include "psychflow/flow/arrivals.hpp"
#include "psychflow/sim/random.hpp"
#include "psychflow/sim/signals.hpp"

namespace psychflow::flow {

namespace {

/// Everything one replication needs, wired together. Event actions capture
/// `this` plus a patient index; all state lives here for the run's duration.
class Replication {
 public:
  Replication(const ScenarioConfig& cfg, int replication, const RunOptions& opts)
      : cfg_(cfg),
        rep_(replication),
        horizon_(cfg.horizon_hours()),
        los_rng_(opts.seed, replication, sim::StreamPurpose::LengthOfStay),
        review_rng_(opts.seed, replication, sim::StreamPurpose::Review),
        collector_(cfg.warmup_hours()) {
    const std::uint64_t demand_seed = opts.demand_seed.value_or(opts.seed);
    if (opts.trace) calendar_.set_trace_sink(opts.trace);
    review_sampler_ = opts.review_override
                          ? opts.review_override
                          : ReviewSampler([this](const IpUnit& u) {
                              return review_rng_.exponential(u.mean_review_hours);
                            });

    // Flatten the roster. Entity ids 1..E are EDs, E+1..E+U are units, so
    // every demand source owns a substream that is stable under roster-
    // preserving parameter changes.
    std::uint64_t entity = 0;
    for (const Facility& f : cfg.facilities) {
      if (f.ed.has_value()) {
        eds_.push_back(EdSource{
            &*f.ed, &f, cfg.travel.ed_index(f.ed->ed_id),
            sim::RngStream(demand_seed, replication, sim::StreamPurpose::Arrivals,
                           ++entity),
            sim::RngStream(demand_seed, replication, sim::StreamPurpose::Attributes,
                           entity)});
      }
    }
    for (const Facility& f : cfg.facilities) {
      for (const IpUnit& u : f.ip_units) {
        units_.push_back(std::make_unique<UnitRuntime>(UnitRuntime{
            &u, &f, cfg.travel.unit_index(u.unit_id),
            sim::BedResource(u.unit_id, u.bed_count),
            metrics::OccupancyAccumulator(cfg.warmup_hours()),
            sim::RngStream(demand_seed, replication, sim::StreamPurpose::Arrivals,
                           ++entity),
            sim::RngStream(demand_seed, replication, sim::StreamPurpose::Attributes,
                           entity)}));
        slots_.push_back(UnitSlot{&u, &units_.back()->beds, units_.back()->travel_col});
      }
    }
  }

  ReplicationResult run() {
    schedule_arrivals();
    calendar_.run_until(horizon_);
    return finish();
  }

 private:
  struct EdSource {
    const EmergencyDept* ed;
    const Facility* facility;
    std::size_t travel_row;
    sim::RngStream arrivals;
    sim::RngStream attributes;
  };

  struct UnitRuntime {
    const IpUnit* unit;
    const Facility* facility;
    std::size_t travel_col;
    sim::BedResource beds;
    metrics::OccupancyAccumulator occupancy;
    sim::RngStream arrivals;
    sim::RngStream attributes;
  };

  struct Patient {
    long id = 0;
    metrics::OriginType origin = metrics::OriginType::Ed;
    std::size_t source = 0;  ///< index into eds_ or units_
    AgeGroup age = AgeGroup::Adult;
    double acuity = std::nan("");
    double disposition = 0.0;

    int attempts = 0;
    int requests = 0;
    int final_requests = 0;
    bool placed = false;
    bool done = false;

    std::size_t dest = 0;  ///< index into units_
    sim::Reservation reservation;
    double placement_time = 0.0;
    double travel_hours = 0.0;
    double distance_miles = 0.0;
    double los = 0.0;
  };

  void schedule_arrivals() {
    for (std::size_t i = 0; i < eds_.size(); ++i) {
      EdSource& src = eds_[i];
      for (double t : weekly_arrival_times(src.ed->daily_rates, cfg_.rate_multiplier,
                                           horizon_, src.arrivals)) {
        calendar_.schedule(t, {"ed_arrival", src.ed->ed_id, ""},
                           [this, i](double now) { on_ed_arrival(i, now); });
      }
    }
    for (std::size_t j = 0; j < units_.size(); ++j) {
      UnitRuntime& u = *units_[j];
      for (double t : steady_arrival_times(u.unit->non_ed_rate, horizon_, u.arrivals)) {
        calendar_.schedule(t, {"direct_arrival", u.unit->unit_id, ""},
                           [this, j](double now) { on_direct_arrival(j, now); });
      }
    }
  }

  void on_ed_arrival(std::size_t ed_index, double now) {
    EdSource& src = eds_[ed_index];
    Patient p;
    p.id = static_cast<long>(patients_.size());
    p.origin = metrics::OriginType::Ed;
    p.source = ed_index;
    p.age = kAllAgeGroups[src.attributes.weighted_index(cfg_.dists.age_mix)];
    p.acuity = src.attributes.triangular(cfg_.dists.acuity.min, cfg_.dists.acuity.mode,
                                         cfg_.dists.acuity.max);
    p.disposition = now;
    patients_.push_back(std::move(p));
    attempt_search(patients_.size() - 1, now);
  }

  void attempt_search(std::size_t pid, double now) {
    Patient& p = patients_[pid];
    const EdSource& src = eds_[p.source];
    ++p.attempts;

    SearchRequest req;
    req.age = p.age;
    req.acuity = p.acuity;
    req.origin_facility_id = &src.facility->facility_id;
    req.travel_row = src.travel_row;
    req.policy = cfg_.policy;

    SearchOutcome found = find_placement(req, slots_, cfg_.travel, review_sampler_);
    p.requests += found.requests_sent;
    if (!found.placed) {
      // No unit can take the patient right now; park until any compatible
      // bed frees up. Priority is the original disposition time.
      hub_.subscribe(p.age, p.disposition,
                     [this, pid](double when) { attempt_search(pid, when); });
      return;
    }

    UnitRuntime& dest = *units_[found.slot_index];
    p.placed = true;
    p.final_requests = found.requests_sent;
    p.dest = found.slot_index;
    p.reservation = found.reservation;
    p.placement_time = now + found.review_hours;
    p.travel_hours = cfg_.travel.drive_hours_at(src.travel_row, dest.travel_col);
    p.distance_miles = cfg_.travel.distance_miles_at(src.travel_row, dest.travel_col);
    p.los = sample_los(*dest.unit);
    calendar_.schedule(p.placement_time + p.travel_hours,
                       {"admit", dest.unit->unit_id, fmt::format("p{}", p.id)},
                       [this, pid](double when) { on_admit(pid, when); });
  }

  void on_admit(std::size_t pid, double now) {
    Patient& p = patients_[pid];
    UnitRuntime& u = *units_[p.dest];
    u.beds.commit(p.reservation);
    u.occupancy.update(now, u.beds.in_service());
    calendar_.schedule(now + p.los,
                       {"discharge", u.unit->unit_id, fmt::format("p{}", p.id)},
                       [this, pid](double when) { on_discharge(pid, when); });
  }

  void on_discharge(std::size_t pid, double now) {
    Patient& p = patients_[pid];
    UnitRuntime& u = *units_[p.dest];
    sim::FreedAction freed = u.beds.release();
    p.done = true;
    emit_record(p);
    u.occupancy.update(now, u.beds.in_service());
    if (freed.admitted) {
      freed.admitted(now);  // FIFO head takes the bed before anyone hears of it
    } else if (freed.broadcast_free) {
      wake_waiters(u, now);
    }
  }

  void on_direct_arrival(std::size_t unit_index, double now) {
    UnitRuntime& u = *units_[unit_index];
    Patient p;
    p.id = static_cast<long>(patients_.size());
    p.origin = metrics::OriginType::Direct;
    p.source = unit_index;
    p.age = restricted_age(u);
    p.disposition = now;
    patients_.push_back(std::move(p));
    const std::size_t pid = patients_.size() - 1;

    if (u.beds.try_admit()) {
      admit_direct(pid, now);
    } else {
      u.beds.enqueue([this, pid](double when) { admit_direct(pid, when); });
    }
  }

  /// Takes the bed a direct patient was just granted (the resource has
  /// already counted the admission) and starts the stay.
  void admit_direct(std::size_t pid, double now) {
    Patient& p = patients_[pid];
    UnitRuntime& u = *units_[p.source];
    p.placed = true;
    p.dest = p.source;
    p.placement_time = now;
    p.los = sample_los(*u.unit);
    u.occupancy.update(now, u.beds.in_service());
    calendar_.schedule(now + p.los,
                       {"discharge", u.unit->unit_id, fmt::format("p{}", p.id)},
                       [this, pid](double when) { on_discharge(pid, when); });
  }

  /// Age draw for a direct admission, limited to bands the unit may treat
  /// (regional mix renormalized; uniform if the mix gives them no mass).
  AgeGroup restricted_age(UnitRuntime& u) {
    std::vector<AgeGroup> bands;
    std::vector<double> weights;
    for (AgeGroup g : kAllAgeGroups) {
      if (!u.unit->licensed_for(g)) continue;
      bands.push_back(g);
      weights.push_back(cfg_.dists.age_mix[static_cast<std::size_t>(g)]);
    }
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) std::fill(weights.begin(), weights.end(), 1.0);
    return bands[u.attributes.weighted_index(weights)];
  }

  double sample_los(const IpUnit& unit) {
    const std::vector<double>& pool = cfg_.dists.los_samples_hours;
    const double base = pool[los_rng_.uniform_index(pool.size())];
    return base * (unit.mean_los_hours / cfg_.dists.reference_mean_los_hours) *
           cfg_.los_multiplier;
  }

  void wake_waiters(const UnitRuntime& u, double now) {
    for (AgeGroup g : kAllAgeGroups) {
      if (u.unit->licensed_for(g)) hub_.broadcast(g, now);
    }
  }

  void emit_record(const Patient& p) {
    metrics::PatientRecord r;
    r.replication = rep_;
    r.patient_id = p.id;
    r.origin = p.origin;
    if (p.origin == metrics::OriginType::Ed) {
      const EdSource& src = eds_[p.source];
      r.origin_id = src.ed->ed_id;
      r.origin_facility_id = src.facility->facility_id;
    } else {
      const UnitRuntime& src = *units_[p.source];
      r.origin_id = src.unit->unit_id;
      r.origin_facility_id = src.facility->facility_id;
    }
    r.age_group = p.age;
    r.vulnerable = is_vulnerable(p.age);
    r.acuity = p.acuity;
    r.disposition_hours = p.disposition;
    if (p.placed) {
      const UnitRuntime& dest = *units_[p.dest];
      r.placement_hours = p.placement_time;
      r.coordination_hours = p.placement_time - p.disposition;
      r.travel_hours = p.travel_hours;
      r.treatment_delay_hours = r.coordination_hours + r.travel_hours;
      r.los_hours = p.los;
      r.destination_unit_id = dest.unit->unit_id;
      r.destination_facility_id = dest.facility->facility_id;
      r.transferred = dest.facility->facility_id != r.origin_facility_id;
      r.distance_miles = p.distance_miles;
    } else {
      r.censored = true;
    }
    r.search_attempts = p.attempts;
    r.requests_sent = p.requests;
    r.final_attempt_requests = p.final_requests;
    collector_.record(std::move(r));
  }

  ReplicationResult finish() {
    long censored = 0;
    long in_flight = 0;
    for (Patient& p : patients_) {
      if (p.done) continue;
      if (p.placed) {
        ++in_flight;  // travelling or mid-stay when the run ended
      } else {
        ++censored;
        emit_record(p);
      }
    }

    ReplicationResult out;
    out.replication = rep_;
    out.horizon_hours = horizon_;
    out.warmup_hours = cfg_.warmup_hours();
    out.records = collector_.take();
    for (auto& uptr : units_) {
      UnitRuntime& u = *uptr;
      u.occupancy.finish(horizon_);
      UnitTotals t;
      t.unit_id = u.unit->unit_id;
      t.facility_id = u.facility->facility_id;
      t.capacity = u.unit->bed_count;
      t.licensed_ages = u.unit->licensed_ages;
      t.reserves_granted = u.beds.reserves_granted();
      t.reservation_commits = u.beds.reservation_commits();
      t.reservation_cancels = u.beds.reservation_cancels();
      t.admissions = u.beds.admissions();
      t.releases = u.beds.releases();
      t.in_service_end = u.beds.in_service();
      t.reserved_end = u.beds.reserved();
      t.queue_end = u.beds.queue_length();
      t.busy_bed_hours = u.occupancy.busy_bed_hours();
      t.mean_occupancy = u.occupancy.mean_occupancy(t.capacity, horizon_);
      out.units.push_back(std::move(t));
    }
    out.patients_total = static_cast<long>(patients_.size());
    out.discarded_warmup = collector_.discarded_warmup();
    out.censored = censored;
    out.in_flight_end = in_flight;
    out.events_fired = calendar_.events_fired();
    out.trace_hash = calendar_.trace_hash();
    return out;
  }

  const ScenarioConfig& cfg_;
  int rep_;
  double horizon_;

  sim::EventCalendar calendar_;
  sim::SignalHub hub_;
  sim::RngStream los_rng_;
  sim::RngStream review_rng_;
  ReviewSampler review_sampler_;

  std::vector<EdSource> eds_;
  std::vector<std::unique_ptr<UnitRuntime>> units_;  // stable addresses for slots_
  std::vector<UnitSlot> slots_;
  std::vector<Patient> patients_;
  metrics::Collector collector_;
};

}  // namespace

ReplicationResult run_replication(const ScenarioConfig& scenario, int replication,
                                  const RunOptions& opts) {
  Replication run(scenario, replication, opts);
  return run.run();
}

}  // namespace psychflow::flow
