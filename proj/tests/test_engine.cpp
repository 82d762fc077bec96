#include <doctest.h>

#include <string>
#include <vector>

#include "psychflow/scenario/types.hpp"
#include "psychflow/sim/calendar.hpp"
#include "psychflow/sim/random.hpp"
#include "psychflow/sim/resource.hpp"
#include "psychflow/sim/signals.hpp"

using namespace psychflow;
using sim::BedResource;
using sim::EventCalendar;
using sim::EventLabel;
using sim::SignalHub;

TEST_CASE("calendar fires by time then scheduling order") {
  EventCalendar cal;
  std::vector<std::string> order;
  cal.schedule(5.0, {"b", "", ""}, [&](double) { order.push_back("b"); });
  cal.schedule(1.0, {"a", "", ""}, [&](double) { order.push_back("a"); });
  cal.schedule(5.0, {"c", "", ""}, [&](double) { order.push_back("c"); });
  CHECK(cal.pending() == 3);
  std::uint64_t fired = cal.run_until(10.0);
  CHECK(fired == 3);
  CHECK(order == std::vector<std::string>{"a", "b", "c"});
  CHECK(cal.now() == 10.0);
  CHECK(cal.pending() == 0);
}

TEST_CASE("calendar clock advances monotonically and rejects the past") {
  EventCalendar cal;
  cal.run_until(4.0);
  CHECK(cal.now() == 4.0);
  CHECK_THROWS_AS(cal.schedule(3.9, {"x", "", ""}, [](double) {}), sim::SchedulingError);
  CHECK_THROWS_AS(cal.run_until(3.0), sim::SchedulingError);
  // events can schedule follow-ups at their own timestamp
  cal.schedule(5.0, {"x", "", ""}, [&](double now) {
    cal.schedule(now, {"y", "", ""}, [](double) {});
  });
  CHECK(cal.run_until(6.0) == 2);
}

TEST_CASE("cancelled events never fire and do not affect the digest") {
  auto run = [](bool with_cancelled) {
    EventCalendar cal;
    int fired = 0;
    cal.schedule(1.0, {"keep", "e1", ""}, [&](double) { ++fired; });
    if (with_cancelled) {
      auto h = cal.schedule(2.0, {"drop", "e2", ""}, [&](double) { ++fired; });
      cal.cancel(h);
    }
    cal.schedule(3.0, {"keep", "e3", ""}, [&](double) { ++fired; });
    cal.run_until(10.0);
    return std::pair(fired, cal.trace_hash());
  };
  auto [fired_plain, hash_plain] = run(false);
  auto [fired_cancel, hash_cancel] = run(true);
  CHECK(fired_plain == 2);
  CHECK(fired_cancel == 2);
  CHECK(hash_plain == hash_cancel);

  EventCalendar cal;
  auto h = cal.schedule(1.0, {"x", "", ""}, [](double) {});
  cal.cancel(h);
  CHECK_THROWS_AS(cal.cancel(h), sim::SchedulingError);
}

TEST_CASE("digest is order- and label-sensitive") {
  auto digest = [](double t1, const char* label) {
    EventCalendar cal;
    cal.schedule(t1, {label, "e", ""}, [](double) {});
    cal.run_until(10.0);
    return cal.trace_hash();
  };
  CHECK(digest(1.0, "a") == digest(1.0, "a"));
  CHECK(digest(1.0, "a") != digest(2.0, "a"));
  CHECK(digest(1.0, "a") != digest(1.0, "b"));
}

TEST_CASE("trace sink sees every fired event in order") {
  EventCalendar cal;
  std::vector<std::pair<double, std::string>> seen;
  cal.set_trace_sink([&](double t, const EventLabel& l) { seen.emplace_back(t, l.type); });
  cal.schedule(2.0, {"later", "", ""}, [](double) {});
  cal.schedule(1.0, {"sooner", "", ""}, [](double) {});
  cal.run_until(5.0);
  REQUIRE(seen.size() == 2);
  CHECK(seen[0] == std::pair(1.0, std::string("sooner")));
  CHECK(seen[1] == std::pair(2.0, std::string("later")));
}

TEST_CASE("beds cannot be double-booked across reserve/commit/release") {
  BedResource beds("u", 2);
  auto r1 = beds.reserve();
  auto r2 = beds.reserve();
  REQUIRE(r1);
  REQUIRE(r2);
  CHECK(beds.available() == 0);
  CHECK_FALSE(beds.reserve());  // full: both beds held
  CHECK_FALSE(beds.try_admit());

  beds.commit(*r1);
  CHECK(beds.in_service() == 1);
  CHECK(beds.reserved() == 1);
  CHECK_THROWS_AS(beds.commit(*r1), sim::ResourceError);  // token already consumed

  auto freed = beds.cancel_reservation(*r2);
  CHECK(freed.broadcast_free);
  CHECK(beds.available() == 1);
  CHECK_THROWS_AS(beds.cancel_reservation(*r2), sim::ResourceError);

  auto freed2 = beds.release();
  CHECK(freed2.broadcast_free);
  CHECK(beds.in_service() == 0);
  CHECK_THROWS_AS(beds.release(), sim::ResourceError);

  CHECK(beds.reserves_granted() == 2);
  CHECK(beds.reservation_commits() == 1);
  CHECK(beds.reservation_cancels() == 1);
  CHECK(beds.admissions() == beds.releases() + static_cast<std::uint64_t>(beds.in_service()));
}

TEST_CASE("waiting list is FIFO and outranks the broadcast") {
  BedResource beds("u", 1);
  REQUIRE(beds.try_admit());

  std::vector<int> admitted;
  beds.enqueue([&](double) { admitted.push_back(1); });
  beds.enqueue([&](double) { admitted.push_back(2); });
  CHECK(beds.queue_length() == 2);

  auto freed = beds.release();
  REQUIRE(freed.admitted);
  CHECK_FALSE(freed.broadcast_free);
  freed.admitted(10.0);
  CHECK(admitted == std::vector<int>{1});
  CHECK(beds.in_service() == 1);  // handoff keeps the bed occupied
  CHECK(beds.queue_length() == 1);

  auto freed2 = beds.release();
  REQUIRE(freed2.admitted);
  freed2.admitted(11.0);
  CHECK(admitted == std::vector<int>{1, 2});

  auto freed3 = beds.release();
  CHECK(freed3.broadcast_free);
  CHECK(beds.admissions() == 3);
  CHECK(beds.releases() == 3);
}

TEST_CASE("queue can only form when no bed is visible") {
  BedResource beds("u", 1);
  CHECK_THROWS_AS(beds.enqueue([](double) {}), sim::ResourceError);
}

TEST_CASE("signal hub wakes longest-waiting first, exactly once per broadcast") {
  SignalHub hub;
  std::vector<int> woken;
  hub.subscribe(AgeGroup::Adult, 5.0, [&](double) { woken.push_back(2); });
  hub.subscribe(AgeGroup::Adult, 1.0, [&](double) { woken.push_back(1); });
  hub.subscribe(AgeGroup::Child, 0.0, [&](double) { woken.push_back(99); });
  CHECK(hub.waiting(AgeGroup::Adult) == 2);

  CHECK(hub.broadcast(AgeGroup::Adult, 20.0) == 2);
  CHECK(woken == std::vector<int>{1, 2});  // earliest wait start first
  CHECK(hub.waiting(AgeGroup::Adult) == 0);
  CHECK(hub.waiting(AgeGroup::Child) == 1);  // other channels untouched
}

TEST_CASE("re-subscription during a broadcast waits for the next one") {
  SignalHub hub;
  int wakes = 0;
  std::function<void(double)> again = [&](double now) {
    ++wakes;
    hub.subscribe(AgeGroup::Geriatric, 0.0, again);  // still unplaced: wait again
    (void)now;
  };
  hub.subscribe(AgeGroup::Geriatric, 0.0, again);
  CHECK(hub.broadcast(AgeGroup::Geriatric, 1.0) == 1);
  CHECK(wakes == 1);
  CHECK(hub.waiting(AgeGroup::Geriatric) == 1);
  CHECK(hub.broadcast(AgeGroup::Geriatric, 2.0) == 1);
  CHECK(wakes == 2);
  CHECK(hub.drain().size() == 1);
  CHECK(hub.total_waiting() == 0);
}

// Single-server queue driven end to end through the engine primitives.
// For M/M/1 with arrival rate 0.5/h and unit-mean service, the expected
// time in system is 1/(mu - lambda) = 2 h; this pins arrival scheduling,
// seize/queue/handoff and release working together.
TEST_CASE("mm1 sojourn time matches queueing theory") {
  EventCalendar cal;
  BedResource server("s", 1);
  sim::RngStream arrivals(11, 0, sim::StreamPurpose::Arrivals);
  sim::RngStream service(11, 0, sim::StreamPurpose::LengthOfStay);

  const double lambda = 0.5, mean_service = 1.0, horizon = 200000.0;
  double sum_sojourn = 0.0;
  long completed = 0;

  struct Job {
    double arrived;
  };
  std::vector<Job> jobs;
  jobs.reserve(120000);

  std::function<void(double, std::size_t)> begin_service = [&](double now, std::size_t job) {
    double s = service.exponential(mean_service);
    cal.schedule(now + s, {"done", "", ""}, [&, job](double t_done) {
      sum_sojourn += t_done - jobs[job].arrived;
      ++completed;
      auto freed = server.release();
      if (freed.admitted) freed.admitted(t_done);
    });
  };

  double t = arrivals.exponential(1.0 / lambda);
  while (t < horizon) {
    cal.schedule(t, {"arrive", "", ""}, [&](double now) {
      jobs.push_back({now});
      std::size_t job = jobs.size() - 1;
      if (server.try_admit()) {
        begin_service(now, job);
      } else {
        server.enqueue([&, job](double start) { begin_service(start, job); });
      }
    });
    t += arrivals.exponential(1.0 / lambda);
  }
  cal.run_until(horizon + 1000.0);

  CHECK(completed > 90000);
  CHECK(sum_sojourn / completed == doctest::Approx(2.0).epsilon(0.05));
}
