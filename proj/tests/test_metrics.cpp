#include <sstream>

#include "doctest.h"
#include "ecodispatch/errors.hpp"
#include "ecodispatch/metrics.hpp"

using namespace ecodispatch;
using fleet::EmissionClass;

namespace {

sim::RideRecord ride(double dh_km, double dh_g, double trip_km, double trip_g, double wait,
                     EmissionClass cls = EmissionClass::Standard) {
  sim::RideRecord r;
  r.driver_id = "D";
  r.deadhead_km = dh_km;
  r.deadhead_emission_g = dh_g;
  r.trip_km = trip_km;
  r.trip_emission_g = trip_g;
  r.waiting_s = wait;
  r.vehicle_class = cls;
  return r;
}

}  // namespace

TEST_CASE("summarize") {
  sim::SimResult empty;
  const auto s0 = metrics::summarize(empty);
  CHECK(s0.total_g == 0.0);
  CHECK(s0.mean_wait_s == 0.0);
  CHECK(s0.served == 0);

  sim::SimResult one;
  one.rides.push_back(ride(1, 200, 2, 300, 60));
  const auto s1 = metrics::summarize(one);
  CHECK(s1.deadhead_g == 200.0);
  CHECK(s1.total_g == 500.0);
  CHECK(s1.mean_wait_s == 60.0);

  sim::SimResult two = one;
  two.rides.push_back(ride(3, 100, 1, 50, 120));
  auto dropped = ride(9, 900, 9, 900, 9000);
  dropped.dropped = true;
  dropped.driver_id.clear();
  two.rides.push_back(dropped);
  const auto s2 = metrics::summarize(two);
  CHECK(s2.total_g == doctest::Approx(s2.deadhead_g + s2.trip_g));
  CHECK(s2.total_g == 650.0);
  CHECK(s2.mean_wait_s == 90.0);
  CHECK(s2.max_wait_s == 120.0);
  CHECK(s2.served == 2);
  CHECK(s2.dropped == 1);
}

TEST_CASE("compare") {
  metrics::Summary base;
  base.deadhead_g = 626;
  base.total_g = 1000;
  base.mean_wait_s = 330;
  CHECK(metrics::compare(base, base).deadhead_reduction_pct == 0.0);
  CHECK(metrics::compare(base, base).waiting_increase_pct == 0.0);

  metrics::Summary cand = base;
  cand.deadhead_g = 321;
  cand.mean_wait_s = 302;
  const auto d = metrics::compare(cand, base);
  CHECK(d.deadhead_reduction_pct == doctest::Approx(48.72).epsilon(1e-3));
  CHECK(d.waiting_increase_pct == doctest::Approx(-8.485).epsilon(1e-3));

  metrics::Summary zero;
  CHECK_THROWS_AS(metrics::compare(cand, zero), DomainError);
}

TEST_CASE("equity") {
  sim::SimResult r;
  r.rides.push_back(ride(1, 0, 4, 0, 0, EmissionClass::LEV));
  CHECK(metrics::equity(r)[EmissionClass::LEV].ride_fraction == 1.0);
  CHECK(metrics::equity(r)[EmissionClass::LEV].mean_dh_trip == 0.25);
  CHECK(metrics::equity(r)[EmissionClass::LEV].ratio_of_sums == 0.25);

  r.rides.push_back(ride(2, 0, 0, 0, 0, EmissionClass::HEV));
  r.rides.push_back(ride(1, 0, 2, 0, 0, EmissionClass::Standard));
  r.rides.push_back(ride(3, 0, 1, 0, 0, EmissionClass::LEV));
  const auto e = metrics::equity(r);
  CHECK(e[EmissionClass::HEV].zero_trip_rides == 1);
  CHECK(e[EmissionClass::HEV].mean_dh_trip == 0.0);
  CHECK(e[EmissionClass::LEV].mean_dh_trip == doctest::Approx((0.25 + 3.0) / 2));
  CHECK(e[EmissionClass::LEV].ratio_of_sums == doctest::Approx(4.0 / 5.0));
  double total = 0;
  for (const auto& c : e.by_class) total += c.ride_fraction;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sweep row formatting") {
  std::ostringstream out;
  metrics::write_sweep_header(out);
  metrics::SweepRow row;
  row.phi = 0.1;
  row.lev_fraction = 0.25;
  row.summary.deadhead_g = 1234.5;
  metrics::write_sweep_row(row, out);
  CHECK(out.str() ==
        "phi,lev_fraction,deadhead_g,total_g,mean_wait_s,max_wait_s,lev_ride_frac,"
        "hev_ride_frac,lev_dh_trip,hev_dh_trip\n0.1,0.25,1234.5,0,0,0,0,0,0,0\n");
}
