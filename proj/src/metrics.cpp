#include "ecodispatch/metrics.hpp"

#include <algorithm>
#include <ostream>

#include "ecodispatch/csv.hpp"
#include "ecodispatch/errors.hpp"

namespace ecodispatch::metrics {

Summary summarize(const sim::SimResult& r) {
  Summary s;
  double wait_sum = 0.0;
  for (const auto& x : r.rides) {
    if (x.dropped) {
      ++s.dropped;
      continue;
    }
    ++s.served;
    s.deadhead_g += x.deadhead_emission_g;
    s.trip_g += x.trip_emission_g;
    s.deadhead_km += x.deadhead_km;
    wait_sum += x.waiting_s;
    s.max_wait_s = std::max(s.max_wait_s, x.waiting_s);
  }
  s.total_g = s.deadhead_g + s.trip_g;
  if (s.served) s.mean_wait_s = wait_sum / static_cast<double>(s.served);
  return s;
}

Deltas compare(const Summary& candidate, const Summary& baseline) {
  if (!(baseline.deadhead_g > 0.0) || !(baseline.total_g > 0.0) ||
      !(baseline.mean_wait_s > 0.0)) {
    throw DomainError("baseline totals must be positive to compute relative deltas");
  }
  Deltas d;
  d.deadhead_reduction_pct =
      (baseline.deadhead_g - candidate.deadhead_g) / baseline.deadhead_g * 100.0;
  d.total_reduction_pct = (baseline.total_g - candidate.total_g) / baseline.total_g * 100.0;
  d.waiting_increase_pct =
      (candidate.mean_wait_s - baseline.mean_wait_s) / baseline.mean_wait_s * 100.0;
  return d;
}

EquityReport equity(const sim::SimResult& r) {
  EquityReport e;
  std::array<double, 3> ratio_sum{}, dh_sum{}, trip_sum{};
  std::array<std::size_t, 3> ratio_n{};
  std::size_t served = 0;
  for (const auto& x : r.rides) {
    if (x.dropped) continue;
    ++served;
    const auto c = static_cast<std::size_t>(x.vehicle_class);
    ++e.by_class[c].rides;
    dh_sum[c] += x.deadhead_km;
    trip_sum[c] += x.trip_km;
    if (x.trip_km > 0.0) {
      ratio_sum[c] += x.deadhead_km / x.trip_km;
      ++ratio_n[c];
    } else {
      ++e.by_class[c].zero_trip_rides;
    }
  }
  for (std::size_t c = 0; c < 3; ++c) {
    ClassEquity& q = e.by_class[c];
    if (served) q.ride_fraction = static_cast<double>(q.rides) / static_cast<double>(served);
    if (ratio_n[c]) q.mean_dh_trip = ratio_sum[c] / static_cast<double>(ratio_n[c]);
    if (trip_sum[c] > 0.0) q.ratio_of_sums = dh_sum[c] / trip_sum[c];
  }
  return e;
}

nlohmann::ordered_json to_json(const Summary& s) {
  return {{"deadhead_g", s.deadhead_g},     {"trip_g", s.trip_g},
          {"total_g", s.total_g},           {"deadhead_km", s.deadhead_km},
          {"mean_wait_s", s.mean_wait_s},   {"max_wait_s", s.max_wait_s},
          {"served", s.served},             {"dropped", s.dropped}};
}

nlohmann::ordered_json to_json(const Deltas& d) {
  return {{"deadhead_reduction_pct", d.deadhead_reduction_pct},
          {"total_reduction_pct", d.total_reduction_pct},
          {"waiting_increase_pct", d.waiting_increase_pct}};
}

nlohmann::ordered_json to_json(const EquityReport& e) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (auto c : {fleet::EmissionClass::LEV, fleet::EmissionClass::HEV,
                 fleet::EmissionClass::Standard}) {
    const ClassEquity& q = e[c];
    out[std::string(fleet::to_string(c))] = {{"rides", q.rides},
                                             {"ride_fraction", q.ride_fraction},
                                             {"mean_dh_trip", q.mean_dh_trip},
                                             {"ratio_of_sums", q.ratio_of_sums},
                                             {"zero_trip_rides", q.zero_trip_rides}};
  }
  return out;
}

void write_sweep_header(std::ostream& out) {
  out << "phi,lev_fraction,deadhead_g,total_g,mean_wait_s,max_wait_s,lev_ride_frac,"
         "hev_ride_frac,lev_dh_trip,hev_dh_trip\n";
}

void write_sweep_row(const SweepRow& row, std::ostream& out) {
  const auto& lev = row.equity[fleet::EmissionClass::LEV];
  const auto& hev = row.equity[fleet::EmissionClass::HEV];
  out << csv::join({csv::format_double(row.phi), csv::format_double(row.lev_fraction),
                    csv::format_double(row.summary.deadhead_g),
                    csv::format_double(row.summary.total_g),
                    csv::format_double(row.summary.mean_wait_s),
                    csv::format_double(row.summary.max_wait_s),
                    csv::format_double(lev.ride_fraction), csv::format_double(hev.ride_fraction),
                    csv::format_double(lev.mean_dh_trip), csv::format_double(hev.mean_dh_trip)})
      << '\n';
}

}  // namespace ecodispatch::metrics
