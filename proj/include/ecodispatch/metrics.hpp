#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include "json.hpp"

#include "ecodispatch/fleet.hpp"
#include "ecodispatch/sim.hpp"

namespace ecodispatch::metrics {

struct Summary {
  double deadhead_g = 0.0;
  double trip_g = 0.0;
  double total_g = 0.0;
  double deadhead_km = 0.0;
  double mean_wait_s = 0.0;  // served rides only
  double max_wait_s = 0.0;
  std::size_t served = 0;
  std::size_t dropped = 0;
};

Summary summarize(const sim::SimResult& r);

struct Deltas {
  double deadhead_reduction_pct = 0.0;
  double total_reduction_pct = 0.0;
  double waiting_increase_pct = 0.0;  // negative means shorter waits
};

// Percent changes relative to baseline. DomainError if a baseline total is zero.
Deltas compare(const Summary& candidate, const Summary& baseline);

enum class RatioMode { PerRideMean, RatioOfSums };

struct ClassEquity {
  std::size_t rides = 0;
  double ride_fraction = 0.0;
  double mean_dh_trip = 0.0;      // mean of per-ride deadhead_km / trip_km
  double ratio_of_sums = 0.0;     // sum deadhead_km / sum trip_km
  std::size_t zero_trip_rides = 0;  // excluded from the ratio mean

  double dh_trip(RatioMode m) const {
    return m == RatioMode::PerRideMean ? mean_dh_trip : ratio_of_sums;
  }
};

struct EquityReport {
  std::array<ClassEquity, 3> by_class;  // indexed by fleet::EmissionClass

  const ClassEquity& operator[](fleet::EmissionClass c) const {
    return by_class[static_cast<std::size_t>(c)];
  }
};

// Served rides only; classes come from the simulation's per-ride record.
EquityReport equity(const sim::SimResult& r);

nlohmann::ordered_json to_json(const Summary& s);
nlohmann::ordered_json to_json(const Deltas& d);
nlohmann::ordered_json to_json(const EquityReport& e);

struct SweepRow {
  double phi = 0.0;
  double lev_fraction = 0.0;
  Summary summary;
  EquityReport equity;
};

// phi,lev_fraction,deadhead_g,total_g,mean_wait_s,max_wait_s,lev_ride_frac,
// hev_ride_frac,lev_dh_trip,hev_dh_trip
void write_sweep_header(std::ostream& out);
void write_sweep_row(const SweepRow& row, std::ostream& out);

}  // namespace ecodispatch::metrics
